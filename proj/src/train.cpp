#include "ffdg/train.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

#include "ffdg/csv.hpp"
#include "ffdg/errors.hpp"
#include "ffdg/rng.hpp"

namespace ffdg {

// ---------------------------------------------------------------------------
// config file

namespace {

std::string trim(const std::string& s) {
    const std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

TrainConfig load_train_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config " + path);
    TrainConfig c;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            throw ValidationError(path + ":" + std::to_string(line_no) +
                                  ": expected key = value");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        try {
            if (key == "epochs") c.epochs = std::stoi(value);
            else if (key == "loss") c.loss = loss_kind_from_string(value);
            else if (key == "beta") c.beta = std::stod(value);
            else if (key == "noise") c.noise_p = std::stod(value);
            else if (key == "sampler") {
                if (value == "random") c.sampler = SamplerKind::random;
                else if (value == "uniform") c.sampler = SamplerKind::uniform;
                else throw ValidationError("sampler must be random or uniform");
            } else if (key == "train_per_flight") c.budgets.train_per_flight = std::stoi(value);
            else if (key == "val_per_flight") c.budgets.val_per_flight = std::stoi(value);
            else if (key == "seed") c.seed = std::stoull(value);
            else if (key == "n_blocks") c.n_blocks = std::stoi(value);
            else if (key == "width") c.width = std::stoi(value);
            else if (key == "head_width") c.head_width = std::stoi(value);
            else if (key == "head") c.head = head_variant_from_string(value);
            else if (key == "l2_coeff") c.l2_coeff = std::stod(value);
            else if (key == "resample_each_epoch") c.resample_each_epoch = value == "true";
            else if (key == "track_generalization") c.track_generalization = value == "true";
            else
                throw ValidationError("unknown key '" + key + "'");
        } catch (const std::invalid_argument&) {
            throw ValidationError(path + ":" + std::to_string(line_no) + ": bad value for " + key);
        }
    }
    if (c.epochs < 1 || c.beta < 0.0 || c.noise_p < 0.0)
        throw ValidationError(path + ": epochs must be >= 1, beta and noise >= 0");
    return c;
}

void write_train_config(const TrainConfig& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << "epochs = " << c.epochs << "\n";
    out << "loss = " << to_string(c.loss) << "\n";
    out << "beta = " << csv::format_double(c.beta) << "\n";
    out << "noise = " << csv::format_double(c.noise_p) << "\n";
    out << "sampler = " << (c.sampler == SamplerKind::random ? "random" : "uniform") << "\n";
    out << "train_per_flight = " << c.budgets.train_per_flight << "\n";
    out << "val_per_flight = " << c.budgets.val_per_flight << "\n";
    out << "seed = " << c.seed << "\n";
    out << "n_blocks = " << c.n_blocks << "\n";
    out << "width = " << c.width << "\n";
    out << "head_width = " << c.head_width << "\n";
    out << "head = " << to_string(c.head) << "\n";
    out << "l2_coeff = " << csv::format_double(c.l2_coeff) << "\n";
    out << "resample_each_epoch = " << (c.resample_each_epoch ? "true" : "false") << "\n";
    out << "track_generalization = " << (c.track_generalization ? "true" : "false") << "\n";
}

// ---------------------------------------------------------------------------
// pool assembly

std::vector<std::size_t> spec_feature_columns() {
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < kSpecFeatureCount; ++i) cols.push_back(8 + i);
    return cols;
}

Pool assemble_pool(const ObservationTable& table, std::span<const std::int64_t> rows) {
    Pool pool;
    const std::size_t n = rows.size();
    const std::size_t dim = 8 + kSpecFeatureCount;
    pool.X = Matrix(n, dim);
    pool.y.resize(n);
    pool.cap.resize(n);
    pool.type_of_row.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(rows[i]);
        double* dst = pool.X.row(i);
        for (std::size_t k = 0; k < 7; ++k) dst[k] = table.state(r, k);
        dst[7] = table.mass(r);
        const std::int32_t t = table.row_type(r);
        const std::vector<double>& feat = table.type_features(t);
        for (std::size_t k = 0; k < kSpecFeatureCount; ++k) dst[8 + k] = feat[k];
        pool.y[i] = table.target(r);
        pool.type_of_row[i] = t;
        // cap = 1.1 x n_engines x ff_takeoff (feature order: n_engines is
        // numeric feature 8, ff_takeoff is numeric feature 13)
        pool.cap[i] = kFfCapFactor * feat[8] * feat[13];
    }
    return pool;
}

// ---------------------------------------------------------------------------
// core loop

namespace {

PoolMetrics metrics_on(const std::vector<double>& pred, const std::vector<double>& y) {
    PoolMetrics m;
    const double n = static_cast<double>(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - y[i];
        m.mape += std::fabs(e / y[i]);
        m.mae += std::fabs(e);
        m.me += e;
    }
    m.mape = 100.0 * m.mape / n;
    m.mae = 3600.0 * m.mae / n;  // kg/s -> kg/h
    m.me = 3600.0 * m.me / n;
    return m;
}

std::vector<double> predict_batched(ModelState& state, const Pool& pool, Workspace& ws) {
    const std::size_t n = pool.X.rows;
    std::vector<double> pred(n);
    Matrix chunk;
    std::vector<double> cap;
    const std::size_t step = 8192;
    for (std::size_t start = 0; start < n; start += step) {
        const std::size_t m = std::min(step, n - start);
        chunk.rows = m;
        chunk.cols = pool.X.cols;
        chunk.data.assign(pool.X.row(start), pool.X.row(start) + m * pool.X.cols);
        cap.assign(pool.cap.begin() + start, pool.cap.begin() + start + m);
        forward(state, chunk, cap, Mode::infer, ws);
        std::copy(ws.pred.begin(), ws.pred.end(), pred.begin() + start);
    }
    return pred;
}

}  // namespace

PoolMetrics evaluate_pool(const ModelState& state, const Pool& pool) {
    Workspace ws;
    auto& mutable_state = const_cast<ModelState&>(state);  // infer mode is pure
    const std::vector<double> pred = predict_batched(mutable_state, pool, ws);
    return metrics_on(pred, pool.y);
}

ModelState train_core(const Pool& train, const Pool& val, const Pool* generalization,
                      const TrainConfig& config, const PoolResampler& resample) {
    if (train.X.rows == 0 || val.X.rows == 0)
        throw ValidationError("train_core: empty train or validation pool");

    ModelConfig mc;
    mc.n_blocks = config.n_blocks;
    mc.width = config.width;
    mc.head_width = config.head_width;
    mc.head = config.head;
    mc.l2_coeff = config.l2_coeff;
    mc.input_dim = static_cast<int>(train.X.cols);
    ModelState state = init_model(mc, config.seed);

    AdamState opt;
    opt.m = ParamSet::zeros_like(state);
    opt.v = ParamSet::zeros_like(state);
    ParamSet grads = ParamSet::zeros_like(state);

    const std::vector<std::size_t> noise_cols = spec_feature_columns();

    Workspace ws;
    Batch batch;
    Pool resampled;

    ModelState best;
    double best_metric = std::numeric_limits<double>::infinity();
    int best_epoch = 0;

    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        const Pool* active = &train;
        if (resample) {
            resampled = resample(epoch);
            active = &resampled;
        }
        const std::size_t n = active->X.rows;
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        Xoshiro256pp shuffle_rng(derive_seed(config.seed, "epoch-shuffle", epoch));
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(order[i], order[shuffle_rng.below(i + 1)]);

        double loss_sum = 0.0;
        int n_batches = 0;
        for (std::size_t start = 0; start < n; start += kBatchSize) {
            const std::size_t m = std::min<std::size_t>(kBatchSize, n - start);
            batch.X.rows = m;
            batch.X.cols = active->X.cols;
            batch.X.data.resize(m * active->X.cols);
            batch.y.resize(m);
            batch.cap.resize(m);
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t src = order[start + i];
                std::copy(active->X.row(src), active->X.row(src) + active->X.cols,
                          batch.X.row(i));
                batch.y[i] = active->y[src];
                batch.cap[i] = active->cap[src];
            }
            if (config.noise_p > 0.0)
                apply_feature_noise(batch.X, noise_cols, config.noise_p,
                                    derive_seed(config.seed, "noise", epoch, n_batches));

            forward(state, batch.X, batch.cap, Mode::train, ws);
            double objective;
            try {
                objective = backward(state, ws, batch, config.loss, config.beta, grads);
            } catch (const NumericError& e) {
                throw NumericError(std::string(e.what()) + " (epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(n_batches) + ")");
            }
            if (!std::isfinite(objective))
                throw NumericError("train_core: non-finite loss at epoch " +
                                   std::to_string(epoch) + ", batch " + std::to_string(n_batches));
            adam_step(state, grads, opt);
            loss_sum += objective;
            ++n_batches;
        }

        EpochStats stats;
        stats.train_loss = loss_sum / std::max(n_batches, 1);
        const std::vector<double> val_pred = predict_batched(state, val, ws);
        const PoolMetrics vm = metrics_on(val_pred, val.y);
        stats.val_mape = vm.mape;
        stats.val_mae = vm.mae;
        stats.val_me = vm.me;
        stats.val_metric = loss_value(val_pred, val.y, LossKind::BetaMAPE, config.beta);
        if (generalization != nullptr) {
            const std::vector<double> gen_pred = predict_batched(state, *generalization, ws);
            stats.gen_mape = metrics_on(gen_pred, generalization->y).mape;
        } else {
            stats.gen_mape = NAN;
        }
        state.history.epochs.push_back(stats);

        if (stats.val_metric < best_metric) {
            best_metric = stats.val_metric;
            best_epoch = epoch;
            best = state;          // parameter + running-stat snapshot
            best.history.epochs.clear();
        }
    }

    if (best_epoch == 0)
        throw NumericError("train_core: validation metric never became finite");
    best.history = state.history;
    best.history.best_epoch = best_epoch;
    best.provenance.seed = config.seed;
    best.provenance.epochs_run = config.epochs;
    best.provenance.best_val_metric = best_metric;
    best.provenance.loss = to_string(config.loss);
    best.provenance.beta = config.beta;
    best.provenance.noise_p = config.noise_p;
    best.provenance.sampler = config.sampler == SamplerKind::random ? "random" : "uniform";
    best.provenance.prng = std::string(kPrngAlgorithm);
    return best;
}

// ---------------------------------------------------------------------------
// experiment wiring

ModelState train_experiment(const ObservationTable& table, const DatasetSplit& split,
                            const TrainConfig& config) {
    split.validate();

    std::unordered_set<std::string> train_ids, val_ids, gen_test_ids;
    std::unordered_set<std::string> primary_types, gen_types;
    for (const FlightTag& tag : split.flights) {
        if (tag.fleet == Membership::training) {
            primary_types.insert(tag.type_code);
            if (tag.subset == Subset::train) train_ids.insert(tag.flight_id);
            if (tag.subset == Subset::val) val_ids.insert(tag.flight_id);
        } else {
            gen_types.insert(tag.type_code);
            if (tag.subset == Subset::test) gen_test_ids.insert(tag.flight_id);
        }
    }

    for (const std::string& id : val_ids)
        if (train_ids.count(id))
            throw ValidationError("leakage: flight " + id + " in both train and validation");
    for (const std::string& t : gen_types)
        if (primary_types.count(t))
            throw ValidationError("leakage: generalization type " + t +
                                  " present in the training fleet");

    std::vector<std::int64_t> train_rows, val_rows, gen_rows;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const std::string& fid = table.flight_id(table.row_flight(r));
        if (train_ids.count(fid)) train_rows.push_back(static_cast<std::int64_t>(r));
        else if (val_ids.count(fid)) val_rows.push_back(static_cast<std::int64_t>(r));
        else if (config.track_generalization && gen_test_ids.count(fid))
            gen_rows.push_back(static_cast<std::int64_t>(r));
    }
    if (train_rows.empty() || val_rows.empty())
        throw ValidationError("train_experiment: no train or validation rows after filtering");

    const auto draw = [&](std::span<const std::int64_t> rows, int budget, std::string_view tag) {
        const std::uint64_t seed = derive_seed(config.seed, tag);
        return config.sampler == SamplerKind::random
                   ? random_sample(table, rows, budget, seed)
                   : uniform_sample(table, rows, budget, seed);
    };

    const std::vector<std::int64_t> train_sel =
        draw(train_rows, config.budgets.train_per_flight, "train-pool");
    const std::vector<std::int64_t> val_sel =
        draw(val_rows, config.budgets.val_per_flight, "val-pool");

    const Pool train_pool = assemble_pool(table, train_sel);
    const Pool val_pool = assemble_pool(table, val_sel);
    std::optional<Pool> gen_pool;
    if (config.track_generalization && !gen_rows.empty())
        gen_pool = assemble_pool(table, gen_rows);

    PoolResampler resample;
    if (config.resample_each_epoch) {
        resample = [&table, &train_rows, &config](int epoch) {
            const std::uint64_t seed = derive_seed(config.seed, "train-pool", epoch);
            const std::vector<std::int64_t> sel =
                config.sampler == SamplerKind::random
                    ? random_sample(table, train_rows, config.budgets.train_per_flight, seed)
                    : uniform_sample(table, train_rows, config.budgets.train_per_flight, seed);
            return assemble_pool(table, sel);
        };
    }

    return train_core(train_pool, val_pool, gen_pool ? &*gen_pool : nullptr, config, resample);
}

}  // namespace ffdg
