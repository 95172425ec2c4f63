#include "ffdg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>

#include "ffdg/csv.hpp"
#include "ffdg/errors.hpp"
#include "ffdg/train.hpp"

namespace ffdg {

namespace {

MetricAggregate aggregate_types(const std::vector<TypeMetrics>& types) {
    MetricAggregate agg;
    agg.n_types = static_cast<int>(types.size());
    if (types.empty()) return agg;
    const double n = static_cast<double>(types.size());
    for (const TypeMetrics& t : types) {
        agg.mape_mean += t.mape;
        agg.mae_mean += t.mae;
        agg.me_mean += t.me;
    }
    agg.mape_mean /= n;
    agg.mae_mean /= n;
    agg.me_mean /= n;
    for (const TypeMetrics& t : types) {
        agg.mape_std += (t.mape - agg.mape_mean) * (t.mape - agg.mape_mean);
        agg.mae_std += (t.mae - agg.mae_mean) * (t.mae - agg.mae_mean);
        agg.me_std += (t.me - agg.me_mean) * (t.me - agg.me_mean);
    }
    agg.mape_std = std::sqrt(agg.mape_std / n);  // population std
    agg.mae_std = std::sqrt(agg.mae_std / n);
    agg.me_std = std::sqrt(agg.me_std / n);
    return agg;
}

}  // namespace

PerTypeReport evaluate_per_type(const ModelState& model, const ObservationTable& table,
                                std::span<const std::int64_t> rows) {
    const Pool pool = assemble_pool(table, rows);
    Workspace ws;
    auto& mutable_model = const_cast<ModelState&>(model);  // infer mode is pure
    std::vector<double> pred(rows.size());
    Matrix chunk;
    std::vector<double> cap;
    const std::size_t step = 8192;
    for (std::size_t start = 0; start < rows.size(); start += step) {
        const std::size_t m = std::min(step, rows.size() - start);
        chunk.rows = m;
        chunk.cols = pool.X.cols;
        chunk.data.assign(pool.X.row(start), pool.X.row(start) + m * pool.X.cols);
        cap.assign(pool.cap.begin() + static_cast<long>(start),
                   pool.cap.begin() + static_cast<long>(start + m));
        forward(mutable_model, chunk, cap, Mode::infer, ws);
        std::copy(ws.pred.begin(), ws.pred.end(), pred.begin() + static_cast<long>(start));
    }
    return evaluate_per_type(pred, table, rows);
}

PerTypeReport evaluate_per_type(std::span<const double> predictions,
                                const ObservationTable& table,
                                std::span<const std::int64_t> rows) {
    if (predictions.size() != rows.size())
        throw ValidationError("evaluate_per_type: predictions/rows size mismatch");
    // group per type, sorted by type code for a deterministic report
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < rows.size(); ++i)
        groups[table.type_code(table.row_type(static_cast<std::size_t>(rows[i])))].push_back(i);

    PerTypeReport report;
    for (const auto& [code, members] : groups) {
        if (members.empty()) continue;
        TypeMetrics tm;
        tm.type_code = code;
        const double n = static_cast<double>(members.size());
        for (const std::size_t i : members) {
            const double y = table.target(static_cast<std::size_t>(rows[i]));
            const double e = predictions[i] - y;
            tm.mape += std::fabs(e / y);
            tm.mae += std::fabs(e);
            tm.me += e;
        }
        tm.mape = 100.0 * tm.mape / n;
        tm.mae = 3600.0 * tm.mae / n;  // kg/s -> kg/h
        tm.me = 3600.0 * tm.me / n;
        tm.n_rows = static_cast<std::int64_t>(members.size());
        report.types.push_back(std::move(tm));
    }
    report.aggregate = aggregate_types(report.types);
    return report;
}

double spearman_rho(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    if (n != b.size() || n < 2) return 0.0;
    const auto ranks = [n](std::span<const double> v) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> rank(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = 0.5 * static_cast<double>(i + j) + 1.0;  // average rank on ties
            for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
            i = j + 1;
        }
        return rank;
    };
    const std::vector<double> ra = ranks(a), rb = ranks(b);
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va <= 0.0 || vb <= 0.0) return 0.0;
    return cov / std::sqrt(va * vb);
}

namespace {

GenReport gen_report_from(const PerTypeReport& per_type, const Fleet& fleet,
                          const QuantileMap& qmap);

}  // namespace

GenReport generalization_report(const ModelState& model, const ObservationTable& table,
                                std::span<const std::int64_t> gen_rows, const Fleet& fleet,
                                const QuantileMap& qmap) {
    return gen_report_from(evaluate_per_type(model, table, gen_rows), fleet, qmap);
}

GenReport generalization_report(std::span<const double> predictions,
                                const ObservationTable& table,
                                std::span<const std::int64_t> gen_rows, const Fleet& fleet,
                                const QuantileMap& qmap) {
    return gen_report_from(evaluate_per_type(predictions, table, gen_rows), fleet, qmap);
}

namespace {

GenReport gen_report_from(const PerTypeReport& per_type, const Fleet& fleet,
                          const QuantileMap& qmap) {
    GenReport report;
    for (const TypeMetrics& tm : per_type.types) {
        const long long idx = fleet.find(tm.type_code);
        if (idx < 0)
            throw ValidationError("generalization_report: type " + tm.type_code +
                                  " not in fleet");
        if (fleet.membership[static_cast<std::size_t>(idx)] != Membership::generalization)
            throw ValidationError("generalization_report: type " + tm.type_code +
                                  " is tagged as a training type");
        GenEntry e;
        e.metrics = tm;
        const ClosestResult c =
            closest_training_distance(fleet.specs[static_cast<std::size_t>(idx)], fleet, qmap);
        e.d_min = c.distance;
        e.closest_type = c.type_code;
        report.entries.push_back(std::move(e));
    }
    report.aggregate = per_type.aggregate;

    std::vector<double> d, mape;
    for (const GenEntry& e : report.entries) {
        d.push_back(e.d_min);
        mape.push_back(e.metrics.mape);
    }
    report.spearman_rho = spearman_rho(d, mape);
    return report;
}

}  // namespace

Phase classify_phase(double vertical_rate, double threshold) {
    if (vertical_rate > threshold) return Phase::climb;
    if (vertical_rate < -threshold) return Phase::descent;
    return Phase::level;
}

PhaseHistogram phase_histogram(const ObservationTable& table,
                               std::span<const std::int64_t> rows, double threshold) {
    PhaseHistogram h;
    for (const std::int64_t r : rows) {
        switch (classify_phase(table.vertical_rate(static_cast<std::size_t>(r)), threshold)) {
            case Phase::climb: ++h.climb; break;
            case Phase::level: ++h.level; break;
            case Phase::descent: ++h.descent; break;
        }
    }
    const double n = static_cast<double>(h.climb + h.level + h.descent);
    if (n > 0.0) {
        h.climb_frac = static_cast<double>(h.climb) / n;
        h.level_frac = static_cast<double>(h.level) / n;
        h.descent_frac = static_cast<double>(h.descent) / n;
    }
    return h;
}

// ---------------------------------------------------------------------------
// report bundle

namespace {

void write_metrics_by_type(const ReportBundle& b, const std::string& path) {
    csv::Writer w(path);
    w.header({"subset", "type_code", "n_rows", "mape_pct", "mae_kg_h", "me_kg_h"});
    const auto rows = [&w](const std::vector<TypeMetrics>& types, std::string_view subset) {
        for (const TypeMetrics& t : types) {
            w.field(subset);
            w.field(std::string_view(t.type_code));
            w.field(static_cast<long long>(t.n_rows));
            w.field(t.mape);
            w.field(t.mae);
            w.field(t.me);
            w.end_row();
        }
    };
    rows(b.seen.types, "seen");
    std::vector<TypeMetrics> gen_types;
    for (const GenEntry& e : b.generalization.entries) gen_types.push_back(e.metrics);
    rows(gen_types, "generalization");
    w.close();
}

void write_aggregate(const ReportBundle& b, const std::string& path) {
    csv::Writer w(path);
    w.header({"subset", "n_types", "mape_mean", "mape_std", "mae_mean", "mae_std", "me_mean",
              "me_std", "spearman_rho"});
    const auto row = [&w](const MetricAggregate& a, std::string_view subset, double rho,
                          bool has_rho) {
        w.field(subset);
        w.field(static_cast<long long>(a.n_types));
        w.field(a.mape_mean);
        w.field(a.mape_std);
        w.field(a.mae_mean);
        w.field(a.mae_std);
        w.field(a.me_mean);
        w.field(a.me_std);
        if (has_rho)
            w.field(rho);
        else
            w.field(std::string_view(""));
        w.end_row();
    };
    row(b.seen.aggregate, "seen", 0.0, false);
    row(b.generalization.aggregate, "generalization", b.generalization.spearman_rho, true);
    w.close();
}

void write_gen_vs_distance(const GenReport& g, const std::string& path) {
    csv::Writer w(path);
    w.header({"type_code", "d_min", "closest_type", "mape_pct", "mae_kg_h", "me_kg_h"});
    for (const GenEntry& e : g.entries) {
        w.field(std::string_view(e.metrics.type_code));
        w.field(e.d_min);
        w.field(std::string_view(e.closest_type));
        w.field(e.metrics.mape);
        w.field(e.metrics.mae);
        w.field(e.metrics.me);
        w.end_row();
    }
    w.close();
}

void write_phase_hist(const ReportBundle& b, const std::string& path) {
    csv::Writer w(path);
    w.header({"subset", "phase", "count", "fraction"});
    const auto rows = [&w](const PhaseHistogram& h, std::string_view subset) {
        const auto row = [&](std::string_view phase, std::int64_t count, double frac) {
            w.field(subset);
            w.field(phase);
            w.field(static_cast<long long>(count));
            w.field(frac);
            w.end_row();
        };
        row("climb", h.climb, h.climb_frac);
        row("level", h.level, h.level_frac);
        row("descent", h.descent, h.descent_frac);
    };
    rows(b.phases_seen, "seen");
    rows(b.phases_gen, "generalization");
    w.close();
}

void write_history(const TrainHistory& h, const std::string& path) {
    csv::Writer w(path);
    w.header({"epoch", "train_loss", "val_mape", "val_mae", "val_me", "val_metric", "gen_mape"});
    for (std::size_t i = 0; i < h.epochs.size(); ++i) {
        const EpochStats& e = h.epochs[i];
        w.field(static_cast<long long>(i + 1));
        w.field(e.train_loss);
        w.field(e.val_mape);
        w.field(e.val_mae);
        w.field(e.val_me);
        w.field(e.val_metric);
        if (std::isnan(e.gen_mape))
            w.field(std::string_view(""));
        else
            w.field(e.gen_mape);
        w.end_row();
    }
    w.close();
}

void write_markdown(const ReportBundle& b, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << "# Evaluation report\n\n";
    const auto table = [&out](const std::vector<TypeMetrics>& types, const MetricAggregate& agg) {
        out << "| type | rows | MAPE (%) | MAE (kg/h) | ME (kg/h) |\n";
        out << "|------|------|----------|------------|-----------|\n";
        for (const TypeMetrics& t : types)
            out << "| " << t.type_code << " | " << t.n_rows << " | "
                << csv::format_double(t.mape) << " | " << csv::format_double(t.mae) << " | "
                << csv::format_double(t.me) << " |\n";
        out << "| mean (std) | " << agg.n_types << " types | " << csv::format_double(agg.mape_mean)
            << " (" << csv::format_double(agg.mape_std) << ") | "
            << csv::format_double(agg.mae_mean) << " (" << csv::format_double(agg.mae_std)
            << ") | " << csv::format_double(agg.me_mean) << " ("
            << csv::format_double(agg.me_std) << ") |\n\n";
    };
    out << "## Seen types (primary test flights)\n\n";
    table(b.seen.types, b.seen.aggregate);
    out << "## Unseen types (generalization test flights)\n\n";
    std::vector<TypeMetrics> gen_types;
    for (const GenEntry& e : b.generalization.entries) gen_types.push_back(e.metrics);
    table(gen_types, b.generalization.aggregate);
    out << "Spearman rank correlation between closest-training distance and per-type MAPE: "
        << csv::format_double(b.generalization.spearman_rho) << "\n\n";
    out << "## Distance to closest training type\n\n";
    out << "| type | d_min | closest |\n|------|-------|---------|\n";
    for (const GenEntry& e : b.generalization.entries)
        out << "| " << e.metrics.type_code << " | " << csv::format_double(e.d_min) << " | "
            << e.closest_type << " |\n";
    out << "\n";
    const int best = b.history.best_epoch;
    out << "Training ran " << b.history.epochs.size() << " epochs; checkpoint from epoch "
        << best;
    if (best >= 1 && best <= static_cast<int>(b.history.epochs.size()))
        out << " (validation metric "
            << csv::format_double(b.history.epochs[static_cast<std::size_t>(best - 1)].val_metric)
            << ")";
    out << ".\n";
}

}  // namespace

void emit_report(const ReportBundle& bundle, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::filesystem::path dir(out_dir);
    write_metrics_by_type(bundle, (dir / "metrics_by_type.csv").string());
    write_aggregate(bundle, (dir / "aggregate.csv").string());
    write_gen_vs_distance(bundle.generalization, (dir / "gen_vs_distance.csv").string());
    write_phase_hist(bundle, (dir / "phase_hist.csv").string());
    write_history(bundle.history, (dir / "history.csv").string());
    write_markdown(bundle, (dir / "report.md").string());
}

}  // namespace ffdg
