// ffdg: synthesize fleets, generate labeled flight data, train the
// fuel-flow regressor and evaluate its generalization to unseen types.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>

#include "ffdg/csv.hpp"
#include "ffdg/dataset.hpp"
#include "ffdg/errors.hpp"
#include "ffdg/eval.hpp"
#include "ffdg/fleet.hpp"
#include "ffdg/manifest.hpp"
#include "ffdg/parallel.hpp"
#include "ffdg/rng.hpp"
#include "ffdg/sampling.hpp"
#include "ffdg/train.hpp"
#include "ffdg/trajectory.hpp"
#include "ffdg/version.hpp"

namespace fs = std::filesystem;
using namespace ffdg;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

void warn_if_hash_mismatch(const std::string& file) {
    const std::string recorded = manifest_recorded_hash(file);
    if (recorded.empty()) return;
    const std::string actual = file_hash_hex(file);
    if (actual != recorded)
        std::cerr << "warning: " << file << " hash " << actual
                  << " does not match its manifest (" << recorded << ")\n";
}

// ---------------------------------------------------------------------------
// synth-fleet

struct SynthFleetArgs {
    int types = 16;
    int gen_types = 8;
    std::uint64_t seed = 42;
    double missing_frac = 0.0;
    std::string pass_through;  // validate + retag an existing fleet file
    std::string out;
};

int cmd_synth_fleet(const SynthFleetArgs& args) {
    Timer timer;
    Fleet fleet;
    RunManifest manifest;
    manifest.command = "synth-fleet";
    if (!args.pass_through.empty()) {
        fleet = read_fleet_csv(args.pass_through);
        manifest.inputs.emplace_back(args.pass_through, file_hash_hex(args.pass_through));
    } else {
        SynthFleetOptions opt;
        opt.n_train = args.types;
        opt.n_gen = args.gen_types;
        opt.seed = args.seed;
        opt.missing_frac = args.missing_frac;
        fleet = synthesize_fleet(opt);
    }
    write_fleet_csv(fleet, args.out);

    manifest.config = {{"types", std::to_string(args.types)},
                       {"gen_types", std::to_string(args.gen_types)},
                       {"seed", std::to_string(args.seed)},
                       {"missing_frac", csv::format_double(args.missing_frac)}};
    manifest.outputs.emplace_back(args.out, file_hash_hex(args.out));
    manifest.tool_version = std::string(kToolVersion);
    manifest.prng = std::string(kPrngAlgorithm);
    manifest.wall_clock_s = timer.seconds();
    write_manifest(manifest, args.out + ".manifest.json");
    std::cout << "wrote " << fleet.size() << " aircraft types to " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// gen-data

struct GenDataArgs {
    std::string fleet_path;
    int flights_per_type = 50;
    std::uint64_t seed = 42;
    std::string trajectories_in;  // import instead of synthesizing
    bool fixed_takeoff_mass = false;
    std::string out;
};

int cmd_gen_data(const GenDataArgs& args) {
    Timer timer;
    warn_if_hash_mismatch(args.fleet_path);
    Fleet fleet = read_fleet_csv(args.fleet_path);
    bool imputed = false;
    for (const AircraftSpec& s : fleet.specs)
        if (has_missing(s)) {
            imputed = true;
            break;
        }
    if (imputed) fleet = impute_missing(fleet);
    validate_fleet(fleet);

    fs::create_directories(args.out);
    const fs::path out_dir(args.out);

    std::vector<Trajectory> trajectories;
    if (!args.trajectories_in.empty()) {
        trajectories = read_trajectories_csv(args.trajectories_in);
        for (const Trajectory& t : trajectories)
            if (fleet.find(t.type_code) < 0)
                throw ValidationError("imported trajectory " + t.flight_id +
                                      " references unknown type " + t.type_code);
    } else {
        if (args.flights_per_type < 10)
            throw ValidationError("gen-data: need at least 10 flights per type for the split");
        trajectories.resize(fleet.size() * static_cast<std::size_t>(args.flights_per_type));
        // embarrassingly parallel per flight; slots are owned by flight index
        par::parallel_for(trajectories.size(), [&](std::size_t slot) {
            const std::size_t type = slot / static_cast<std::size_t>(args.flights_per_type);
            const std::size_t index = slot % static_cast<std::size_t>(args.flights_per_type);
            const AircraftSpec& spec = fleet.specs[type];
            Trajectory traj = generate_trajectory(
                spec, derive_seed(args.seed, spec.type_code, index));
            traj.flight_id = spec.type_code + "-f" + std::to_string(index);
            trajectories[slot] = std::move(traj);
        });
    }

    write_trajectories_csv(trajectories, (out_dir / "trajectories.csv").string());

    // mass-grid labeling, parallel per flight with ordered collection
    std::vector<ObservationTable> partial(trajectories.size());
    std::vector<std::string> warnings(trajectories.size());
    par::parallel_for(trajectories.size(), [&](std::size_t i) {
        const long long idx = fleet.find(trajectories[i].type_code);
        MassGridOptions opt;
        opt.fixed_takeoff_mass = args.fixed_takeoff_mass;
        expand_mass_grid(trajectories[i], fleet.specs[static_cast<std::size_t>(idx)], partial[i],
                         opt, [&](const std::string& msg) {
                             warnings[i] += "warning: " + trajectories[i].flight_id + ": " + msg +
                                            "\n";
                         });
    });
    for (const std::string& w : warnings)
        if (!w.empty()) std::cerr << w;

    ObservationTable table;
    std::size_t total_rows = 0;
    for (const ObservationTable& p : partial) total_rows += p.n_rows();
    table.reserve(total_rows);
    for (std::size_t i = 0; i < partial.size(); ++i) {
        const ObservationTable& p = partial[i];
        for (std::size_t r = 0; r < p.n_rows(); ++r) {
            const std::int32_t type =
                table.intern_type(p.type_code(p.row_type(r)), p.type_features(p.row_type(r)));
            const std::int32_t flight = table.intern_flight(p.flight_id(p.row_flight(r)), type);
            StateSample s;
            s.altitude = p.state(r, 0);
            s.vertical_rate = p.state(r, 1);
            s.ground_speed = p.state(r, 2);
            s.tas = p.state(r, 3);
            s.ground_accel = p.state(r, 4);
            s.air_accel = p.state(r, 5);
            s.temperature = p.state(r, 6);
            table.append_row(type, flight, p.row_mass_variant(r), s, p.mass(r), p.target(r));
        }
    }

    // per-type stratified 80/10/10 split on flight basis
    std::vector<FlightTag> tags;
    for (const Trajectory& t : trajectories) {
        FlightTag tag;
        tag.flight_id = t.flight_id;
        tag.type_code = t.type_code;
        const long long idx = fleet.find(t.type_code);
        tag.fleet = fleet.membership[static_cast<std::size_t>(idx)];
        tags.push_back(std::move(tag));
    }
    const DatasetSplit split = split_flights(tags, derive_seed(args.seed, "flight-split"));

    write_dataset(table, (out_dir / "dataset.csv").string());
    write_split_csv(split, (out_dir / "splits.csv").string());

    DatasetMeta meta;
    meta.seed = args.seed;
    meta.prng = std::string(kPrngAlgorithm);
    meta.fleet_hash = file_hash_hex(args.fleet_path);
    meta.tool_version = std::string(kToolVersion);
    write_dataset_meta(meta, (out_dir / "dataset.meta").string());

    RunManifest manifest;
    manifest.command = "gen-data";
    manifest.config = {{"fleet", args.fleet_path},
                       {"flights_per_type", std::to_string(args.flights_per_type)},
                       {"seed", std::to_string(args.seed)},
                       {"fixed_takeoff_mass", args.fixed_takeoff_mass ? "true" : "false"}};
    manifest.inputs.emplace_back(args.fleet_path, meta.fleet_hash);
    for (const char* name : {"trajectories.csv", "dataset.csv", "splits.csv", "dataset.meta"}) {
        const std::string p = (out_dir / name).string();
        manifest.outputs.emplace_back(p, file_hash_hex(p));
    }
    manifest.tool_version = std::string(kToolVersion);
    manifest.prng = std::string(kPrngAlgorithm);
    manifest.wall_clock_s = timer.seconds();
    write_manifest(manifest, (out_dir / "manifest.json").string());

    std::cout << "wrote " << table.n_rows() << " observation rows (" << trajectories.size()
              << " flights, " << fleet.size() << " types) to " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string data_dir;
    std::string config_path;
    std::string out;  // checkpoint file; history.csv + manifest.json go next to it
    TrainConfig config;
    // flags that must override the config file only when actually passed
    CLI::Option* opt_sampler = nullptr;
};

int cmd_train(TrainArgs& args, const TrainConfig& flag_values,
              const std::vector<std::string>& passed_flags) {
    Timer timer;
    TrainConfig config;
    if (!args.config_path.empty()) config = load_train_config(args.config_path);

    // CLI flags override file values
    const auto passed = [&](const std::string& name) {
        return std::find(passed_flags.begin(), passed_flags.end(), name) != passed_flags.end();
    };
    if (passed("--epochs")) config.epochs = flag_values.epochs;
    if (passed("--loss")) config.loss = flag_values.loss;
    if (passed("--beta")) config.beta = flag_values.beta;
    if (passed("--noise")) config.noise_p = flag_values.noise_p;
    if (passed("--sampler")) config.sampler = flag_values.sampler;
    if (passed("--train-per-flight"))
        config.budgets.train_per_flight = flag_values.budgets.train_per_flight;
    if (passed("--val-per-flight"))
        config.budgets.val_per_flight = flag_values.budgets.val_per_flight;
    if (passed("--seed")) config.seed = flag_values.seed;
    if (passed("--blocks")) config.n_blocks = flag_values.n_blocks;
    if (passed("--width")) config.width = flag_values.width;
    if (passed("--head-width")) config.head_width = flag_values.head_width;
    if (passed("--head")) config.head = flag_values.head;
    if (passed("--l2")) config.l2_coeff = flag_values.l2_coeff;
    if (passed("--resample-each-epoch")) config.resample_each_epoch = true;
    if (passed("--track-gen")) config.track_generalization = true;

    const fs::path data(args.data_dir);
    const std::string dataset_path = (data / "dataset.csv").string();
    const std::string split_path = (data / "splits.csv").string();
    warn_if_hash_mismatch(dataset_path);
    warn_if_hash_mismatch(split_path);

    const ObservationTable table = read_dataset(dataset_path);
    const DatasetSplit split = read_split_csv(split_path);

    ModelState model = train_experiment(table, split, config);
    model.provenance.tool_version = std::string(kToolVersion);

    const fs::path out_path(args.out);
    if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
    save_checkpoint(model, args.out);

    const fs::path out_dir = out_path.has_parent_path() ? out_path.parent_path() : fs::path(".");
    {
        // history.csv next to the checkpoint
        csv::Writer w((out_dir / "history.csv").string());
        w.header({"epoch", "train_loss", "val_mape", "val_mae", "val_me", "val_metric",
                  "gen_mape"});
        for (std::size_t i = 0; i < model.history.epochs.size(); ++i) {
            const EpochStats& e = model.history.epochs[i];
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

    RunManifest manifest;
    manifest.command = "train";
    manifest.config = {
        {"data", args.data_dir},
        {"epochs", std::to_string(config.epochs)},
        {"loss", to_string(config.loss)},
        {"beta", csv::format_double(config.beta)},
        {"noise", csv::format_double(config.noise_p)},
        {"sampler", config.sampler == SamplerKind::random ? "random" : "uniform"},
        {"train_per_flight", std::to_string(config.budgets.train_per_flight)},
        {"val_per_flight", std::to_string(config.budgets.val_per_flight)},
        {"seed", std::to_string(config.seed)},
        {"arch", std::to_string(config.n_blocks) + "-" + std::to_string(config.width) + "-" +
                     std::to_string(config.head_width)},
        {"head", to_string(config.head)},
        {"l2_coeff", csv::format_double(config.l2_coeff)},
    };
    manifest.inputs.emplace_back(dataset_path, file_hash_hex(dataset_path));
    manifest.inputs.emplace_back(split_path, file_hash_hex(split_path));
    manifest.outputs.emplace_back(args.out, file_hash_hex(args.out));
    manifest.outputs.emplace_back((out_dir / "history.csv").string(),
                                  file_hash_hex((out_dir / "history.csv").string()));
    manifest.tool_version = std::string(kToolVersion);
    manifest.prng = std::string(kPrngAlgorithm);
    manifest.wall_clock_s = timer.seconds();
    write_manifest(manifest, (out_dir / "manifest.json").string());

    const EpochStats& best =
        model.history.epochs[static_cast<std::size_t>(model.history.best_epoch - 1)];
    std::cout << "trained " << config.epochs << " epochs; checkpoint from epoch "
              << model.history.best_epoch << " (val MAPE " << csv::format_double(best.val_mape)
              << "%) -> " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string ckpt;
    std::string data_dir;
    std::string fleet_path;
    std::string out;
    std::string subset = "test";
    bool allow_train_eval = false;
};

int cmd_eval(const EvalArgs& args) {
    Timer timer;
    if (args.subset != "test" && args.subset != "val" && args.subset != "train")
        throw ValidationError("eval: --subset must be test, val or train");
    if (args.subset == "train" && !args.allow_train_eval)
        throw ValidationError(
            "eval: refusing to evaluate on training rows without --allow-train-eval");

    warn_if_hash_mismatch(args.ckpt);
    const ModelState model = load_checkpoint(args.ckpt);

    const fs::path data(args.data_dir);
    const std::string dataset_path = (data / "dataset.csv").string();
    const std::string split_path = (data / "splits.csv").string();
    warn_if_hash_mismatch(dataset_path);
    const ObservationTable table = read_dataset(dataset_path);
    const DatasetSplit split = read_split_csv(split_path);

    warn_if_hash_mismatch(args.fleet_path);
    Fleet fleet = read_fleet_csv(args.fleet_path);
    for (const AircraftSpec& s : fleet.specs)
        if (has_missing(s)) {
            fleet = impute_missing(fleet);
            break;
        }
    const QuantileMap qmap = fit_fleet_quantile_map(fleet);

    Subset wanted = Subset::test;
    if (args.subset == "val") wanted = Subset::val;
    if (args.subset == "train") wanted = Subset::train;

    std::unordered_set<std::string> seen_ids, gen_ids;
    for (const FlightTag& tag : split.flights) {
        if (tag.subset != wanted) continue;
        (tag.fleet == Membership::training ? seen_ids : gen_ids).insert(tag.flight_id);
    }

    std::vector<std::int64_t> seen_rows, gen_rows;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const std::string& fid = table.flight_id(table.row_flight(r));
        if (seen_ids.count(fid)) seen_rows.push_back(static_cast<std::int64_t>(r));
        else if (gen_ids.count(fid)) gen_rows.push_back(static_cast<std::int64_t>(r));
    }

    ReportBundle bundle;
    bundle.seen = evaluate_per_type(model, table, seen_rows);
    bundle.generalization = generalization_report(model, table, gen_rows, fleet, qmap);
    bundle.phases_seen = phase_histogram(table, seen_rows);
    bundle.phases_gen = phase_histogram(table, gen_rows);
    bundle.history = model.history;
    emit_report(bundle, args.out);

    RunManifest manifest;
    manifest.command = "eval";
    manifest.config = {{"ckpt", args.ckpt},
                       {"data", args.data_dir},
                       {"fleet", args.fleet_path},
                       {"subset", args.subset}};
    manifest.inputs.emplace_back(args.ckpt, file_hash_hex(args.ckpt));
    manifest.inputs.emplace_back(dataset_path, file_hash_hex(dataset_path));
    manifest.inputs.emplace_back(args.fleet_path, file_hash_hex(args.fleet_path));
    for (const char* name : {"metrics_by_type.csv", "aggregate.csv", "gen_vs_distance.csv",
                             "phase_hist.csv", "history.csv", "report.md"}) {
        const std::string p = (fs::path(args.out) / name).string();
        manifest.outputs.emplace_back(p, file_hash_hex(p));
    }
    manifest.tool_version = std::string(kToolVersion);
    manifest.prng = std::string(kPrngAlgorithm);
    manifest.wall_clock_s = timer.seconds();
    write_manifest(manifest, (fs::path(args.out) / "manifest.json").string());

    std::cout << "seen-type MAPE " << csv::format_double(bundle.seen.aggregate.mape_mean)
              << "%, generalization MAPE "
              << csv::format_double(bundle.generalization.aggregate.mape_mean) << "% -> "
              << args.out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"aircraft fuel-flow regression workbench"};
    app.require_subcommand(1);

    SynthFleetArgs sf;
    CLI::App* synth = app.add_subcommand("synth-fleet", "write a synthetic aircraft fleet CSV");
    synth->add_option("--types", sf.types, "training types")->check(CLI::PositiveNumber);
    synth->add_option("--gen-types", sf.gen_types, "generalization types")
        ->check(CLI::NonNegativeNumber);
    synth->add_option("--seed", sf.seed, "global seed");
    synth->add_option("--missing-frac", sf.missing_frac, "fraction of cells blanked");
    synth->add_option("--fleet-in", sf.pass_through, "validate and copy an existing fleet CSV");
    synth->add_option("--out", sf.out, "output fleet CSV")->required();

    GenDataArgs gd;
    CLI::App* gen = app.add_subcommand("gen-data", "synthesize trajectories and labeled rows");
    gen->add_option("--fleet", gd.fleet_path, "fleet CSV")->required();
    gen->add_option("--flights-per-type", gd.flights_per_type, "flights per aircraft type");
    gen->add_option("--seed", gd.seed, "global seed");
    gen->add_option("--trajectories", gd.trajectories_in,
                    "import externally prepared trajectories instead of synthesizing");
    gen->add_flag("--fixed-takeoff-mass", gd.fixed_takeoff_mass,
                  "use the constant takeoff mass as the mass feature");
    gen->add_option("--out", gd.out, "output directory")->required();

    TrainArgs tr;
    TrainConfig flag_values;
    std::string loss_name = "betaMAPE", head_name = "R", sampler_name = "random";
    CLI::App* train = app.add_subcommand("train", "train the fuel-flow regressor");
    train->add_option("--data", tr.data_dir, "dataset directory from gen-data")->required();
    train->add_option("--config", tr.config_path, "key = value config file");
    train->add_option("--epochs", flag_values.epochs)->check(CLI::PositiveNumber);
    train->add_option("--loss", loss_name)
        ->check(CLI::IsMember({"MSE", "ME", "MAE", "MAPE", "betaMAPE"}));
    train->add_option("--beta", flag_values.beta)->check(CLI::NonNegativeNumber);
    train->add_option("--noise", flag_values.noise_p)->check(CLI::NonNegativeNumber);
    train->add_option("--sampler", sampler_name)->check(CLI::IsMember({"random", "uniform"}));
    train->add_option("--train-per-flight", flag_values.budgets.train_per_flight)
        ->check(CLI::PositiveNumber);
    train->add_option("--val-per-flight", flag_values.budgets.val_per_flight)
        ->check(CLI::PositiveNumber);
    train->add_option("--seed", flag_values.seed);
    train->add_option("--blocks", flag_values.n_blocks)->check(CLI::PositiveNumber);
    train->add_option("--width", flag_values.width)->check(CLI::PositiveNumber);
    train->add_option("--head-width", flag_values.head_width)->check(CLI::PositiveNumber);
    train->add_option("--head", head_name)->check(CLI::IsMember({"C", "R", "S"}));
    train->add_option("--l2", flag_values.l2_coeff)->check(CLI::NonNegativeNumber);
    train->add_flag("--resample-each-epoch", "redraw the training pool every epoch");
    train->add_flag("--track-gen", "record generalization MAPE per epoch");
    train->add_option("--out", tr.out, "checkpoint path")->required();

    EvalArgs ev;
    CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint and emit reports");
    eval_cmd->add_option("--ckpt", ev.ckpt, "checkpoint file")->required();
    eval_cmd->add_option("--data", ev.data_dir, "dataset directory")->required();
    eval_cmd->add_option("--fleet", ev.fleet_path, "fleet CSV")->required();
    eval_cmd->add_option("--subset", ev.subset, "test, val or train");
    eval_cmd->add_flag("--allow-train-eval", ev.allow_train_eval,
                       "permit evaluation on training rows");
    eval_cmd->add_option("--out", ev.out, "report directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth_fleet(sf);
        if (gen->parsed()) return cmd_gen_data(gd);
        if (train->parsed()) {
            flag_values.loss = loss_kind_from_string(loss_name);
            flag_values.head = head_variant_from_string(head_name);
            flag_values.sampler =
                sampler_name == "uniform" ? SamplerKind::uniform : SamplerKind::random;
            std::vector<std::string> passed;
            for (const CLI::Option* opt : train->get_options())
                if (opt->count() > 0) passed.push_back(opt->get_name());
            return cmd_train(tr, flag_values, passed);
        }
        if (eval_cmd->parsed()) return cmd_eval(ev);
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return 0;
}
