#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ffdg/dataset.hpp"
#include "ffdg/fleet.hpp"
#include "ffdg/nn.hpp"

namespace ffdg {

struct TypeMetrics {
    std::string type_code;
    double mape = 0.0;  // %
    double mae = 0.0;   // kg/h
    double me = 0.0;    // kg/h, predicted - actual
    std::int64_t n_rows = 0;
};

struct MetricAggregate {
    double mape_mean = 0.0, mape_std = 0.0;
    double mae_mean = 0.0, mae_std = 0.0;
    double me_mean = 0.0, me_std = 0.0;
    int n_types = 0;
};

struct PerTypeReport {
    std::vector<TypeMetrics> types;  // sorted by type_code
    MetricAggregate aggregate;       // unweighted mean, population std
};

// Per-type MAPE/MAE/ME of a frozen model on the given rows.
PerTypeReport evaluate_per_type(const ModelState& model, const ObservationTable& table,
                                std::span<const std::int64_t> rows);
// Same, from precomputed predictions aligned with `rows` (kg/s).
PerTypeReport evaluate_per_type(std::span<const double> predictions,
                                const ObservationTable& table,
                                std::span<const std::int64_t> rows);

struct GenEntry {
    TypeMetrics metrics;
    double d_min = 0.0;
    std::string closest_type;
};

struct GenReport {
    std::vector<GenEntry> entries;  // one per generalization type, sorted
    MetricAggregate aggregate;
    double spearman_rho = 0.0;  // rank correlation of d_min vs MAPE
};

// Joins per-type metrics with the distance to the closest training member.
// Every evaluated type must be tagged generalization in the fleet.
GenReport generalization_report(const ModelState& model, const ObservationTable& table,
                                std::span<const std::int64_t> gen_rows, const Fleet& fleet,
                                const QuantileMap& qmap);
GenReport generalization_report(std::span<const double> predictions,
                                const ObservationTable& table,
                                std::span<const std::int64_t> gen_rows, const Fleet& fleet,
                                const QuantileMap& qmap);

// Spearman rank correlation with average ranks on ties; 0 on degenerate
// inputs.
double spearman_rho(std::span<const double> a, std::span<const double> b);

enum class Phase : std::uint8_t { climb, level, descent };

struct PhaseHistogram {
    std::int64_t climb = 0, level = 0, descent = 0;
    double climb_frac = 0.0, level_frac = 0.0, descent_frac = 0.0;
};

// climb above +threshold ft/min, descent below -threshold, level between
PhaseHistogram phase_histogram(const ObservationTable& table,
                               std::span<const std::int64_t> rows, double threshold = 200.0);
Phase classify_phase(double vertical_rate, double threshold = 200.0);

// Report bundle: metrics_by_type.csv, aggregate.csv, gen_vs_distance.csv,
// phase_hist.csv, history.csv, report.md. Deterministic bytes for identical
// inputs.
struct ReportBundle {
    PerTypeReport seen;                 // primary-fleet test rows
    GenReport generalization;           // secondary-fleet test rows
    PhaseHistogram phases_seen;
    PhaseHistogram phases_gen;
    TrainHistory history;
};
void emit_report(const ReportBundle& bundle, const std::string& out_dir);

}  // namespace ffdg
