#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ffdg/dataset.hpp"
#include "ffdg/nn.hpp"
#include "ffdg/sampling.hpp"

namespace ffdg {

struct TrainConfig {
    int epochs = 1000;
    LossKind loss = LossKind::BetaMAPE;
    double beta = 20.0;
    double noise_p = 0.0;
    SamplerKind sampler = SamplerKind::random;
    SamplingBudget budgets;
    std::uint64_t seed = 42;
    int n_blocks = 7;
    int width = 250;
    int head_width = 4;
    HeadVariant head = HeadVariant::R;
    double l2_coeff = 1e-4;
    bool resample_each_epoch = false;
    bool track_generalization = false;
};

// flat key = value file; unknown keys are an error, missing keys keep their
// defaults
TrainConfig load_train_config(const std::string& path);
void write_train_config(const TrainConfig& config, const std::string& path);

// Design matrices for one observation pool: inputs are the 7 state features,
// the mass, then the 19 spec features (27 columns for the standard schema).
struct Pool {
    Matrix X;
    std::vector<double> y;
    std::vector<double> cap;
    std::vector<std::int32_t> type_of_row;  // table type index per pool row
};

// Columns of the assembled input that carry aircraft/engine features
// (targets of the noise augmentation).
std::vector<std::size_t> spec_feature_columns();

Pool assemble_pool(const ObservationTable& table, std::span<const std::int64_t> rows);

// Core loop on pre-assembled pools: per-epoch shuffle, batches of 4096,
// optional multiplicative feature noise, Adam updates, and a checkpoint on
// the validation beta-MAPE. The optional generalization pool is evaluated
// into the history only and never influences checkpoint selection. When a
// resampler is supplied it replaces the train pool at the start of each
// epoch (--resample-each-epoch).
using PoolResampler = std::function<Pool(int epoch)>;
ModelState train_core(const Pool& train, const Pool& val, const Pool* generalization,
                      const TrainConfig& config, const PoolResampler& resample = {});

// Full experiment path: leakage guards, sampler-built train/val pools from
// the primary fleet's train/val flights, then train_core. Generalization
// rows (secondary fleet test flights) are attached when tracking is on.
ModelState train_experiment(const ObservationTable& table, const DatasetSplit& split,
                            const TrainConfig& config);

// Validation MAPE/MAE/ME of a frozen model on a pool (MAE/ME in kg/h).
struct PoolMetrics {
    double mape = 0.0;
    double mae = 0.0;
    double me = 0.0;
};
PoolMetrics evaluate_pool(const ModelState& state, const Pool& pool);

}  // namespace ffdg
