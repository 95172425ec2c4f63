#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ffdg/linalg.hpp"

namespace ffdg {

enum class HeadVariant : std::uint8_t { C, R, S };
enum class LossKind : std::uint8_t { MSE, ME, MAE, MAPE, BetaMAPE };

HeadVariant head_variant_from_string(std::string_view s);
std::string to_string(HeadVariant v);
LossKind loss_kind_from_string(std::string_view s);
std::string to_string(LossKind k);

// N-K-M dense architecture: input batch norm, N ReLU blocks of width K, one
// ReLU layer of width M, then a scalar head bounded by 1.1 x total takeoff
// fuel flow. Head variants:
//   C: min(relu(z), cap)
//   R: min(relu(z), 1) * cap
//   S: sigmoid(z) * cap
struct ModelConfig {
    int n_blocks = 1;
    int width = 1;
    int head_width = 1;
    HeadVariant head = HeadVariant::R;
    double l2_coeff = 1e-4;
    int input_dim = 0;
};

// Training hyperparameters that are fixed for the whole artifact; recorded
// here so checkpoints stay self-describing.
inline constexpr double kAdamLr = 1e-3;
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;
inline constexpr double kBatchNormMomentum = 0.99;
inline constexpr double kBatchNormEps = 1e-5;
inline constexpr int kBatchSize = 4096;
inline constexpr double kFeatureNoiseSigma = 0.33;
inline constexpr double kFfCapFactor = 1.1;

struct DenseLayer {
    Matrix W;                // out x in
    std::vector<double> b;   // out
};

struct EpochStats {
    double train_loss = 0.0;  // optimized objective, L2 term included
    double val_mape = 0.0;
    double val_mae = 0.0;   // kg/h
    double val_me = 0.0;    // kg/h
    double val_metric = 0.0;  // checkpoint metric (beta-MAPE of the run config)
    double gen_mape = 0.0;    // NaN when generalization tracking is off
};

struct TrainHistory {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;  // 1-based; 0 before any epoch ran
};

struct Provenance {
    std::uint64_t seed = 0;
    int epochs_run = 0;
    double best_val_metric = 0.0;
    std::string loss;
    double beta = 0.0;
    double noise_p = 0.0;
    std::string sampler;
    std::string prng;
    std::string tool_version;
};

struct ModelState {
    ModelConfig config;
    std::vector<double> bn_gamma, bn_beta;         // trainable
    std::vector<double> bn_run_mean, bn_run_var;   // running statistics
    std::vector<DenseLayer> layers;                // n_blocks + 2 layers
    Provenance provenance;
    TrainHistory history;
};

// Uniform fan-in-scaled weights, unit batch-norm scale.
ModelState init_model(const ModelConfig& config, std::uint64_t seed);
std::size_t parameter_count(const ModelState& state);

struct Batch {
    Matrix X;                  // rows x input_dim
    std::vector<double> y;     // target fuel flow, kg/s (may be empty)
    std::vector<double> cap;   // per-row head bound, kg/s
};

enum class Mode : std::uint8_t { train, infer };

// Per-batch scratch: batch-norm caches and per-layer activations.
struct Workspace {
    std::vector<double> batch_mean, batch_var;
    Matrix xhat;    // normalized input before scale/shift
    Matrix xnorm;   // batch-norm output
    std::vector<Matrix> act;  // post-ReLU activations per layer
    std::vector<double> z_head;
    std::vector<double> pred;
};

// Train mode normalizes with batch statistics and folds them into the
// running estimates; infer mode uses the running statistics and leaves the
// state untouched. Throws NumericError naming the layer on non-finite
// activations.
void forward(ModelState& state, const Matrix& X, std::span<const double> cap, Mode mode,
             Workspace& ws);
// Pure inference on a frozen model.
std::vector<double> predict(const ModelState& state, const Matrix& X,
                            std::span<const double> cap);

// Data term only; the L2 penalty is added by `objective`.
double loss_value(std::span<const double> pred, std::span<const double> target, LossKind kind,
                  double beta);
double l2_penalty(const ModelState& state);

// Trainable-parameter mirror used for gradients and optimizer moments.
struct ParamSet {
    std::vector<double> bn_gamma, bn_beta;
    std::vector<Matrix> W;
    std::vector<std::vector<double>> b;

    static ParamSet zeros_like(const ModelState& state);
};

// Analytic gradients of loss_value + l2_penalty through head, dense stack
// and input batch norm; expects a train-mode forward in `ws`. Returns the
// objective value.
double backward(const ModelState& state, const Workspace& ws, const Batch& batch, LossKind kind,
                double beta, ParamSet& grads);

struct AdamState {
    ParamSet m, v;
    long long t = 0;
};
void adam_step(ModelState& state, const ParamSet& grads, AdamState& opt, double lr = kAdamLr);

// Multiplies each designated column by (1 + p * N(0, 0.33^2)), fresh draws
// per call, in raw feature space.
void apply_feature_noise(Matrix& X, std::span<const std::size_t> columns, double p,
                         std::uint64_t seed);

// Versioned binary container with config, parameters, running statistics,
// provenance and history. Byte-exact round trip.
void save_checkpoint(const ModelState& state, const std::string& path);
ModelState load_checkpoint(const std::string& path);

}  // namespace ffdg
