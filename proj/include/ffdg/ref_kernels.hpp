#pragma once

#include <array>
#include <span>
#include <vector>

#include "ffdg/fleet.hpp"
#include "ffdg/linalg.hpp"
#include "ffdg/nn.hpp"
#include "ffdg/trajectory.hpp"

// Plain single-threaded, straight-line implementations of the hot kernels.
// They stay deliberately naive (no unrolling, no skip shortcuts) and are used
// by the tests to pin down the optimized OpenMP paths and by the benchmark
// target as the baseline.
namespace ffdg::ref {

// output = relu(input W^T + b), one plain triple loop
void dense_forward(const DenseLayer& layer, const Matrix& input, Matrix& output, bool relu);

// full network inference with running batch-norm statistics
std::vector<double> predict(const ModelState& state, const Matrix& X,
                            std::span<const double> cap);

// Gaussian KDE with per-dimension Scott bandwidth, naive double loop
std::vector<double> kde_density(std::span<const std::array<double, 2>> points,
                                std::span<const std::array<double, 2>> queries);

// per-sample oracle labels for one flight at a fixed instantaneous mass list
std::vector<double> oracle_labels(const Trajectory& traj, const AircraftSpec& spec,
                                  std::span<const double> mass);

}  // namespace ffdg::ref
