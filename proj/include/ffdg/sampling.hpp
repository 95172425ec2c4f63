#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ffdg/dataset.hpp"
#include "ffdg/fleet.hpp"

namespace ffdg {

struct SamplingBudget {
    int train_per_flight = 1000;
    int val_per_flight = 500;
};

enum class SamplerKind : std::uint8_t { random, uniform };

// Uniform draws with replacement, `budget` rows per flight group. The draw
// stream for a flight depends only on (seed, flight_id), so results are
// independent of flight enumeration order.
std::vector<std::int64_t> random_sample(const ObservationTable& table,
                                        std::span<const std::int64_t> pool, int budget,
                                        std::uint64_t seed);

// Quantile map + centering + top-2 covariance eigenvectors over the 7 state
// features of one aircraft type. The first nonzero loading of each axis is
// made positive; a rank-deficient covariance keeps the available axes and
// pads with a zero axis.
struct Projection2D {
    QuantileMap qmap;                           // over the 7 state features
    std::array<double, 7> center{};
    std::array<std::array<double, 7>, 2> axes{};
    std::array<double, 2> explained{};

    std::array<double, 2> project(const std::array<double, 7>& state) const;
};

Projection2D fit_projection(const ObservationTable& table, std::span<const std::int64_t> rows);

// Gaussian-kernel density with per-dimension Scott bandwidth
// h_d = sigma_d * n^(-1/6); zero-variance dimensions fall back to a 1e-6
// bandwidth floor. Densities are strictly positive.
std::vector<double> kde_density(std::span<const std::array<double, 2>> points,
                                std::span<const std::array<double, 2>> queries);

// Same estimate with multiplicity counts on the kernel centers: equivalent
// to expanding each point count[i] times, at a fraction of the cost.
std::vector<double> kde_density_weighted(std::span<const std::array<double, 2>> points,
                                         std::span<const double> counts,
                                         std::span<const std::array<double, 2>> queries);

// KDE density of every pool row under its own type's 2-D projection.
// Identical state vectors share one kernel center, which leaves the result
// exactly equal to the full evaluation.
std::vector<double> pool_densities(const ObservationTable& table,
                                   std::span<const std::int64_t> pool);

// Inverse-density weighted draw with replacement: per type,
// budget x (flights of that type) rows, weights 1 / max(density, 1e-12)
// normalized over the type's pool.
std::vector<std::int64_t> uniform_sample(const ObservationTable& table,
                                         std::span<const std::int64_t> pool, int budget,
                                         std::uint64_t seed);

}  // namespace ffdg
