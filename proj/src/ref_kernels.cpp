#include "ffdg/ref_kernels.hpp"

#include <algorithm>
#include <cmath>

#include "ffdg/errors.hpp"
#include "ffdg/fuel_oracle.hpp"

namespace ffdg::ref {

void dense_forward(const DenseLayer& layer, const Matrix& input, Matrix& output, bool relu) {
    output = Matrix(input.rows, layer.W.rows);
    for (std::size_t r = 0; r < input.rows; ++r) {
        for (std::size_t j = 0; j < layer.W.rows; ++j) {
            double z = layer.b[j];
            for (std::size_t k = 0; k < layer.W.cols; ++k) z += layer.W(j, k) * input(r, k);
            output(r, j) = relu ? std::max(z, 0.0) : z;
        }
    }
}

std::vector<double> predict(const ModelState& state, const Matrix& X,
                            std::span<const double> cap) {
    const auto d = static_cast<std::size_t>(state.config.input_dim);
    Matrix cur(X.rows, d);
    for (std::size_t r = 0; r < X.rows; ++r)
        for (std::size_t j = 0; j < d; ++j) {
            const double xh =
                (X(r, j) - state.bn_run_mean[j]) / std::sqrt(state.bn_run_var[j] + kBatchNormEps);
            cur(r, j) = state.bn_gamma[j] * xh + state.bn_beta[j];
        }

    Matrix next;
    for (std::size_t l = 0; l + 1 < state.layers.size(); ++l) {
        dense_forward(state.layers[l], cur, next, true);
        cur = next;
    }
    dense_forward(state.layers.back(), cur, next, false);

    std::vector<double> pred(X.rows);
    for (std::size_t r = 0; r < X.rows; ++r) {
        const double z = next(r, 0);
        switch (state.config.head) {
            case HeadVariant::C: pred[r] = std::min(std::max(z, 0.0), cap[r]); break;
            case HeadVariant::R: pred[r] = std::min(std::max(z, 0.0), 1.0) * cap[r]; break;
            case HeadVariant::S: pred[r] = cap[r] / (1.0 + std::exp(-z)); break;
        }
    }
    return pred;
}

std::vector<double> kde_density(std::span<const std::array<double, 2>> points,
                                std::span<const std::array<double, 2>> queries) {
    if (points.size() < 2) throw ValidationError("ref::kde_density: need at least 2 points");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& p : points) {
        mx += p[0];
        my += p[1];
    }
    mx /= n;
    my /= n;
    double vx = 0.0, vy = 0.0;
    for (const auto& p : points) {
        vx += (p[0] - mx) * (p[0] - mx);
        vy += (p[1] - my) * (p[1] - my);
    }
    const double hx = std::max(std::sqrt(vx / n) * std::pow(n, -1.0 / 6.0), 1e-6);
    const double hy = std::max(std::sqrt(vy / n) * std::pow(n, -1.0 / 6.0), 1e-6);
    const double norm = 1.0 / (2.0 * M_PI * hx * hy * n);

    std::vector<double> out(queries.size());
    for (std::size_t q = 0; q < queries.size(); ++q) {
        double s = 0.0;
        for (const auto& p : points) {
            const double dx = (p[0] - queries[q][0]) / hx;
            const double dy = (p[1] - queries[q][1]) / hy;
            s += std::exp(-0.5 * (dx * dx + dy * dy));
        }
        out[q] = std::max(s * norm, 1e-300);
    }
    return out;
}

std::vector<double> oracle_labels(const Trajectory& traj, const AircraftSpec& spec,
                                  std::span<const double> mass) {
    std::vector<double> out(traj.samples.size());
    for (std::size_t i = 0; i < traj.samples.size(); ++i)
        out[i] = oracle_fuel_flow(traj.samples[i], spec, mass[i]);
    return out;
}

}  // namespace ffdg::ref
