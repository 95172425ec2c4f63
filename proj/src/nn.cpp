#include "ffdg/nn.hpp"

#include <algorithm>
#include <cmath>

#include "ffdg/errors.hpp"
#include "ffdg/parallel.hpp"
#include "ffdg/rng.hpp"

namespace ffdg {

HeadVariant head_variant_from_string(std::string_view s) {
    if (s == "C") return HeadVariant::C;
    if (s == "R") return HeadVariant::R;
    if (s == "S") return HeadVariant::S;
    throw ValidationError("head variant must be C, R or S, got '" + std::string(s) + "'");
}

std::string to_string(HeadVariant v) {
    switch (v) {
        case HeadVariant::C: return "C";
        case HeadVariant::R: return "R";
        default: return "S";
    }
}

LossKind loss_kind_from_string(std::string_view s) {
    if (s == "MSE") return LossKind::MSE;
    if (s == "ME") return LossKind::ME;
    if (s == "MAE") return LossKind::MAE;
    if (s == "MAPE") return LossKind::MAPE;
    if (s == "betaMAPE") return LossKind::BetaMAPE;
    throw ValidationError("loss must be MSE, ME, MAE, MAPE or betaMAPE, got '" + std::string(s) +
                          "'");
}

std::string to_string(LossKind k) {
    switch (k) {
        case LossKind::MSE: return "MSE";
        case LossKind::ME: return "ME";
        case LossKind::MAE: return "MAE";
        case LossKind::MAPE: return "MAPE";
        default: return "betaMAPE";
    }
}

namespace {

std::vector<std::pair<int, int>> layer_shapes(const ModelConfig& c) {
    std::vector<std::pair<int, int>> shapes;  // (out, in)
    shapes.emplace_back(c.width, c.input_dim);
    for (int l = 1; l < c.n_blocks; ++l) shapes.emplace_back(c.width, c.width);
    shapes.emplace_back(c.head_width, c.width);
    shapes.emplace_back(1, c.head_width);
    return shapes;
}

}  // namespace

ModelState init_model(const ModelConfig& config, std::uint64_t seed) {
    if (config.n_blocks < 1 || config.width < 1 || config.head_width < 1 ||
        config.input_dim < 1 || config.l2_coeff < 0.0)
        throw ValidationError("init_model: invalid configuration");
    ModelState state;
    state.config = config;
    const auto d = static_cast<std::size_t>(config.input_dim);
    state.bn_gamma.assign(d, 1.0);
    state.bn_beta.assign(d, 0.0);
    state.bn_run_mean.assign(d, 0.0);
    state.bn_run_var.assign(d, 1.0);

    Xoshiro256pp rng(derive_seed(seed, "init-model"));
    for (const auto& [out, in] : layer_shapes(config)) {
        DenseLayer layer;
        layer.W = Matrix(static_cast<std::size_t>(out), static_cast<std::size_t>(in));
        const double bound = 1.0 / std::sqrt(static_cast<double>(in));
        for (double& w : layer.W.data) w = rng.uniform(-bound, bound);
        layer.b.assign(static_cast<std::size_t>(out), 0.0);
        state.layers.push_back(std::move(layer));
    }
    state.provenance.prng = std::string(kPrngAlgorithm);
    return state;
}

std::size_t parameter_count(const ModelState& state) {
    std::size_t n = state.bn_gamma.size() + state.bn_beta.size();
    for (const DenseLayer& l : state.layers) n += l.W.data.size() + l.b.size();
    return n;
}

namespace {

void check_finite(const Matrix& m, std::size_t layer_index) {
    for (const double v : m.data)
        if (!std::isfinite(v))
            throw NumericError("forward: non-finite activation in layer " +
                               std::to_string(layer_index));
}

// z = relu(W x + b) for every row; relu skipped on the final (head) layer
void dense_forward(const DenseLayer& layer, const Matrix& input, Matrix& output, bool relu) {
    const std::size_t out_dim = layer.W.rows, in_dim = layer.W.cols;
    output.rows = input.rows;
    output.cols = out_dim;
    output.data.resize(output.rows * out_dim);
    par::parallel_for(input.rows, [&](std::size_t r) {
        const double* x = input.row(r);
        double* y = output.row(r);
        for (std::size_t j = 0; j < out_dim; ++j) {
            const double z = dot_unrolled(layer.W.row(j), x, in_dim) + layer.b[j];
            y[j] = relu ? std::max(z, 0.0) : z;
        }
    });
}

}  // namespace

void forward(ModelState& state, const Matrix& X, std::span<const double> cap, Mode mode,
             Workspace& ws) {
    const ModelConfig& c = state.config;
    const std::size_t n = X.rows;
    const auto d = static_cast<std::size_t>(c.input_dim);
    if (X.cols != d) throw ValidationError("forward: input width mismatch");
    if (cap.size() != n) throw ValidationError("forward: cap size mismatch");

    // input batch normalization
    ws.xhat.rows = n;
    ws.xhat.cols = d;
    ws.xhat.data.resize(n * d);
    ws.xnorm.rows = n;
    ws.xnorm.cols = d;
    ws.xnorm.data.resize(n * d);
    if (mode == Mode::train) {
        ws.batch_mean.assign(d, 0.0);
        ws.batch_var.assign(d, 0.0);
        par::parallel_for(d, [&](std::size_t j) {
            double mean = 0.0;
            for (std::size_t r = 0; r < n; ++r) mean += X(r, j);
            mean /= static_cast<double>(n);
            double var = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double dv = X(r, j) - mean;
                var += dv * dv;
            }
            var /= static_cast<double>(n);
            ws.batch_mean[j] = mean;
            ws.batch_var[j] = var;
            const double inv = 1.0 / std::sqrt(var + kBatchNormEps);
            const double g = state.bn_gamma[j], b = state.bn_beta[j];
            for (std::size_t r = 0; r < n; ++r) {
                const double xh = (X(r, j) - mean) * inv;
                ws.xhat(r, j) = xh;
                ws.xnorm(r, j) = g * xh + b;
            }
        });
        for (std::size_t j = 0; j < d; ++j) {
            state.bn_run_mean[j] = kBatchNormMomentum * state.bn_run_mean[j] +
                                   (1.0 - kBatchNormMomentum) * ws.batch_mean[j];
            state.bn_run_var[j] = kBatchNormMomentum * state.bn_run_var[j] +
                                  (1.0 - kBatchNormMomentum) * ws.batch_var[j];
        }
    } else {
        par::parallel_for(d, [&](std::size_t j) {
            const double inv = 1.0 / std::sqrt(state.bn_run_var[j] + kBatchNormEps);
            const double mean = state.bn_run_mean[j];
            const double g = state.bn_gamma[j], b = state.bn_beta[j];
            for (std::size_t r = 0; r < n; ++r) {
                const double xh = (X(r, j) - mean) * inv;
                ws.xhat(r, j) = xh;
                ws.xnorm(r, j) = g * xh + b;
            }
        });
    }
    check_finite(ws.xnorm, 0);

    const std::size_t n_layers = state.layers.size();
    ws.act.resize(n_layers - 1);
    const Matrix* cur = &ws.xnorm;
    for (std::size_t l = 0; l + 1 < n_layers; ++l) {
        dense_forward(state.layers[l], *cur, ws.act[l], /*relu=*/true);
        check_finite(ws.act[l], l + 1);
        cur = &ws.act[l];
    }

    // scalar head pre-activation
    const DenseLayer& head = state.layers.back();
    ws.z_head.resize(n);
    ws.pred.resize(n);
    par::parallel_for(n, [&](std::size_t r) {
        const double z = dot_unrolled(head.W.row(0), cur->row(r), head.W.cols) + head.b[0];
        ws.z_head[r] = z;
        double p = 0.0;
        switch (c.head) {
            case HeadVariant::C: p = std::min(std::max(z, 0.0), cap[r]); break;
            case HeadVariant::R: p = std::min(std::max(z, 0.0), 1.0) * cap[r]; break;
            case HeadVariant::S: p = cap[r] / (1.0 + std::exp(-z)); break;
        }
        ws.pred[r] = p;
    });
    for (const double v : ws.pred)
        if (!std::isfinite(v))
            throw NumericError("forward: non-finite activation in layer " +
                               std::to_string(n_layers));
}

std::vector<double> predict(const ModelState& state, const Matrix& X,
                            std::span<const double> cap) {
    Workspace ws;
    // infer mode leaves the state untouched
    forward(const_cast<ModelState&>(state), X, cap, Mode::infer, ws);
    return std::move(ws.pred);
}

double loss_value(std::span<const double> pred, std::span<const double> target, LossKind kind,
                  double beta) {
    if (pred.size() != target.size() || pred.empty())
        throw ValidationError("loss: prediction/target size mismatch");
    const double n = static_cast<double>(pred.size());
    if (kind == LossKind::MAPE || kind == LossKind::BetaMAPE)
        for (const double y : target)
            if (y == 0.0) throw ValidationError("loss: zero target with a MAPE-family loss");

    double mse = 0.0, me = 0.0, mae = 0.0, mape = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - target[i];
        mse += e * e;
        me += e;
        mae += std::fabs(e);
        if (kind == LossKind::MAPE || kind == LossKind::BetaMAPE)
            mape += std::fabs(e / target[i]);
    }
    switch (kind) {
        case LossKind::MSE: return mse / n;
        case LossKind::ME: return me / n;
        case LossKind::MAE: return mae / n;
        case LossKind::MAPE: return 100.0 * mape / n;
        default: return mae / n + beta * 100.0 * mape / n;
    }
}

double l2_penalty(const ModelState& state) {
    double s = 0.0;
    for (const DenseLayer& l : state.layers)
        for (const double w : l.W.data) s += w * w;
    return state.config.l2_coeff * s;
}

ParamSet ParamSet::zeros_like(const ModelState& state) {
    ParamSet p;
    p.bn_gamma.assign(state.bn_gamma.size(), 0.0);
    p.bn_beta.assign(state.bn_beta.size(), 0.0);
    for (const DenseLayer& l : state.layers) {
        p.W.emplace_back(l.W.rows, l.W.cols);
        p.b.emplace_back(l.b.size(), 0.0);
    }
    return p;
}

double backward(const ModelState& state, const Workspace& ws, const Batch& batch, LossKind kind,
                double beta, ParamSet& grads) {
    const ModelConfig& c = state.config;
    const std::size_t n = ws.pred.size();
    if (batch.y.size() != n) throw ValidationError("backward: target size mismatch");
    const double inv_n = 1.0 / static_cast<double>(n);

    const double data_loss = loss_value(ws.pred, batch.y, kind, beta);

    // dL/dz through loss derivative and head subgradient (0 at every clamp)
    std::vector<double> dz(n);
    par::parallel_for(n, [&](std::size_t r) {
        const double e = ws.pred[r] - batch.y[r];
        double dpred = 0.0;
        const double sign = e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
        switch (kind) {
            case LossKind::MSE: dpred = 2.0 * e * inv_n; break;
            case LossKind::ME: dpred = inv_n; break;
            case LossKind::MAE: dpred = sign * inv_n; break;
            case LossKind::MAPE: dpred = 100.0 * sign / batch.y[r] * inv_n; break;
            case LossKind::BetaMAPE:
                dpred = sign * inv_n * (1.0 + beta * 100.0 / batch.y[r]);
                break;
        }
        const double z = ws.z_head[r];
        double dz_r = 0.0;
        switch (c.head) {
            case HeadVariant::C:
                dz_r = (z > 0.0 && z < batch.cap[r]) ? dpred : 0.0;
                break;
            case HeadVariant::R:
                dz_r = (z > 0.0 && z < 1.0) ? dpred * batch.cap[r] : 0.0;
                break;
            case HeadVariant::S: {
                const double sig = ws.pred[r] / batch.cap[r];
                dz_r = dpred * sig * (1.0 - sig) * batch.cap[r];
                break;
            }
        }
        dz[r] = dz_r;
    });

    const std::size_t n_layers = state.layers.size();
    const double l2 = c.l2_coeff;

    // head layer (scalar output)
    {
        const DenseLayer& head = state.layers.back();
        const Matrix& prev = ws.act[n_layers - 2];
        Matrix& gW = grads.W.back();
        par::parallel_for(head.W.cols, [&](std::size_t k) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += dz[r] * prev(r, k);
            gW(0, k) = s + 2.0 * l2 * head.W(0, k);
        });
        double sb = 0.0;
        for (std::size_t r = 0; r < n; ++r) sb += dz[r];
        grads.b.back()[0] = sb;
    }

    // delta for the layer below the head
    Matrix delta(n, state.layers[n_layers - 2].W.rows);
    {
        const DenseLayer& head = state.layers.back();
        const Matrix& act = ws.act[n_layers - 2];
        par::parallel_for(n, [&](std::size_t r) {
            double* drow = delta.row(r);
            const double d = dz[r];
            for (std::size_t k = 0; k < head.W.cols; ++k)
                drow[k] = act(r, k) > 0.0 ? d * head.W(0, k) : 0.0;
        });
    }

    // dense stack, top to bottom
    Matrix next_delta;
    for (std::size_t l = n_layers - 1; l-- > 0;) {
        const DenseLayer& layer = state.layers[l];
        const Matrix& prev = l == 0 ? ws.xnorm : ws.act[l - 1];
        Matrix& gW = grads.W[l];
        std::vector<double>& gb = grads.b[l];

        // dW[j][k] = sum_r delta[r][j] * prev[r][k]; rows folded in fixed
        // order inside each (j, k) owner, so any thread count gives the same
        // bits. Exact zeros from the ReLU mask are skipped.
        par::parallel_for(layer.W.rows, [&](std::size_t j) {
            double* grow = gW.row(j);
            const double* wrow = layer.W.row(j);
            for (std::size_t k = 0; k < layer.W.cols; ++k) grow[k] = 0.0;
            double sb = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                const double d = delta(r, j);
                if (d == 0.0) continue;
                sb += d;
                const double* prow = prev.row(r);
                for (std::size_t k = 0; k < layer.W.cols; ++k) grow[k] += d * prow[k];
            }
            for (std::size_t k = 0; k < layer.W.cols; ++k) grow[k] += 2.0 * l2 * wrow[k];
            gb[j] = sb;
        });

        if (l == 0) break;  // delta still holds layer-0 pre-activation grads

        // propagate to the previous activation
        const Matrix& act = ws.act[l - 1];
        next_delta.rows = n;
        next_delta.cols = layer.W.cols;
        next_delta.data.assign(n * layer.W.cols, 0.0);
        par::parallel_for(n, [&](std::size_t r) {
            double* drow = next_delta.row(r);
            for (std::size_t j = 0; j < layer.W.rows; ++j) {
                const double d = delta(r, j);
                if (d == 0.0) continue;
                const double* wrow = layer.W.row(j);
                for (std::size_t k = 0; k < layer.W.cols; ++k) drow[k] += d * wrow[k];
            }
            for (std::size_t k = 0; k < layer.W.cols; ++k)
                if (!(act(r, k) > 0.0)) drow[k] = 0.0;
        });
        delta = std::move(next_delta);
    }

    // batch-norm parameter gradients: dxnorm[r][k] = sum_j delta0[r][j] W0[j][k],
    // then dgamma = sum dxnorm * xhat and dbeta = sum dxnorm. No input gradient
    // is needed because batch norm is the first layer.
    {
        const DenseLayer& layer0 = state.layers[0];
        const std::size_t d = layer0.W.cols;
        par::parallel_for(d, [&](std::size_t k) {
            double dgamma = 0.0, dbeta = 0.0;
            for (std::size_t r = 0; r < n; ++r) {
                // dxnorm for feature k of row r
                double dx = 0.0;
                for (std::size_t j = 0; j < layer0.W.rows; ++j) {
                    const double del = delta(r, j);
                    if (del != 0.0) dx += del * layer0.W(j, k);
                }
                dgamma += dx * ws.xhat(r, k);
                dbeta += dx;
            }
            grads.bn_gamma[k] = dgamma;
            grads.bn_beta[k] = dbeta;
        });
    }

    for (const Matrix& g : grads.W)
        for (const double v : g.data)
            if (!std::isfinite(v)) throw NumericError("backward: non-finite gradient");

    return data_loss + l2_penalty(state);
}

void adam_step(ModelState& state, const ParamSet& grads, AdamState& opt, double lr) {
    ++opt.t;
    const double c1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(opt.t));
    const double c2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(opt.t));
    const auto update = [&](double* theta, double* m, double* v, const double* g, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            m[i] = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * g[i];
            v[i] = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
            const double mhat = m[i] / c1;
            const double vhat = v[i] / c2;
            theta[i] -= lr * mhat / (std::sqrt(vhat) + kAdamEps);
        }
    };
    update(state.bn_gamma.data(), opt.m.bn_gamma.data(), opt.v.bn_gamma.data(),
           grads.bn_gamma.data(), state.bn_gamma.size());
    update(state.bn_beta.data(), opt.m.bn_beta.data(), opt.v.bn_beta.data(),
           grads.bn_beta.data(), state.bn_beta.size());
    for (std::size_t l = 0; l < state.layers.size(); ++l) {
        update(state.layers[l].W.data.data(), opt.m.W[l].data.data(), opt.v.W[l].data.data(),
               grads.W[l].data.data(), state.layers[l].W.data.size());
        update(state.layers[l].b.data(), opt.m.b[l].data(), opt.v.b[l].data(),
               grads.b[l].data(), state.layers[l].b.size());
    }
}

void apply_feature_noise(Matrix& X, std::span<const std::size_t> columns, double p,
                         std::uint64_t seed) {
    if (p < 0.0) throw ValidationError("apply_feature_noise: p must be >= 0");
    if (p == 0.0 || columns.empty()) return;
    Xoshiro256pp rng(derive_seed(seed, "feature-noise"));
    for (std::size_t r = 0; r < X.rows; ++r) {
        double* row = X.row(r);
        for (const std::size_t c : columns)
            row[c] *= 1.0 + p * kFeatureNoiseSigma * rng.normal();
    }
}

}  // namespace ffdg
