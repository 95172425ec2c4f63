#include "ffdg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ffdg/errors.hpp"

namespace ffdg {

std::vector<double> solve_linear(Matrix A, std::vector<double> b) {
    const std::size_t n = A.rows;
    if (A.cols != n || b.size() != n) throw NumericError("solve_linear: shape mismatch");
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(A(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            const double v = std::fabs(A(r, k));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-300) throw NumericError("solve_linear: singular matrix");
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A(k, c), A(piv, c));
            std::swap(b[k], b[piv]);
        }
        const double inv = 1.0 / A(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            const double f = A(r, k) * inv;
            if (f == 0.0) continue;
            for (std::size_t c = k; c < n; ++c) A(r, c) -= f * A(k, c);
            b[r] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t ri = n; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < n; ++c) s -= A(ri, c) * x[c];
        x[ri] = s / A(ri, ri);
    }
    return x;
}

std::vector<double> solve_least_squares(const Matrix& X, const std::vector<double>& y,
                                        double ridge) {
    const std::size_t n = X.rows, p = X.cols;
    if (y.size() != n) throw NumericError("solve_least_squares: shape mismatch");

    if (n >= p) {
        // primal: (X'X + lam I) b = X'y
        Matrix G(p, p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i; j < p; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < n; ++r) s += X(r, i) * X(r, j);
                G(i, j) = s;
                G(j, i) = s;
            }
        double scale = 0.0;
        for (std::size_t i = 0; i < p; ++i) scale += G(i, i);
        scale = scale > 0.0 ? scale / static_cast<double>(p) : 1.0;
        for (std::size_t i = 0; i < p; ++i) G(i, i) += ridge * scale;
        std::vector<double> rhs(p, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            double s = 0.0;
            for (std::size_t r = 0; r < n; ++r) s += X(r, i) * y[r];
            rhs[i] = s;
        }
        return solve_linear(std::move(G), std::move(rhs));
    }

    // dual: b = X' (X X' + lam I)^-1 y  -- minimum-norm solution
    Matrix K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double s = dot_unrolled(X.row(i), X.row(j), p);
            K(i, j) = s;
            K(j, i) = s;
        }
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale += K(i, i);
    scale = scale > 0.0 ? scale / static_cast<double>(n) : 1.0;
    for (std::size_t i = 0; i < n; ++i) K(i, i) += ridge * scale;
    const std::vector<double> alpha = solve_linear(std::move(K), y);
    std::vector<double> beta(p, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const double a = alpha[r];
        const double* xr = X.row(r);
        for (std::size_t c = 0; c < p; ++c) beta[c] += a * xr[c];
    }
    return beta;
}

SymEigen sym_eigen(const Matrix& A) {
    const std::size_t n = A.rows;
    if (A.cols != n) throw NumericError("sym_eigen: matrix not square");
    Matrix S = A;
    Matrix V(n, n);
    for (std::size_t i = 0; i < n; ++i) V(i, i) = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += S(i, j) * S(i, j);
        double diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) diag += S(i, i) * S(i, i);
        if (off <= 1e-28 * std::max(diag, 1e-300)) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = S(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = (S(q, q) - S(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double skp = S(k, p), skq = S(k, q);
                    S(k, p) = c * skp - s * skq;
                    S(k, q) = s * skp + c * skq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double spk = S(p, k), sqk = S(q, k);
                    S(p, k) = c * spk - s * sqk;
                    S(q, k) = s * spk + c * sqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> diag(n);
    for (std::size_t i = 0; i < n; ++i) diag[i] = S(i, i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return diag[a] > diag[b]; });

    SymEigen out;
    out.values.resize(n);
    out.vectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = diag[order[k]];
        for (std::size_t i = 0; i < n; ++i) out.vectors[k][i] = V(i, order[k]);
    }
    return out;
}

}  // namespace ffdg
