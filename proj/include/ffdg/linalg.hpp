#pragma once

#include <cstddef>
#include <vector>

namespace ffdg {

// Dense row-major matrix.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }
};

// Dot product with four independent accumulators folded in fixed order.
// Deterministic for a given n; faster than the naive chain.
inline double dot_unrolled(const double* a, const double* b, std::size_t n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    for (; i < n; ++i) s0 += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3));
}

// Minimum-norm least squares for X b ~= y with a small ridge term for
// stability. Picks the primal or dual normal equations by shape, so
// underdetermined systems (more columns than rows) return the minimum-norm
// interpolant. X is n x p, y has n entries, result has p entries.
std::vector<double> solve_least_squares(const Matrix& X, const std::vector<double>& y,
                                        double ridge = 1e-10);

// Solves the symmetric positive (semi)definite system A x = b in place by
// Gaussian elimination with partial pivoting. Throws NumericError when
// singular beyond the pivot floor.
std::vector<double> solve_linear(Matrix A, std::vector<double> b);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Values are sorted in descending order; vectors[k] is the unit eigenvector
// for values[k].
struct SymEigen {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};
SymEigen sym_eigen(const Matrix& A);

}  // namespace ffdg
