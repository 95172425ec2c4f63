#include <doctest.h>

#include <cmath>

#include "ffdg/linalg.hpp"
#include "ffdg/rng.hpp"

using namespace ffdg;

TEST_CASE("solve_linear recovers a known solution") {
    Matrix A(2, 2);
    A(0, 0) = 2.0; A(0, 1) = 1.0;
    A(1, 0) = 1.0; A(1, 1) = 3.0;
    const auto x = solve_linear(A, {5.0, 10.0});  // x = (1, 3)
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("overdetermined least squares matches the exact fit") {
    // y = 3 + 2 x, noise-free
    Matrix X(5, 2);
    std::vector<double> y(5);
    for (int i = 0; i < 5; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = i;
        y[i] = 3.0 + 2.0 * i;
    }
    const auto beta = solve_least_squares(X, y);
    CHECK(beta[0] == doctest::Approx(3.0).epsilon(1e-8));
    CHECK(beta[1] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("underdetermined least squares interpolates points in the row span") {
    // 2 equations, 4 unknowns; prediction at a row-span point is exact
    Xoshiro256pp rng(5);
    Matrix X(2, 4);
    for (double& v : X.data) v = rng.uniform(-1.0, 1.0);
    const std::vector<double> y = {2.0, -1.0};
    const auto beta = solve_least_squares(X, y);
    for (int r = 0; r < 2; ++r) {
        double pred = 0.0;
        for (int c = 0; c < 4; ++c) pred += X(r, c) * beta[c];
        CHECK(pred == doctest::Approx(y[r]).epsilon(1e-8));
    }
    // combination row
    double pred = 0.0;
    for (int c = 0; c < 4; ++c) pred += (0.25 * X(0, c) + 0.75 * X(1, c)) * beta[c];
    CHECK(pred == doctest::Approx(0.25 * 2.0 + 0.75 * -1.0).epsilon(1e-7));
}

TEST_CASE("sym_eigen diagonalizes a known matrix") {
    Matrix A(2, 2);
    A(0, 0) = 2.0; A(0, 1) = 1.0;
    A(1, 0) = 1.0; A(1, 1) = 2.0;  // eigenvalues 3 and 1
    const SymEigen e = sym_eigen(A);
    CHECK(e.values[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(e.values[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(e.vectors[0][0]) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-10));
}

TEST_CASE("sym_eigen returns an orthonormal basis on random symmetric matrices") {
    Xoshiro256pp rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(6);
        Matrix A(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                A(i, j) = rng.uniform(-2.0, 2.0);
                A(j, i) = A(i, j);
            }
        const SymEigen e = sym_eigen(A);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                double dot = 0.0;
                for (std::size_t k = 0; k < n; ++k) dot += e.vectors[a][k] * e.vectors[b][k];
                CHECK(dot == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-9));
            }
        // A v = lambda v
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t i = 0; i < n; ++i) {
                double av = 0.0;
                for (std::size_t k = 0; k < n; ++k) av += A(i, k) * e.vectors[a][k];
                CHECK(av == doctest::Approx(e.values[a] * e.vectors[a][i]).epsilon(1e-8));
            }
    }
}

TEST_CASE("dot_unrolled agrees with the naive sum") {
    Xoshiro256pp rng(3);
    std::vector<double> a(103), b(103);
    for (auto& v : a) v = rng.uniform(-1.0, 1.0);
    for (auto& v : b) v = rng.uniform(-1.0, 1.0);
    double naive = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) naive += a[i] * b[i];
    CHECK(dot_unrolled(a.data(), b.data(), a.size()) == doctest::Approx(naive).epsilon(1e-13));
}
