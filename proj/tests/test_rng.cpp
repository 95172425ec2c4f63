#include <doctest.h>

#include <set>

#include "ffdg/rng.hpp"

using namespace ffdg;

TEST_CASE("derive_seed is stable and tag-sensitive") {
    CHECK(derive_seed(42, "train-pool") == derive_seed(42, "train-pool"));
    CHECK(derive_seed(42, "train-pool", 7) == derive_seed(42, "train-pool", 7));
    CHECK(derive_seed(42, "train-pool") != derive_seed(42, "val-pool"));
    CHECK(derive_seed(42, "x", 1) != derive_seed(42, "x", 2));
    CHECK(derive_seed(42, "x", 1, 2) != derive_seed(42, "x", 2, 1));
    CHECK(derive_seed(41, "x") != derive_seed(42, "x"));
}

TEST_CASE("10^4 derived seeds have no collisions") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 10000; ++i) seen.insert(derive_seed(42, "stream", i));
    CHECK(seen.size() == 10000);
}

TEST_CASE("uniform01 stays in [0,1) and below() respects its bound") {
    Xoshiro256pp rng(123);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    for (int i = 0; i < 10000; ++i) CHECK(rng.below(7) < 7);
}

TEST_CASE("normal() has roughly standard moments") {
    Xoshiro256pp rng(7);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::fabs(mean) < 0.01);
    CHECK(std::fabs(var - 1.0) < 0.02);
}

TEST_CASE("generator streams are reproducible") {
    Xoshiro256pp a(99), b(99);
    for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());
}
