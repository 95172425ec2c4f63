#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ffdg/errors.hpp"
#include "ffdg/fleet.hpp"
#include "ffdg/rng.hpp"

using namespace ffdg;

namespace {

AircraftSpec base_spec(const std::string& code) {
    AircraftSpec s;
    s.type_code = code;
    s.wing_area = 122.6;
    s.span = 34.1;
    s.length = 37.6;
    s.mtow = 78000.0;
    s.oew = 42600.0;
    s.mmo = 0.82;
    s.vmo = 350.0;
    s.hmo = 39800.0;
    s.engine_type = EngineType::turbofan;
    s.n_engines = 2.0;
    s.rated_power = 27000.0;
    s.rated_thrust = 120.0;
    s.bypass_ratio = 5.9;
    s.pressure_ratio = 32.6;
    s.ff_takeoff = 1.15;
    s.ff_climb = 0.95;
    s.ff_approach = 0.33;
    s.ff_idle = 0.11;
    return s;
}

Fleet two_member_fleet() {
    Fleet f;
    f.specs = {base_spec("AAA"), base_spec("BBB")};
    f.specs[1].mtow = 95000.0;
    f.specs[1].span = 38.0;
    f.membership = {Membership::training, Membership::training};
    return f;
}

}  // namespace

TEST_CASE("imputation is the identity on a complete fleet") {
    const Fleet f = synthesize_fleet({.n_train = 6, .n_gen = 2, .seed = 9});
    const Fleet imputed = impute_missing(f);
    for (std::size_t i = 0; i < f.specs.size(); ++i)
        for (const auto& feat : kNumericFeatures)
            CHECK(imputed.specs[i].*(feat.field) == f.specs[i].*(feat.field));
}

TEST_CASE("one-unknown linear relation is recovered exactly") {
    // span = 2 * length everywhere; the spec with the missing span is the
    // midpoint of the other two in every feature, so the minimum-norm
    // regression reproduces the relation
    Fleet f;
    AircraftSpec a = base_spec("AAA");
    AircraftSpec b = base_spec("BBB");
    b.wing_area = 150.0;
    b.mtow = 90000.0;
    b.oew = 47000.0;
    b.length = 45.0;
    b.vmo = 360.0;
    a.length = 35.0;
    a.span = 2.0 * a.length;
    b.span = 2.0 * b.length;
    AircraftSpec c = base_spec("CCC");
    for (const auto& feat : kNumericFeatures)
        c.*(feat.field) = 0.5 * (a.*(feat.field) + b.*(feat.field));
    const double expected_span = 2.0 * c.length;
    c.span = NAN;
    f.specs = {a, b, c};
    f.membership = {Membership::training, Membership::training, Membership::training};

    const Fleet imputed = impute_missing(f);
    CHECK(std::fabs(imputed.specs[2].span - expected_span) < 1e-9 * expected_span);
}

TEST_CASE("round zero leaves the column-mean initialization") {
    Fleet f = two_member_fleet();
    f.specs.push_back(base_spec("CCC"));
    f.membership.push_back(Membership::training);
    f.specs[2].span = NAN;
    const Fleet mean_only = impute_missing(f, 0);
    CHECK(mean_only.specs[2].span ==
          doctest::Approx(0.5 * (f.specs[0].span + f.specs[1].span)).epsilon(1e-12));
}

TEST_CASE("imputation error cases") {
    Fleet f = two_member_fleet();
    f.specs[0].bypass_ratio = NAN;
    f.specs[1].bypass_ratio = NAN;
    CHECK_THROWS_AS((void)impute_missing(f), ValidationError);

    Fleet g = two_member_fleet();
    g.specs[0].span = NAN;  // observed once only
    CHECK_THROWS_AS((void)impute_missing(g), ValidationError);
}

TEST_CASE("imputation is deterministic and observed values never move") {
    Fleet f = synthesize_fleet({.n_train = 10, .n_gen = 0, .seed = 31, .missing_frac = 0.15});
    const Fleet a = impute_missing(f);
    const Fleet b = impute_missing(f);
    for (std::size_t i = 0; i < f.specs.size(); ++i)
        for (const auto& feat : kNumericFeatures) {
            CHECK(a.specs[i].*(feat.field) == b.specs[i].*(feat.field));
            const double orig = f.specs[i].*(feat.field);
            if (!std::isnan(orig) && std::string(feat.name) != "n_engines")
                CHECK(a.specs[i].*(feat.field) == orig);
            CHECK_FALSE(std::isnan(a.specs[i].*(feat.field)));
        }
}

TEST_CASE("quantile map endpoints, interpolation and clamping") {
    const QuantileMap qm = QuantileMap::fit({{1.0, 2.0, 3.0, 4.0}}, {"x"});
    CHECK(qm.map(0, 1.0) == 0.0);
    CHECK(qm.map(0, 4.0) == 1.0);
    CHECK(qm.map(0, 2.5) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(qm.map(0, 100.0) == 1.0);
    CHECK(qm.map(0, -7.0) == 0.0);
}

TEST_CASE("constant feature column maps to the midpoint") {
    const QuantileMap qm = QuantileMap::fit({{5.0, 5.0, 5.0}}, {"x"});
    CHECK(qm.map(0, 5.0) == 0.5);
    CHECK(qm.map(0, 0.0) == 0.5);
}

TEST_CASE("quantile map output is monotone") {
    Xoshiro256pp rng(17);
    std::vector<double> col(500);
    for (double& v : col) v = std::exp(rng.normal());
    const QuantileMap qm = QuantileMap::fit({col}, {"x"});
    double prev = -1.0;
    for (double q = 0.0; q <= 10.0; q += 0.05) {
        const double m = qm.map(0, q);
        CHECK(m >= prev);
        CHECK(m >= 0.0);
        CHECK(m <= 1.0);
        prev = m;
    }
}

TEST_CASE("mapped fitted values are approximately uniform (KS < 0.05)") {
    Xoshiro256pp rng(23);
    const std::size_t n = 10000;
    std::vector<double> col(n);
    for (double& v : col) v = std::exp(rng.normal());
    const QuantileMap qm = QuantileMap::fit({col}, {"x"});
    std::vector<double> mapped(n);
    for (std::size_t i = 0; i < n; ++i) mapped[i] = qm.map(0, col[i]);
    std::sort(mapped.begin(), mapped.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        ks = std::max(ks, std::max(mapped[i] - lo, hi - mapped[i]));
    }
    CHECK(ks < 0.05);
}

TEST_CASE("3-4-5 distance against a hand-built map") {
    // two features whose mapped values differ by 0.6 and 0.8
    const QuantileMap qm = QuantileMap::fit(
        {{0.0, 1.0, 2.0, 3.0, 4.0, 5.0}, {0.0, 1.0, 2.0, 3.0, 4.0, 5.0}}, {"u", "v"});
    CHECK(qm.map(0, 0.0) == 0.0);
    CHECK(qm.map(0, 3.0) == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(qm.map(1, 4.0) == doctest::Approx(0.8).epsilon(1e-12));
    const double dx = qm.map(0, 3.0) - qm.map(0, 0.0);
    const double dy = qm.map(1, 4.0) - qm.map(1, 0.0);
    CHECK(std::sqrt(dx * dx + dy * dy) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pseudo-distance identity, symmetry and the pseudo-metric property") {
    Fleet f = synthesize_fleet({.n_train = 8, .n_gen = 4, .seed = 77});
    // clone features onto a distinct type code
    AircraftSpec twin = f.specs[0];
    twin.type_code = "TWIN";
    f.specs.push_back(twin);
    f.membership.push_back(Membership::generalization);
    const QuantileMap qm = fit_fleet_quantile_map(f);

    CHECK(pseudo_distance(f.specs[0], f.specs[0], qm) == 0.0);
    CHECK(pseudo_distance(f.specs[0], f.specs.back(), qm) == 0.0);  // distinct codes, same features
    for (std::size_t i = 0; i < f.specs.size(); ++i)
        for (std::size_t j = i + 1; j < f.specs.size(); ++j)
            CHECK(pseudo_distance(f.specs[i], f.specs[j], qm) ==
                  pseudo_distance(f.specs[j], f.specs[i], qm));
}

TEST_CASE("metric axioms hold on random synthetic fleets") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Xoshiro256pp rng(derive_seed(seed, "fleet-size"));
        const int n = 5 + static_cast<int>(rng.below(26));
        const Fleet f = synthesize_fleet({.n_train = n, .n_gen = 0, .seed = seed});
        const QuantileMap qm = fit_fleet_quantile_map(f);
        std::vector<std::vector<double>> d(f.size(), std::vector<double>(f.size(), 0.0));
        for (std::size_t i = 0; i < f.size(); ++i)
            for (std::size_t j = 0; j < f.size(); ++j)
                d[i][j] = pseudo_distance(f.specs[i], f.specs[j], qm);
        for (std::size_t i = 0; i < f.size(); ++i) {
            CHECK(d[i][i] == 0.0);
            for (std::size_t j = 0; j < f.size(); ++j) {
                CHECK(d[i][j] >= 0.0);
                CHECK(d[i][j] == d[j][i]);
                for (std::size_t k = 0; k < f.size(); ++k)
                    CHECK(d[i][k] <= d[i][j] + d[j][k] + 1e-12);
            }
        }
    }
}

TEST_CASE("within-family distances sit below cross-family distances") {
    const Fleet f = synthesize_fleet({.n_train = 18, .n_gen = 0, .seed = 4});
    const QuantileMap qm = fit_fleet_quantile_map(f);
    const auto family = [](const std::string& code) { return code.substr(0, code.find('-')); };
    double max_within = 0.0;
    double sum_within = 0.0, sum_cross = 0.0;
    int n_within = 0, n_cross = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        for (std::size_t j = i + 1; j < f.size(); ++j) {
            const double d = pseudo_distance(f.specs[i], f.specs[j], qm);
            if (family(f.specs[i].type_code) == family(f.specs[j].type_code)) {
                max_within = std::max(max_within, d);
                sum_within += d;
                ++n_within;
            } else {
                sum_cross += d;
                ++n_cross;
            }
        }
    REQUIRE(n_within > 0);
    REQUIRE(n_cross > 0);
    CHECK(sum_within / n_within < sum_cross / n_cross);
}

TEST_CASE("closest_training_distance: identity, brute force and tie rule") {
    Fleet f = two_member_fleet();
    const QuantileMap qm = fit_fleet_quantile_map(f);
    const ClosestResult self = closest_training_distance(f.specs[0], f, qm);
    CHECK(self.distance == 0.0);
    CHECK(self.type_code == "AAA");

    // brute force over both members for an outside spec
    AircraftSpec probe = base_spec("PROBE");
    probe.mtow = 93000.0;
    probe.span = 37.0;
    const double da = pseudo_distance(probe, f.specs[0], qm);
    const double db = pseudo_distance(probe, f.specs[1], qm);
    const ClosestResult got = closest_training_distance(probe, f, qm);
    CHECK(got.distance == std::min(da, db));
    CHECK(got.type_code == (da <= db ? "AAA" : "BBB"));

    // tie between equidistant types resolves lexicographically
    Fleet tie;
    tie.specs = {base_spec("ZZZ"), base_spec("MMM")};
    tie.membership = {Membership::training, Membership::training};
    const QuantileMap qt = fit_fleet_quantile_map(tie);
    const ClosestResult t = closest_training_distance(base_spec("PROBE"), tie, qt);
    CHECK(t.distance == 0.0);
    CHECK(t.type_code == "MMM");

    Fleet empty_train;
    empty_train.specs = {base_spec("AAA")};
    empty_train.membership = {Membership::generalization};
    const QuantileMap qe = fit_fleet_quantile_map(empty_train);
    CHECK_THROWS_AS((void)closest_training_distance(base_spec("P"), empty_train, qe),
                    ValidationError);
}

TEST_CASE("fleet CSV round-trips, including missing cells") {
    Fleet f = synthesize_fleet({.n_train = 5, .n_gen = 3, .seed = 12, .missing_frac = 0.2});
    const std::string path = (std::filesystem::temp_directory_path() / "ffdg_fleet_rt.csv").string();
    write_fleet_csv(f, path);
    const Fleet back = read_fleet_csv(path);
    REQUIRE(back.size() == f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(back.specs[i].type_code == f.specs[i].type_code);
        CHECK(back.membership[i] == f.membership[i]);
        for (const auto& feat : kNumericFeatures) {
            const double a = f.specs[i].*(feat.field);
            const double b = back.specs[i].*(feat.field);
            if (std::isnan(a))
                CHECK(std::isnan(b));
            else
                CHECK(a == b);
        }
    }
    std::remove(path.c_str());
}

TEST_CASE("synthesized fleets satisfy the spec invariants") {
    const Fleet f = synthesize_fleet({.n_train = 16, .n_gen = 8, .seed = 42});
    CHECK(f.size() == 24);
    validate_fleet(f);
    for (const AircraftSpec& s : f.specs) validate_spec(s);
    // same seed, same file content
    const Fleet g = synthesize_fleet({.n_train = 16, .n_gen = 8, .seed = 42});
    for (std::size_t i = 0; i < f.size(); ++i)
        for (const auto& feat : kNumericFeatures)
            CHECK(f.specs[i].*(feat.field) == g.specs[i].*(feat.field));
}
