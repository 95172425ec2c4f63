#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "ffdg/atmosphere.hpp"
#include "ffdg/errors.hpp"
#include "ffdg/fuel_oracle.hpp"
#include "ffdg/trajectory.hpp"

using namespace ffdg;

namespace {

AircraftSpec narrowbody() {
    AircraftSpec s;
    s.type_code = "NB";
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

StateSample level_state() {
    StateSample st;
    st.altitude = 35000.0;
    st.vertical_rate = 0.0;
    st.tas = 450.0;
    st.ground_speed = 455.0;
    st.ground_accel = 0.0;
    st.air_accel = 0.0;
    st.temperature = isa_temperature(35000.0);
    return st;
}

}  // namespace

TEST_CASE("ISA temperature matches the lapse formula") {
    CHECK(isa_temperature(0.0) == doctest::Approx(288.15).epsilon(1e-12));
    CHECK(isa_temperature(10000.0) == doctest::Approx(288.15 - 0.0019812 * 10000.0).epsilon(1e-12));
    CHECK(isa_temperature(10000.0) == doctest::Approx(268.338).epsilon(1e-9));
    CHECK(isa_temperature(36089.0) == doctest::Approx(216.65).epsilon(5e-6));
    CHECK(isa_temperature(45000.0) == 216.65);
    CHECK(isa_temperature(-100.0) == doctest::Approx(288.15));  // clamped domain
}

TEST_CASE("ISA density decreases with altitude and starts at 1.225") {
    CHECK(isa_density(0.0) == doctest::Approx(1.225).epsilon(1e-3));
    double prev = isa_density(0.0);
    for (double alt = 1000.0; alt <= 45000.0; alt += 1000.0) {
        const double rho = isa_density(alt);
        CHECK(rho < prev);
        prev = rho;
    }
}

TEST_CASE("trajectory generation is bit-deterministic per (spec, seed)") {
    const AircraftSpec spec = narrowbody();
    const Trajectory a = generate_trajectory(spec, 1234);
    const Trajectory b = generate_trajectory(spec, 1234);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        CHECK(a.samples[i].altitude == b.samples[i].altitude);
        CHECK(a.samples[i].tas == b.samples[i].tas);
        CHECK(a.samples[i].vertical_rate == b.samples[i].vertical_rate);
        CHECK(a.samples[i].temperature == b.samples[i].temperature);
        CHECK(a.samples[i].ground_accel == b.samples[i].ground_accel);
    }
    const Trajectory c = generate_trajectory(spec, 1235);
    CHECK(a.samples.size() != c.samples.size());
}

TEST_CASE("cruise samples stay inside the level band") {
    const AircraftSpec spec = narrowbody();
    Xoshiro256pp rng(9);
    const FlightProfile profile = draw_profile(spec, rng);
    const Trajectory t = generate_with_profile(spec, profile, 77);
    validate_trajectory(t);
    // the cruise block starts at the exact-clamp sample and spans
    // ceil(cruise_duration / 4 s) samples
    std::size_t i0 = 0;
    while (i0 < t.samples.size() && t.samples[i0].altitude != profile.cruise_altitude) ++i0;
    REQUIRE(i0 < t.samples.size());
    const auto n_cruise =
        static_cast<std::size_t>(std::ceil(profile.cruise_duration / kSampleDtSeconds));
    REQUIRE(i0 + n_cruise <= t.samples.size());
    for (std::size_t i = i0; i < i0 + n_cruise; ++i)
        CHECK(std::fabs(t.samples[i].vertical_rate) < 100.0);
}

TEST_CASE("level flight dominates climb on a one-hour profile with a short climb") {
    const AircraftSpec spec = narrowbody();
    FlightProfile p;
    p.cruise_altitude = 15000.0;   // ~10 min climb at the drawn rates
    p.climb_cas = 230.0;
    p.cruise_mach = 0.74;
    p.descent_rate = 1800.0;
    p.cruise_duration = 2700.0;    // 45 min level
    p.wind_offset = 10.0;
    p.temp_offset = 3.0;
    p.initial_climb_rate = 2400.0;
    p.liftoff_tas = 150.0;
    p.approach_tas = 140.0;
    const Trajectory t = generate_with_profile(spec, p, 5);
    std::size_t climb = 0, level = 0;
    for (const StateSample& s : t.samples) {
        if (s.vertical_rate > 200.0) ++climb;
        else if (s.vertical_rate >= -200.0) ++level;
    }
    CHECK(level > climb);
}

TEST_CASE("smooth_derivatives: constant speed gives zero acceleration") {
    Trajectory t;
    t.flight_id = "const";
    for (int i = 0; i < 40; ++i) {
        StateSample s;
        s.t = 4.0 * i;
        s.ground_speed = 250.0;
        s.tas = 240.0;
        s.temperature = 280.0;
        t.samples.push_back(s);
    }
    const Trajectory out = smooth_derivatives(t);
    for (const StateSample& s : out.samples) {
        CHECK(s.ground_accel == doctest::Approx(0.0).epsilon(1e-15));
        CHECK(s.air_accel == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("smooth_derivatives: a linear ramp is invariant under the moving average") {
    Trajectory t;
    t.flight_id = "ramp";
    for (int i = 0; i < 40; ++i) {
        StateSample s;
        s.t = 4.0 * i;
        s.ground_speed = 2.0 * s.t;  // 2 kt/s
        s.tas = 2.0 * s.t;
        s.temperature = 280.0;
        t.samples.push_back(s);
    }
    const Trajectory out = smooth_derivatives(t);
    for (std::size_t i = 1; i + 1 < out.samples.size(); ++i) {
        CHECK(out.samples[i].ground_accel == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(out.samples[i].air_accel == doctest::Approx(2.0).epsilon(1e-12));
    }
}

TEST_CASE("smooth_derivatives: a step spreads over exactly the 3-point window") {
    Trajectory t;
    t.flight_id = "step";
    for (int i = 0; i < 11; ++i) {
        StateSample s;
        s.t = 4.0 * i;
        s.ground_speed = i >= 5 ? 300.0 : 240.0;
        s.tas = s.ground_speed;
        s.temperature = 280.0;
        t.samples.push_back(s);
    }
    // hand-rolled 3-point average then centered difference
    const double v0 = 240.0, v1 = 300.0;
    const double ma3 = (v0 + v0 + v0) / 3.0;          // i = 3
    const double ma4 = (v0 + v0 + v1) / 3.0;          // i = 4
    const double ma5 = (v0 + v1 + v1) / 3.0;          // i = 5
    const double ma6 = (v1 + v1 + v1) / 3.0;          // i = 6
    const Trajectory out = smooth_derivatives(t);
    CHECK(out.samples[4].ground_accel == doctest::Approx((ma5 - ma3) / 8.0).epsilon(1e-12));
    CHECK(out.samples[5].ground_accel == doctest::Approx((ma6 - ma4) / 8.0).epsilon(1e-12));
    CHECK(out.samples[2].ground_accel == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(out.samples[8].ground_accel == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("oracle matches an independent hand evaluation in level flight") {
    const AircraftSpec spec = narrowbody();
    const StateSample st = level_state();
    const double mass = 65000.0;

    // spreadsheet-style re-derivation with its own constants
    const double rho = isa_density(35000.0);
    const double v = 450.0 * 1852.0 / 3600.0;
    const double cl = 2.0 * mass * 9.80665 / (rho * v * v * 122.6);
    const double ar = 34.1 * 34.1 / 122.6;
    const double cd = 0.021 + cl * cl / (M_PI * ar * 0.80);
    const double drag = 0.5 * rho * v * v * 122.6 * cd;
    const double mach = v / std::sqrt(1.4 * 287.05287 * st.temperature);
    const double c0 = 1.8e-5 * std::pow(8.0 / 6.9, 0.3);
    const double tsfc = c0 * (1.0 + mach) * std::sqrt(st.temperature / 288.15);
    const double expected = tsfc * drag;

    REQUIRE(expected > oracle_floor(spec));
    REQUIRE(expected < oracle_ceiling(spec));
    CHECK(oracle_fuel_flow(st, spec, mass) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("oracle clamps to idle and takeoff bounds") {
    const AircraftSpec spec = narrowbody();
    StateSample descent = level_state();
    descent.vertical_rate = -3000.0;  // thrust goes negative
    CHECK(oracle_fuel_flow(descent, spec, 60000.0) == oracle_floor(spec));

    StateSample surge = level_state();
    surge.altitude = 1000.0;
    surge.tas = 250.0;
    surge.temperature = isa_temperature(1000.0);
    surge.vertical_rate = 6000.0;
    surge.air_accel = 3.0;  // contrived high-thrust state
    CHECK(oracle_fuel_flow(surge, spec, 78000.0) == oracle_ceiling(spec));
}

TEST_CASE("oracle output is always inside the clamp bounds") {
    const AircraftSpec spec = narrowbody();
    Xoshiro256pp rng(2);
    for (int i = 0; i < 5000; ++i) {
        StateSample st;
        st.altitude = rng.uniform(0.0, 41000.0);
        st.vertical_rate = rng.uniform(-3000.0, 3000.0);
        st.tas = rng.uniform(120.0, 480.0);
        st.ground_speed = st.tas + rng.uniform(-50.0, 50.0);
        st.air_accel = rng.uniform(-1.0, 1.0);
        st.ground_accel = st.air_accel;
        st.temperature = isa_temperature(st.altitude) + rng.uniform(-10.0, 10.0);
        const double mass = rng.uniform(spec.oew + 1.0, spec.mtow);
        const double ff = oracle_fuel_flow(st, spec, mass);
        CHECK(ff >= oracle_floor(spec));
        CHECK(ff <= oracle_ceiling(spec));
    }
}

TEST_CASE("oracle is monotone non-decreasing in mass above the drag-minimum speed") {
    const AircraftSpec spec = narrowbody();
    Xoshiro256pp rng(8);
    const double ar = spec.span * spec.span / spec.wing_area;
    for (int i = 0; i < 2000; ++i) {
        StateSample st;
        st.altitude = rng.uniform(0.0, 40000.0);
        st.vertical_rate = 0.0;
        st.tas = rng.uniform(150.0, 470.0);
        st.ground_speed = st.tas;
        st.temperature = isa_temperature(st.altitude);
        // drag-minimum: CL* = sqrt(cd0 pi AR e); skip slower samples
        const double rho = isa_density(st.altitude);
        const double v = st.tas * 1852.0 / 3600.0;
        const double cl_star = std::sqrt(0.021 * M_PI * ar * 0.80);
        const double cl_heavy = 2.0 * spec.mtow * 9.80665 / (rho * v * v * spec.wing_area);
        if (cl_heavy > cl_star) continue;
        double prev = 0.0;
        for (double frac = 0.60; frac <= 1.0; frac += 0.05) {
            const double ff = oracle_fuel_flow(st, spec, frac * spec.mtow);
            CHECK(ff >= prev);
            prev = ff;
        }
    }
}

TEST_CASE("mass integration: telescoping burn and the clamped-constant case") {
    const AircraftSpec spec = narrowbody();
    Trajectory t;
    t.flight_id = "descent";
    for (int i = 0; i < 30; ++i) {
        StateSample s;
        s.t = 4.0 * i;
        s.altitude = 20000.0 - 40.0 * i;
        s.vertical_rate = -2500.0;  // keeps the oracle pinned at the idle floor
        s.tas = 280.0;
        s.ground_speed = 280.0;
        s.temperature = isa_temperature(s.altitude);
        t.samples.push_back(s);
    }
    const double m0 = 60000.0;
    const MassSeries series = integrate_mass(t, spec, m0);
    REQUIRE(series.mass.size() == t.samples.size());

    const double idle = oracle_floor(spec);
    for (const double ff : series.fuel_flow) CHECK(ff == idle);
    // constant flow: mass falls by exactly ff * 4 s each step
    for (std::size_t i = 1; i < series.mass.size(); ++i)
        CHECK(series.mass[i] == doctest::Approx(m0 - 4.0 * idle * i).epsilon(1e-12));

    double total = 0.0;
    for (const double ff : series.fuel_flow) total += ff;
    const double final_mass = series.mass.back() - series.fuel_flow.back() * 4.0;
    CHECK(m0 - final_mass == doctest::Approx(4.0 * total).epsilon(1e-9));
}

TEST_CASE("mass series decreases strictly and exhaustion raises an error") {
    const AircraftSpec spec = narrowbody();
    const Trajectory t = generate_trajectory(spec, 321);
    const MassSeries s = integrate_mass(t, spec, 0.8 * spec.mtow);
    for (std::size_t i = 1; i < s.mass.size(); ++i) CHECK(s.mass[i] < s.mass[i - 1]);

    CHECK_THROWS_AS((void)integrate_mass(t, spec, spec.oew + 50.0), ValidationError);
    CHECK_THROWS_AS((void)integrate_mass(t, spec, spec.oew), ValidationError);
    CHECK_THROWS_AS((void)integrate_mass(t, spec, 2.0 * spec.mtow), ValidationError);
}

TEST_CASE("trajectory CSV round-trips and parse errors carry line numbers") {
    const AircraftSpec spec = narrowbody();
    std::vector<Trajectory> trajs;
    Trajectory t1 = generate_trajectory(spec, 100);
    t1.flight_id = "NB-f0";
    Trajectory t2 = generate_trajectory(spec, 101);
    t2.flight_id = "NB-f1";
    trajs.push_back(t1);
    trajs.push_back(t2);

    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "ffdg_traj_rt.csv").string();
    write_trajectories_csv(trajs, path);
    const std::vector<Trajectory> back = read_trajectories_csv(path);
    REQUIRE(back.size() == 2);
    REQUIRE(back[0].samples.size() == t1.samples.size());
    for (std::size_t i = 0; i < t1.samples.size(); ++i) {
        CHECK(back[0].samples[i].altitude == t1.samples[i].altitude);
        CHECK(back[0].samples[i].air_accel == t1.samples[i].air_accel);
    }
    std::remove(path.c_str());
}
