#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "ffdg/dataset.hpp"
#include "ffdg/errors.hpp"
#include "ffdg/fuel_oracle.hpp"
#include "ffdg/manifest.hpp"
#include "ffdg/rng.hpp"

using namespace ffdg;

namespace {

AircraftSpec test_spec(double mtow = 100000.0) {
    AircraftSpec s;
    s.type_code = "TT";
    s.wing_area = 160.0;
    s.span = 40.0;
    s.length = 44.0;
    s.mtow = mtow;
    s.oew = 0.52 * mtow;
    s.mmo = 0.84;
    s.vmo = 350.0;
    s.hmo = 40000.0;
    s.engine_type = EngineType::turbofan;
    s.n_engines = 2.0;
    s.rated_power = 30000.0;
    s.rated_thrust = 140.0;
    s.bypass_ratio = 6.5;
    s.pressure_ratio = 34.0;
    s.ff_takeoff = 1.3;
    s.ff_climb = 1.05;
    s.ff_approach = 0.38;
    s.ff_idle = 0.12;
    return s;
}

std::vector<FlightTag> make_flights(const std::string& type, int n) {
    std::vector<FlightTag> tags;
    for (int i = 0; i < n; ++i) {
        FlightTag t;
        t.flight_id = type + "-f" + std::to_string(i);
        t.type_code = type;
        tags.push_back(std::move(t));
    }
    return tags;
}

}  // namespace

TEST_CASE("mass grid uses 70..95% of MTOW and emits six variants") {
    const AircraftSpec spec = test_spec(100000.0);
    const Trajectory traj = generate_trajectory(spec, 7);
    ObservationTable table;
    expand_mass_grid(traj, spec, table);

    std::set<int> variants;
    for (std::size_t r = 0; r < table.n_rows(); ++r) variants.insert(table.row_mass_variant(r));
    CHECK(variants == std::set<int>{70, 75, 80, 85, 90, 95});
    CHECK(table.n_rows() == 6 * traj.samples.size());

    // first row of each variant carries the exact takeoff mass
    for (const int pct : kMassVariantsPct) {
        bool found = false;
        for (std::size_t r = 0; r < table.n_rows(); ++r) {
            if (table.row_mass_variant(r) == pct) {
                CHECK(table.mass(r) == doctest::Approx(1000.0 * pct).epsilon(1e-12));
                found = true;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("level-flight labels are non-decreasing across the mass grid") {
    const AircraftSpec spec = test_spec();
    StateSample st;
    st.altitude = 33000.0;
    st.vertical_rate = 0.0;
    st.tas = 440.0;
    st.ground_speed = 440.0;
    st.temperature = 222.0;
    double prev = 0.0;
    for (const int pct : kMassVariantsPct) {
        const double ff = oracle_fuel_flow(st, spec, spec.mtow * pct / 100.0);
        CHECK(ff >= prev);
        prev = ff;
    }
}

TEST_CASE("infeasible variants are skipped or dropped with a warning") {
    AircraftSpec heavy_oew = test_spec();
    heavy_oew.oew = 0.72 * heavy_oew.mtow;  // 70% variant falls below OEW
    const Trajectory traj = generate_trajectory(heavy_oew, 3);
    ObservationTable table;
    int warnings = 0;
    expand_mass_grid(traj, heavy_oew, table, {}, [&](const std::string&) { ++warnings; });
    std::set<int> variants;
    for (std::size_t r = 0; r < table.n_rows(); ++r) variants.insert(table.row_mass_variant(r));
    CHECK_FALSE(variants.count(70));
    CHECK(variants.count(95) == 1);
}

TEST_CASE("split counts follow the floor/floor/remainder rule") {
    const DatasetSplit s10 = split_flights(make_flights("A", 10), 42);
    int train = 0, val = 0, test = 0;
    for (const FlightTag& t : s10.flights) {
        if (t.subset == Subset::train) ++train;
        if (t.subset == Subset::val) ++val;
        if (t.subset == Subset::test) ++test;
    }
    CHECK(train == 8);
    CHECK(val == 1);
    CHECK(test == 1);

    const DatasetSplit s25 = split_flights(make_flights("B", 25), 42);
    train = val = test = 0;
    for (const FlightTag& t : s25.flights) {
        if (t.subset == Subset::train) ++train;
        if (t.subset == Subset::val) ++val;
        if (t.subset == Subset::test) ++test;
    }
    CHECK(train == 20);
    CHECK(val == 2);
    CHECK(test == 3);
}

TEST_CASE("split is per-type stratified, disjoint and seeded") {
    std::vector<FlightTag> tags = make_flights("A", 12);
    const std::vector<FlightTag> more = make_flights("B", 15);
    tags.insert(tags.end(), more.begin(), more.end());

    const DatasetSplit a = split_flights(tags, 1);
    const DatasetSplit b = split_flights(tags, 1);
    const DatasetSplit c = split_flights(tags, 2);
    for (std::size_t i = 0; i < tags.size(); ++i) CHECK(a.flights[i].subset == b.flights[i].subset);
    bool any_diff = false;
    for (std::size_t i = 0; i < tags.size(); ++i)
        if (a.flights[i].subset != c.flights[i].subset) any_diff = true;
    CHECK(any_diff);

    // every type appears in every subset
    for (const std::string type : {"A", "B"}) {
        std::set<Subset> seen;
        for (const FlightTag& t : a.flights)
            if (t.type_code == type) seen.insert(t.subset);
        CHECK(seen.size() == 3);
    }

    a.validate();  // flight ids unique across subsets

    CHECK_THROWS_AS((void)split_flights(make_flights("C", 9), 42), ValidationError);
}

TEST_CASE("dataset CSV round-trips rows and bytes") {
    const AircraftSpec spec = test_spec();
    const Trajectory traj = generate_trajectory(spec, 11);
    ObservationTable table;
    expand_mass_grid(traj, spec, table);

    const auto dir = std::filesystem::temp_directory_path();
    const std::string p1 = (dir / "ffdg_ds_rt1.csv").string();
    const std::string p2 = (dir / "ffdg_ds_rt2.csv").string();
    write_dataset(table, p1);
    const ObservationTable back = read_dataset(p1);
    REQUIRE(back.n_rows() == table.n_rows());
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        CHECK(back.mass(r) == table.mass(r));
        CHECK(back.target(r) == table.target(r));
        for (std::size_t k = 0; k < 7; ++k) CHECK(back.state(r, k) == table.state(r, k));
        CHECK(back.type_code(back.row_type(r)) == table.type_code(table.row_type(r)));
        CHECK(back.flight_id(back.row_flight(r)) == table.flight_id(table.row_flight(r)));
    }
    write_dataset(back, p2);
    CHECK(file_hash_hex(p1) == file_hash_hex(p2));
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST_CASE("empty table writes a header-only file that reads back empty") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "ffdg_ds_empty.csv").string();
    ObservationTable empty;
    write_dataset(empty, path);
    const ObservationTable back = read_dataset(path);
    CHECK(back.n_rows() == 0);
    std::remove(path.c_str());
}

TEST_CASE("a corrupted numeric cell is reported with its line number") {
    const AircraftSpec spec = test_spec();
    const Trajectory traj = generate_trajectory(spec, 13);
    ObservationTable table;
    expand_mass_grid(traj, spec, table);
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "ffdg_ds_bad.csv").string();
    write_dataset(table, path);

    // clobber a numeric cell on line 42
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    in.close();
    REQUIRE(lines.size() > 42);
    const std::size_t comma = lines[41].rfind(',');
    lines[41] = lines[41].substr(0, comma + 1) + "not_a_number";
    std::ofstream out(path, std::ios::binary);
    for (const std::string& l : lines) out << l << "\n";
    out.close();

    try {
        (void)read_dataset(path);
        FAIL("expected a parse error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find(":42:") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("split CSV and meta sidecar round-trip") {
    std::vector<FlightTag> tags = make_flights("A", 10);
    for (auto& t : tags) t.fleet = Membership::training;
    DatasetSplit split = split_flights(tags, 5);
    const auto dir = std::filesystem::temp_directory_path();
    const std::string spath = (dir / "ffdg_split_rt.csv").string();
    write_split_csv(split, spath);
    const DatasetSplit back = read_split_csv(spath);
    REQUIRE(back.flights.size() == split.flights.size());
    for (std::size_t i = 0; i < split.flights.size(); ++i) {
        CHECK(back.flights[i].flight_id == split.flights[i].flight_id);
        CHECK(back.flights[i].subset == split.flights[i].subset);
        CHECK(back.flights[i].fleet == split.flights[i].fleet);
    }
    std::remove(spath.c_str());

    DatasetMeta meta;
    meta.seed = 42;
    meta.prng = std::string(kPrngAlgorithm);
    meta.fleet_hash = "00ff00ff00ff00ff";
    meta.tool_version = "ffdg test";
    const std::string mpath = (dir / "ffdg_meta_rt.meta").string();
    write_dataset_meta(meta, mpath);
    const DatasetMeta mb = read_dataset_meta(mpath);
    CHECK(mb.seed == meta.seed);
    CHECK(mb.prng == meta.prng);
    CHECK(mb.fleet_hash == meta.fleet_hash);
    CHECK(mb.tool_version == meta.tool_version);
    std::remove(mpath.c_str());
}

TEST_CASE("flight-basis leakage check: subsets never share a flight") {
    std::vector<FlightTag> tags = make_flights("A", 40);
    const DatasetSplit split = split_flights(tags, 3);
    std::set<std::string> train, others;
    for (const FlightTag& t : split.flights)
        (t.subset == Subset::train ? train : others).insert(t.flight_id);
    for (const std::string& id : others) CHECK(train.count(id) == 0);
}
