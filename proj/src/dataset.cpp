#include "ffdg/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>

#include "ffdg/csv.hpp"
#include "ffdg/errors.hpp"
#include "ffdg/rng.hpp"

namespace ffdg {

const std::array<const char*, 7> ObservationTable::kStateNames = {
    "altitude", "vertical_rate", "ground_speed", "tas",
    "ground_accel", "air_accel", "temperature"};

std::int32_t ObservationTable::intern_type(const std::string& type_code,
                                           const std::vector<double>& features) {
    if (features.size() != kSpecFeatureCount)
        throw ValidationError("intern_type: expected " + std::to_string(kSpecFeatureCount) +
                              " spec features");
    const auto it = type_lookup_.find(type_code);
    if (it != type_lookup_.end()) {
        if (spec_features_[it->second] != features)
            throw ValidationError("intern_type: conflicting spec features for " + type_code);
        return it->second;
    }
    const auto id = static_cast<std::int32_t>(type_codes_.size());
    type_codes_.push_back(type_code);
    spec_features_.push_back(features);
    type_lookup_.emplace(type_code, id);
    return id;
}

std::int32_t ObservationTable::intern_flight(const std::string& flight_id, std::int32_t type) {
    const auto it = flight_lookup_.find(flight_id);
    if (it != flight_lookup_.end()) {
        if (flight_type_[it->second] != type)
            throw ValidationError("intern_flight: flight " + flight_id + " changes type");
        return it->second;
    }
    const auto id = static_cast<std::int32_t>(flight_ids_.size());
    flight_ids_.push_back(flight_id);
    flight_type_.push_back(type);
    flight_lookup_.emplace(flight_id, id);
    return id;
}

void ObservationTable::append_row(std::int32_t type, std::int32_t flight, int mass_variant_pct,
                                  const StateSample& state, double mass, double target_ff) {
    type_idx_.push_back(type);
    flight_idx_.push_back(flight);
    mass_variant_.push_back(static_cast<std::int8_t>(mass_variant_pct));
    state_[0].push_back(state.altitude);
    state_[1].push_back(state.vertical_rate);
    state_[2].push_back(state.ground_speed);
    state_[3].push_back(state.tas);
    state_[4].push_back(state.ground_accel);
    state_[5].push_back(state.air_accel);
    state_[6].push_back(state.temperature);
    mass_.push_back(mass);
    target_ff_.push_back(target_ff);
}

void ObservationTable::reserve(std::size_t rows) {
    type_idx_.reserve(rows);
    flight_idx_.reserve(rows);
    mass_variant_.reserve(rows);
    for (auto& col : state_) col.reserve(rows);
    mass_.reserve(rows);
    target_ff_.reserve(rows);
}

long long ObservationTable::find_type(std::string_view code) const {
    const auto it = type_lookup_.find(std::string(code));
    return it == type_lookup_.end() ? -1 : it->second;
}

long long ObservationTable::find_flight(std::string_view id) const {
    const auto it = flight_lookup_.find(std::string(id));
    return it == flight_lookup_.end() ? -1 : it->second;
}

void expand_mass_grid(const Trajectory& traj, const AircraftSpec& spec, ObservationTable& table,
                      const MassGridOptions& opt,
                      const std::function<void(const std::string&)>& warn) {
    validate_trajectory(traj);
    const std::int32_t type = table.intern_type(spec.type_code, spec_feature_vector(spec));
    const std::int32_t flight = table.intern_flight(traj.flight_id, type);
    for (const int pct : kMassVariantsPct) {
        const double takeoff_mass = spec.mtow * static_cast<double>(pct) / 100.0;
        if (takeoff_mass <= spec.oew) continue;
        MassSeries series;
        try {
            series = integrate_mass(traj, spec, takeoff_mass);
        } catch (const ValidationError& e) {
            if (warn) warn("dropping " + std::to_string(pct) + "% variant: " + e.what());
            continue;
        }
        for (std::size_t i = 0; i < traj.samples.size(); ++i) {
            const double mass = opt.fixed_takeoff_mass ? takeoff_mass : series.mass[i];
            table.append_row(type, flight, pct, traj.samples[i], mass, series.fuel_flow[i]);
        }
    }
}

// ---------------------------------------------------------------------------
// splits

Subset DatasetSplit::subset_of(std::string_view flight_id) const {
    for (const FlightTag& t : flights)
        if (t.flight_id == flight_id) return t.subset;
    throw ValidationError("split: unknown flight " + std::string(flight_id));
}

void DatasetSplit::validate() const {
    std::map<std::string_view, int> seen;
    for (const FlightTag& t : flights)
        if (++seen[t.flight_id] > 1)
            throw ValidationError("split: flight " + t.flight_id +
                                  " appears in more than one subset");
}

DatasetSplit split_flights(const std::vector<FlightTag>& flights, std::uint64_t seed) {
    // group per type, preserving first-appearance order
    std::vector<std::string> type_order;
    std::map<std::string, std::vector<std::size_t>> by_type;
    for (std::size_t i = 0; i < flights.size(); ++i) {
        auto& group = by_type[flights[i].type_code];
        if (group.empty()) type_order.push_back(flights[i].type_code);
        group.push_back(i);
    }

    DatasetSplit split;
    split.flights = flights;
    for (const std::string& type : type_order) {
        std::vector<std::size_t>& group = by_type[type];
        const std::size_t n = group.size();
        if (n < 10)
            throw ValidationError("split_flights: type " + type + " has only " +
                                  std::to_string(n) + " flights, need at least 10");
        // per-type stream so the result does not depend on type enumeration order
        Xoshiro256pp rng(derive_seed(seed, "split", fnv1a64(type)));
        for (std::size_t i = n - 1; i > 0; --i)
            std::swap(group[i], group[rng.below(i + 1)]);
        const std::size_t n_train = static_cast<std::size_t>(0.8 * static_cast<double>(n));
        const std::size_t n_val = static_cast<std::size_t>(0.1 * static_cast<double>(n));
        for (std::size_t k = 0; k < n; ++k) {
            Subset s = Subset::test;
            if (k < n_train)
                s = Subset::train;
            else if (k < n_train + n_val)
                s = Subset::val;
            split.flights[group[k]].subset = s;
        }
    }
    split.validate();
    return split;
}

namespace {
const std::vector<std::string> kSplitHeader = {"flight_id", "type_code", "fleet", "set"};
}

void write_split_csv(const DatasetSplit& split, const std::string& path) {
    csv::Writer w(path);
    w.header(kSplitHeader);
    for (const FlightTag& t : split.flights) {
        w.field(std::string_view(t.flight_id));
        w.field(std::string_view(t.type_code));
        w.field(std::string_view(t.fleet == Membership::training ? "primary" : "generalization"));
        const char* s = t.subset == Subset::train ? "train" : t.subset == Subset::val ? "val" : "test";
        w.field(std::string_view(s));
        w.end_row();
    }
    w.close();
}

DatasetSplit read_split_csv(const std::string& path) {
    csv::Reader reader(path, kSplitHeader);
    DatasetSplit split;
    std::vector<std::string_view> f;
    while (reader.next(f)) {
        FlightTag t;
        t.flight_id = std::string(f[0]);
        t.type_code = std::string(f[1]);
        if (f[2] == "primary")
            t.fleet = Membership::training;
        else if (f[2] == "generalization")
            t.fleet = Membership::generalization;
        else
            throw ValidationError(path + ":" + std::to_string(reader.line_no()) +
                                  ": fleet must be primary or generalization");
        if (f[3] == "train")
            t.subset = Subset::train;
        else if (f[3] == "val")
            t.subset = Subset::val;
        else if (f[3] == "test")
            t.subset = Subset::test;
        else
            throw ValidationError(path + ":" + std::to_string(reader.line_no()) +
                                  ": set must be train, val or test");
        split.flights.push_back(std::move(t));
    }
    split.validate();
    return split;
}

// ---------------------------------------------------------------------------
// dataset file

namespace {

std::vector<std::string> dataset_header() {
    std::vector<std::string> h = {"flight_id", "type_code", "mass_variant"};
    for (const char* n : ObservationTable::kStateNames) h.emplace_back(n);
    h.emplace_back("mass");
    for (const std::string& n : spec_feature_names()) h.push_back(n);
    h.emplace_back("target_ff");
    return h;
}

}  // namespace

void write_dataset(const ObservationTable& table, const std::string& path) {
    csv::Writer w(path);
    w.header(dataset_header());
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const std::int32_t type = table.type_idx_[r];
        w.field(std::string_view(table.flight_ids_[table.flight_idx_[r]]));
        w.field(std::string_view(table.type_codes_[type]));
        w.field(static_cast<long long>(table.mass_variant_[r]));
        for (std::size_t k = 0; k < 7; ++k) w.field(table.state_[k][r]);
        w.field(table.mass_[r]);
        for (const double v : table.spec_features_[type]) w.field(v);
        w.field(table.target_ff_[r]);
        w.end_row();
    }
    w.close();
}

ObservationTable read_dataset(const std::string& path) {
    csv::Reader reader(path, dataset_header());
    ObservationTable table;
    std::vector<std::string_view> f;
    std::vector<double> features(kSpecFeatureCount);
    while (reader.next(f)) {
        const std::size_t ln = reader.line_no();
        std::size_t col = 3;
        StateSample s;
        s.altitude = csv::parse_double(f[col++], path, ln);
        s.vertical_rate = csv::parse_double(f[col++], path, ln);
        s.ground_speed = csv::parse_double(f[col++], path, ln);
        s.tas = csv::parse_double(f[col++], path, ln);
        s.ground_accel = csv::parse_double(f[col++], path, ln);
        s.air_accel = csv::parse_double(f[col++], path, ln);
        s.temperature = csv::parse_double(f[col++], path, ln);
        const double mass = csv::parse_double(f[col++], path, ln);
        for (std::size_t k = 0; k < kSpecFeatureCount; ++k)
            features[k] = csv::parse_double(f[col++], path, ln);
        const double target = csv::parse_double(f[col++], path, ln);
        const long long variant = csv::parse_int(f[2], path, ln);

        const std::int32_t type = table.intern_type(std::string(f[1]), features);
        const std::int32_t flight = table.intern_flight(std::string(f[0]), type);
        table.append_row(type, flight, static_cast<int>(variant), s, mass, target);
    }
    return table;
}

// ---------------------------------------------------------------------------
// meta sidecar

void write_dataset_meta(const DatasetMeta& meta, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << "seed = " << meta.seed << "\n";
    out << "prng = " << meta.prng << "\n";
    out << "fleet_hash = " << meta.fleet_hash << "\n";
    out << "tool_version = " << meta.tool_version << "\n";
}

DatasetMeta read_dataset_meta(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    DatasetMeta meta;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
            const std::size_t b = s.find_first_not_of(" \t");
            const std::size_t e = s.find_last_not_of(" \t\r");
            s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
        };
        trim(key);
        trim(value);
        if (key == "seed") meta.seed = std::stoull(value);
        else if (key == "prng") meta.prng = value;
        else if (key == "fleet_hash") meta.fleet_hash = value;
        else if (key == "tool_version") meta.tool_version = value;
    }
    return meta;
}

}  // namespace ffdg
