#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ffdg/fleet.hpp"
#include "ffdg/fuel_oracle.hpp"
#include "ffdg/trajectory.hpp"

namespace ffdg {

inline constexpr std::array<int, 6> kMassVariantsPct{70, 75, 80, 85, 90, 95};

// Column-oriented observation store. Identifiers are interned; the 19 spec
// feature values are stored once per type and written out denormalized, so a
// file round-trip reproduces every row exactly.
class ObservationTable {
public:
    static const std::array<const char*, 7> kStateNames;  // altitude..temperature

    // interning
    std::int32_t intern_type(const std::string& type_code, const std::vector<double>& features);
    std::int32_t intern_flight(const std::string& flight_id, std::int32_t type);

    void append_row(std::int32_t type, std::int32_t flight, int mass_variant_pct,
                    const StateSample& state, double mass, double target_ff);

    std::size_t n_rows() const { return mass_.size(); }
    std::size_t n_types() const { return type_codes_.size(); }
    std::size_t n_flights() const { return flight_ids_.size(); }

    const std::string& type_code(std::int32_t t) const { return type_codes_[t]; }
    const std::vector<double>& type_features(std::int32_t t) const { return spec_features_[t]; }
    const std::string& flight_id(std::int32_t f) const { return flight_ids_[f]; }
    std::int32_t flight_type(std::int32_t f) const { return flight_type_[f]; }
    long long find_type(std::string_view code) const;
    long long find_flight(std::string_view id) const;

    std::int32_t row_type(std::size_t r) const { return type_idx_[r]; }
    std::int32_t row_flight(std::size_t r) const { return flight_idx_[r]; }
    int row_mass_variant(std::size_t r) const { return mass_variant_[r]; }
    double state(std::size_t r, std::size_t feature) const { return state_[feature][r]; }
    double mass(std::size_t r) const { return mass_[r]; }
    double target(std::size_t r) const { return target_ff_[r]; }
    double vertical_rate(std::size_t r) const { return state_[1][r]; }

    void reserve(std::size_t rows);

private:
    friend ObservationTable read_dataset(const std::string& path);
    friend void write_dataset(const ObservationTable& table, const std::string& path);

    std::vector<std::string> type_codes_;
    std::vector<std::vector<double>> spec_features_;  // per type, 19 values
    std::unordered_map<std::string, std::int32_t> type_lookup_;
    std::vector<std::string> flight_ids_;
    std::vector<std::int32_t> flight_type_;
    std::unordered_map<std::string, std::int32_t> flight_lookup_;

    std::vector<std::int32_t> type_idx_;
    std::vector<std::int32_t> flight_idx_;
    std::vector<std::int8_t> mass_variant_;           // percent of MTOW
    std::array<std::vector<double>, 7> state_;
    std::vector<double> mass_;
    std::vector<double> target_ff_;
};

// Six takeoff-mass variants of one trajectory, labeled by the oracle.
// Variants whose takeoff mass does not exceed OEW are skipped; variants that
// exhaust fuel mid-flight are dropped through the warn callback.
struct MassGridOptions {
    bool fixed_takeoff_mass = false;  // feed the constant takeoff mass instead
                                      // of the integrated instantaneous mass
};
void expand_mass_grid(const Trajectory& traj, const AircraftSpec& spec, ObservationTable& table,
                      const MassGridOptions& opt = {},
                      const std::function<void(const std::string&)>& warn = {});

enum class Subset : std::uint8_t { train, val, test };

struct FlightTag {
    std::string flight_id;
    std::string type_code;
    Membership fleet = Membership::training;
    Subset subset = Subset::train;
};

struct DatasetSplit {
    std::vector<FlightTag> flights;

    Subset subset_of(std::string_view flight_id) const;  // throws if unknown
    void validate() const;  // flight ids unique
};

// Per-type stratified 80/10/10 split on flight basis: counts are
// (floor(0.8 n), floor(0.1 n), remainder) after a seeded per-type shuffle.
// Requires at least 10 flights per type.
DatasetSplit split_flights(const std::vector<FlightTag>& flights, std::uint64_t seed);

void write_split_csv(const DatasetSplit& split, const std::string& path);
DatasetSplit read_split_csv(const std::string& path);

void write_dataset(const ObservationTable& table, const std::string& path);
ObservationTable read_dataset(const std::string& path);

// metadata sidecar (same basename, .meta): key = value lines recording the
// global seed, PRNG algorithm, fleet file hash and tool version
struct DatasetMeta {
    std::uint64_t seed = 0;
    std::string prng;
    std::string fleet_hash;
    std::string tool_version;
};
void write_dataset_meta(const DatasetMeta& meta, const std::string& path);
DatasetMeta read_dataset_meta(const std::string& path);

}  // namespace ffdg
