#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ffdg {

enum class EngineType : std::uint8_t { turbofan, turboprop };
enum class Membership : std::uint8_t { training, generalization };

// Static aircraft + engine characteristics. Numeric fields use NaN to mark a
// value as missing before imputation.
struct AircraftSpec {
    std::string type_code;
    double wing_area = NAN;   // m^2
    double span = NAN;        // m
    double length = NAN;      // m
    double mtow = NAN;        // kg
    double oew = NAN;         // kg
    double mmo = NAN;         // Mach
    double vmo = NAN;         // kt
    double hmo = NAN;         // ft
    EngineType engine_type = EngineType::turbofan;
    double n_engines = NAN;
    double rated_power = NAN;    // hp per engine (turboprop reference)
    double rated_thrust = NAN;   // kN per engine (turbofan reference)
    double bypass_ratio = NAN;
    double pressure_ratio = NAN;
    double ff_takeoff = NAN;   // kg/s per engine
    double ff_climb = NAN;     // kg/s per engine
    double ff_approach = NAN;  // kg/s per engine
    double ff_idle = NAN;      // kg/s per engine
};

struct NumericFeature {
    const char* name;
    double AircraftSpec::* field;
};

// Declaration order is the imputation order, the CSV column order, and the
// model-input order; keep it stable.
inline constexpr std::array<NumericFeature, 17> kNumericFeatures{{
    {"wing_area", &AircraftSpec::wing_area},
    {"span", &AircraftSpec::span},
    {"length", &AircraftSpec::length},
    {"mtow", &AircraftSpec::mtow},
    {"oew", &AircraftSpec::oew},
    {"mmo", &AircraftSpec::mmo},
    {"vmo", &AircraftSpec::vmo},
    {"hmo", &AircraftSpec::hmo},
    {"n_engines", &AircraftSpec::n_engines},
    {"rated_power", &AircraftSpec::rated_power},
    {"rated_thrust", &AircraftSpec::rated_thrust},
    {"bypass_ratio", &AircraftSpec::bypass_ratio},
    {"pressure_ratio", &AircraftSpec::pressure_ratio},
    {"ff_takeoff", &AircraftSpec::ff_takeoff},
    {"ff_climb", &AircraftSpec::ff_climb},
    {"ff_approach", &AircraftSpec::ff_approach},
    {"ff_idle", &AircraftSpec::ff_idle},
}};

// One-hot engine-type columns appended after the numeric features wherever a
// full spec feature vector is needed (distance, model input, dataset files).
inline constexpr std::array<const char*, 2> kEngineOneHotNames{"engine_turbofan",
                                                               "engine_turboprop"};
inline constexpr std::size_t kSpecFeatureCount = kNumericFeatures.size() + 2;

// Numeric features + engine one-hot, in declaration order (19 values).
std::vector<double> spec_feature_vector(const AircraftSpec& spec);
std::vector<std::string> spec_feature_names();

bool has_missing(const AircraftSpec& spec);

// Throws ValidationError if a complete spec violates the physical invariants
// (mass ordering, positive geometry, fuel-flow ordering).
void validate_spec(const AircraftSpec& spec);

struct Fleet {
    std::vector<AircraftSpec> specs;
    std::vector<Membership> membership;  // parallel to specs

    std::size_t size() const { return specs.size(); }
    // Index of type_code, or -1.
    long long find(std::string_view type_code) const;
    std::vector<std::size_t> training_indices() const;
    std::vector<std::size_t> generalization_indices() const;
};

// Uniqueness of type codes plus per-spec invariants for complete specs.
void validate_fleet(const Fleet& fleet);

Fleet read_fleet_csv(const std::string& path);
void write_fleet_csv(const Fleet& fleet, const std::string& path);

// Iterative linear-regression imputation: missing cells start at the column
// mean, then each feature in declaration order is regressed on all other
// numeric features and its missing cells are re-predicted, for up to
// max_rounds rounds or until the largest change falls below 1e-6 of the
// feature's standard deviation. max_rounds = 0 leaves the mean fill.
Fleet impute_missing(const Fleet& fleet, int max_rounds = 10);

// Per-feature empirical-CDF map to [0, 1] with linear interpolation between
// quantile anchors and clamping outside the fitted range.
class QuantileMap {
public:
    static QuantileMap fit(const std::vector<std::vector<double>>& columns,
                           std::vector<std::string> names, int n_quantiles = 1000);

    double map(std::size_t feature, double value) const;
    std::size_t feature_index(std::string_view name) const;  // throws if unknown

    const std::vector<std::string>& names() const { return names_; }
    int n_quantiles() const { return n_quantiles_; }

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> anchors_;  // monotone non-decreasing grids
    int n_quantiles_ = 0;
};

// Quantile map over the 19 spec feature columns of the whole fleet
// (training + generalization members).
QuantileMap fit_fleet_quantile_map(const Fleet& fleet);

// Spec features mapped through qmap, in qmap's feature order.
std::vector<double> mapped_feature_vector(const AircraftSpec& spec, const QuantileMap& qmap);

// Euclidean norm between quantile-mapped feature vectors.
double pseudo_distance(const AircraftSpec& a, const AircraftSpec& b, const QuantileMap& qmap);

// Minimum pseudo-distance to any training member, ties broken by
// lexicographically smaller type code.
struct ClosestResult {
    double distance;
    std::string type_code;
};
ClosestResult closest_training_distance(const AircraftSpec& spec, const Fleet& fleet,
                                        const QuantileMap& qmap);

// Synthetic fleet: families of related variants so that within-family
// distances are small and some generalization types sit near training
// families while others sit far away.
struct SynthFleetOptions {
    int n_train = 16;
    int n_gen = 8;
    std::uint64_t seed = 42;
    double missing_frac = 0.0;  // fraction of imputable numeric cells blanked
};
Fleet synthesize_fleet(const SynthFleetOptions& opt);

}  // namespace ffdg
