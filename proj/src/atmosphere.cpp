#include "ffdg/atmosphere.hpp"

#include <algorithm>
#include <cmath>

namespace ffdg {

namespace {
constexpr double kLapsePerFt = 0.0019812;  // K/ft (0.0065 K/m on the 4-s grid units)
constexpr double kTropopauseTempK = 216.65;
// g / (L R) with L in K/m
const double kPressureExponent = kGravity / (0.0065 * kGasConstantAir);
}  // namespace

double isa_temperature(double altitude_ft) {
    const double alt = std::clamp(altitude_ft, 0.0, 60000.0);
    return alt <= kTropopauseFt ? kSeaLevelTempK - kLapsePerFt * alt : kTropopauseTempK;
}

double isa_pressure(double altitude_ft) {
    const double alt = std::clamp(altitude_ft, 0.0, 60000.0);
    if (alt <= kTropopauseFt) {
        const double t = kSeaLevelTempK - kLapsePerFt * alt;
        return kSeaLevelPressurePa * std::pow(t / kSeaLevelTempK, kPressureExponent);
    }
    const double p_trop =
        kSeaLevelPressurePa *
        std::pow((kSeaLevelTempK - kLapsePerFt * kTropopauseFt) / kSeaLevelTempK,
                 kPressureExponent);
    const double h_m = (alt - kTropopauseFt) * kFtToM;
    return p_trop * std::exp(-kGravity * h_m / (kGasConstantAir * kTropopauseTempK));
}

double isa_density(double altitude_ft) {
    return isa_pressure(altitude_ft) / (kGasConstantAir * isa_temperature(altitude_ft));
}

double sound_speed_mps(double temperature_k) {
    return std::sqrt(1.4 * kGasConstantAir * temperature_k);
}

}  // namespace ffdg
