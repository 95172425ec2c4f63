#pragma once

namespace ffdg {

// unit conversions
inline constexpr double kKtToMps = 1852.0 / 3600.0;
inline constexpr double kFtToM = 0.3048;
inline constexpr double kFtMinToMps = 0.3048 / 60.0;
inline constexpr double kGravity = 9.80665;       // m/s^2
inline constexpr double kGasConstantAir = 287.05287;  // J/(kg K)
inline constexpr double kSeaLevelTempK = 288.15;
inline constexpr double kSeaLevelPressurePa = 101325.0;
inline constexpr double kTropopauseFt = 36089.0;

// ISA temperature on the piecewise profile used throughout: linear lapse of
// 0.0019812 K/ft up to 36089 ft, isothermal 216.65 K above.
double isa_temperature(double altitude_ft);

double isa_pressure(double altitude_ft);   // Pa
double isa_density(double altitude_ft);    // kg/m^3

// Speed of sound for a given static air temperature.
double sound_speed_mps(double temperature_k);

}  // namespace ffdg
