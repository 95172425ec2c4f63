#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ffdg/fleet.hpp"
#include "ffdg/rng.hpp"

namespace ffdg {

// One point on the 4-second grid, in the mixed aviation units the downstream
// model consumes directly.
struct StateSample {
    double t = 0.0;             // s
    double altitude = 0.0;      // ft
    double vertical_rate = 0.0; // ft/min
    double ground_speed = 0.0;  // kt
    double tas = 0.0;           // kt
    double ground_accel = 0.0;  // kt/s
    double air_accel = 0.0;     // kt/s
    double temperature = 0.0;   // K
};

inline constexpr double kSampleDtSeconds = 4.0;

struct Trajectory {
    std::string type_code;
    std::string flight_id;
    std::vector<StateSample> samples;
};

// Per-flight profile drawn from seeded ranges scaled by the aircraft
// envelope (hmo, mmo, vmo).
struct FlightProfile {
    double cruise_altitude = 0.0;  // ft, <= hmo
    double climb_cas = 0.0;        // kt, low-altitude speed target
    double cruise_mach = 0.0;      // <= mmo
    double descent_rate = 0.0;     // ft/min, positive magnitude
    double cruise_duration = 0.0;  // s
    double wind_offset = 0.0;      // kt, ground_speed - tas
    double temp_offset = 0.0;      // K added to ISA
    double initial_climb_rate = 0.0;  // ft/min at liftoff
    double liftoff_tas = 0.0;      // kt
    double approach_tas = 0.0;     // kt
};

FlightProfile draw_profile(const AircraftSpec& spec, Xoshiro256pp& rng);

// Deterministic kinematic climb/cruise/descent synthesis for one profile.
// Samples land on the strict 4-second grid; accelerations are filled by
// smooth_derivatives before returning.
Trajectory generate_with_profile(const AircraftSpec& spec, const FlightProfile& profile,
                                 std::uint64_t seed);

// Draws profiles until one yields a valid trajectory (at most 10 attempts).
Trajectory generate_trajectory(const AircraftSpec& spec, std::uint64_t profile_seed);

// 8-second (3-point) moving average of ground_speed / tas followed by a
// centered first difference; endpoints use the partial window and one-sided
// differences.
Trajectory smooth_derivatives(const Trajectory& traj);

// Grid step, sample count, temperature range, non-negative speeds.
void validate_trajectory(const Trajectory& traj);

// trajectory CSV: one file holds many flights, rows grouped per flight in
// time order
void write_trajectories_csv(const std::vector<Trajectory>& trajs, const std::string& path);
std::vector<Trajectory> read_trajectories_csv(const std::string& path);

}  // namespace ffdg
