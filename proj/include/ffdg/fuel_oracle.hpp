#pragma once

#include <vector>

#include "ffdg/fleet.hpp"
#include "ffdg/trajectory.hpp"

namespace ffdg {

// Total-energy fuel-flow label source. Closed-form, deterministic and smooth
// in all inputs:
//
//   rho  = ISA density at altitude
//   V    = TAS (m/s)
//   CL   = 2 m g / (rho V^2 S)
//   CD   = 0.021 + CL^2 / (pi AR e),   AR = span^2 / S, e = 0.80
//   D    = 1/2 rho V^2 S CD
//   T    = D + m a_air + m g vs / V          (required thrust)
//   c0   = 1.8e-5 (8 / (bypass_ratio + 1))^0.3        turbofan
//        = 2.2e-5 (rated_power / 3000 hp)^-0.1        turboprop
//   TSFC = c0 (1 + M) sqrt(T_amb / 288.15)
//   FF   = TSFC max(T, 0), clamped to
//          [n_engines ff_idle, 1.05 n_engines ff_takeoff]
//
// Mach and the TSFC temperature factor use the sampled air temperature;
// density is taken from ISA at the sampled altitude.
double oracle_fuel_flow(const StateSample& state, const AircraftSpec& spec, double mass_kg);

// Lower/upper clamp applied to every label.
double oracle_floor(const AircraftSpec& spec);
double oracle_ceiling(const AircraftSpec& spec);

// Mass bookkeeping across one flight: m[0] = takeoff_mass and
// m[i+1] = m[i] - FF_i * 4 s. Throws ValidationError naming the flight if
// the mass would fall to or below OEW.
struct MassSeries {
    std::vector<double> mass;       // kg, one entry per sample
    std::vector<double> fuel_flow;  // kg/s, oracle value at each sample
};
MassSeries integrate_mass(const Trajectory& traj, const AircraftSpec& spec, double takeoff_mass);

}  // namespace ffdg
