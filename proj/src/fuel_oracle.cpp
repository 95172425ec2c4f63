#include "ffdg/fuel_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "ffdg/atmosphere.hpp"
#include "ffdg/csv.hpp"
#include "ffdg/errors.hpp"

namespace ffdg {

namespace {
constexpr double kCd0 = 0.021;
constexpr double kOswald = 0.80;
}  // namespace

double oracle_floor(const AircraftSpec& spec) { return spec.n_engines * spec.ff_idle; }

double oracle_ceiling(const AircraftSpec& spec) {
    return 1.05 * spec.n_engines * spec.ff_takeoff;
}

double oracle_fuel_flow(const StateSample& state, const AircraftSpec& spec, double mass_kg) {
    if (!(mass_kg > spec.oew && mass_kg <= spec.mtow))
        throw ValidationError("oracle_fuel_flow: mass " + csv::format_double(mass_kg) +
                              " kg outside (oew, mtow] for " + spec.type_code);

    const double rho = isa_density(state.altitude);
    // floor keeps the lift/climb divisions defined; generated data never
    // comes near it
    const double v = std::max(state.tas * kKtToMps, 1.0);
    const double s = spec.wing_area;
    const double q = 0.5 * rho * v * v;

    const double cl = mass_kg * kGravity / (q * s);
    const double aspect_ratio = spec.span * spec.span / s;
    const double cd = kCd0 + cl * cl / (M_PI * aspect_ratio * kOswald);
    const double drag = q * s * cd;

    const double a_air = state.air_accel * kKtToMps;           // m/s^2
    const double vs = state.vertical_rate * kFtMinToMps;       // m/s
    const double thrust = drag + mass_kg * a_air + mass_kg * kGravity * vs / v;

    const double mach = v / sound_speed_mps(state.temperature);
    double c0;
    if (spec.engine_type == EngineType::turbofan) {
        c0 = 1.8e-5 * std::pow(8.0 / (spec.bypass_ratio + 1.0), 0.3);
    } else {
        c0 = 2.2e-5 * std::pow(spec.rated_power / 3000.0, -0.1);
    }
    const double tsfc = c0 * (1.0 + mach) * std::sqrt(state.temperature / kSeaLevelTempK);

    const double ff = tsfc * std::max(thrust, 0.0);
    return std::clamp(ff, oracle_floor(spec), oracle_ceiling(spec));
}

MassSeries integrate_mass(const Trajectory& traj, const AircraftSpec& spec,
                          double takeoff_mass) {
    if (!(takeoff_mass > spec.oew && takeoff_mass <= spec.mtow))
        throw ValidationError("integrate_mass: takeoff mass " +
                              csv::format_double(takeoff_mass) + " kg outside (oew, mtow] for " +
                              spec.type_code);
    MassSeries out;
    const std::size_t n = traj.samples.size();
    out.mass.resize(n);
    out.fuel_flow.resize(n);
    double m = takeoff_mass;
    for (std::size_t i = 0; i < n; ++i) {
        out.mass[i] = m;
        const double ff = oracle_fuel_flow(traj.samples[i], spec, m);
        out.fuel_flow[i] = ff;
        m -= ff * kSampleDtSeconds;
        if (m <= spec.oew)
            throw ValidationError("integrate_mass: fuel exhaustion on flight " + traj.flight_id +
                                  " at t=" + csv::format_double(traj.samples[i].t));
    }
    return out;
}

}  // namespace ffdg
