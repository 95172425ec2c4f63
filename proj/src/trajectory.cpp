#include "ffdg/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "ffdg/atmosphere.hpp"
#include "ffdg/csv.hpp"
#include "ffdg/errors.hpp"

namespace ffdg {

FlightProfile draw_profile(const AircraftSpec& spec, Xoshiro256pp& rng) {
    FlightProfile p;
    p.cruise_altitude = std::floor(rng.uniform(0.62, 0.92) * spec.hmo / 100.0) * 100.0;
    p.climb_cas = rng.uniform(0.60, 0.70) * spec.vmo;
    p.cruise_mach = rng.uniform(0.80, 0.94) * spec.mmo;
    const bool turboprop = spec.engine_type == EngineType::turboprop;
    p.descent_rate = turboprop ? rng.uniform(1100.0, 1600.0) : rng.uniform(1500.0, 2200.0);
    p.cruise_duration = rng.uniform(1200.0, 2700.0);
    p.wind_offset = rng.uniform(-50.0, 50.0);
    p.temp_offset = rng.uniform(-10.0, 10.0);
    p.initial_climb_rate = turboprop ? rng.uniform(1300.0, 1700.0) : rng.uniform(2200.0, 2800.0);
    p.liftoff_tas = turboprop ? rng.uniform(110.0, 130.0) : rng.uniform(140.0, 165.0);
    p.approach_tas = turboprop ? rng.uniform(110.0, 125.0) : rng.uniform(135.0, 155.0);
    return p;
}

namespace {

double cruise_tas_kt(const AircraftSpec& spec, const FlightProfile& p) {
    const double a = sound_speed_mps(isa_temperature(p.cruise_altitude)) / kKtToMps;
    const double mach_tas = p.cruise_mach * a;
    // VMO is a calibrated-airspeed limit; convert to TAS via the density ratio
    const double sigma = isa_density(p.cruise_altitude) / isa_density(0.0);
    const double vmo_tas = spec.vmo / std::sqrt(sigma);
    return std::min(mach_tas, vmo_tas);
}

}  // namespace

Trajectory generate_with_profile(const AircraftSpec& spec, const FlightProfile& profile,
                                 std::uint64_t seed) {
    Xoshiro256pp rng(derive_seed(seed, "traj-wiggle"));
    const double phase_vr = rng.uniform(0.0, 2.0 * M_PI);
    const double phase_alt = rng.uniform(0.0, 2.0 * M_PI);
    const double phase_tas = rng.uniform(0.0, 2.0 * M_PI);
    const double cruise_vr_amp = rng.uniform(20.0, 70.0);  // ft/min, keeps cruise level

    const double cruise_tas = cruise_tas_kt(spec, profile);
    const double dt = kSampleDtSeconds;

    Trajectory traj;
    traj.type_code = spec.type_code;

    double alt = 0.0;
    double t = 0.0;
    enum { kClimb, kCruise, kDescent, kDone } phase = kClimb;
    double cruise_elapsed = 0.0;

    while (phase != kDone) {
        StateSample s;
        s.t = t;
        s.altitude = alt;
        double vr = 0.0;
        double tas = 0.0;
        switch (phase) {
            case kClimb: {
                const double progress = std::min(alt / profile.cruise_altitude, 1.0);
                vr = profile.initial_climb_rate * (1.0 - 0.65 * progress);
                vr += 60.0 * std::sin(2.0 * M_PI * t / 600.0 + phase_vr);
                tas = profile.liftoff_tas +
                      (cruise_tas - profile.liftoff_tas) * std::pow(progress, 0.8);
                break;
            }
            case kCruise: {
                vr = cruise_vr_amp * std::sin(2.0 * M_PI * t / 900.0 + phase_alt);
                tas = cruise_tas * (1.0 + 0.004 * std::sin(2.0 * M_PI * t / 700.0 + phase_tas));
                break;
            }
            case kDescent: {
                const double taper = std::clamp(alt / 3000.0, 0.0, 1.0);
                vr = -std::max(600.0, profile.descent_rate * taper);
                const double progress = std::clamp(alt / profile.cruise_altitude, 0.0, 1.0);
                tas = profile.approach_tas +
                      (cruise_tas - profile.approach_tas) * std::pow(progress, 0.7);
                break;
            }
            case kDone:
                break;
        }
        s.vertical_rate = vr;
        s.tas = tas;
        s.ground_speed = std::max(tas + profile.wind_offset, 0.0);
        s.temperature = isa_temperature(alt) + profile.temp_offset;
        traj.samples.push_back(s);

        alt += vr * dt / 60.0;
        t += dt;
        switch (phase) {
            case kClimb:
                if (alt >= profile.cruise_altitude) {
                    alt = profile.cruise_altitude;
                    phase = kCruise;
                }
                break;
            case kCruise:
                cruise_elapsed += dt;
                if (cruise_elapsed >= profile.cruise_duration) phase = kDescent;
                break;
            case kDescent:
                if (alt <= 0.0) {
                    alt = 0.0;
                    phase = kDone;
                }
                break;
            case kDone:
                break;
        }
    }

    return smooth_derivatives(traj);
}

Trajectory generate_trajectory(const AircraftSpec& spec, std::uint64_t profile_seed) {
    for (int attempt = 0; attempt < 10; ++attempt) {
        Xoshiro256pp rng(derive_seed(profile_seed, "profile", attempt));
        const FlightProfile profile = draw_profile(spec, rng);
        Trajectory traj =
            generate_with_profile(spec, profile, derive_seed(profile_seed, "kinematics", attempt));
        try {
            validate_trajectory(traj);
        } catch (const ValidationError&) {
            continue;  // redraw the profile
        }
        return traj;
    }
    throw ValidationError("generate_trajectory: no feasible profile for " + spec.type_code +
                          " after 10 attempts");
}

Trajectory smooth_derivatives(const Trajectory& traj) {
    const std::size_t n = traj.samples.size();
    if (n < 3) throw ValidationError("smooth_derivatives: need at least 3 samples");
    Trajectory out = traj;

    // endpoints keep the raw value (no shifted-center window), so linear
    // speed ramps smooth to themselves
    const auto smooth = [n](const std::vector<double>& v, std::vector<double>& ma) {
        ma.resize(n);
        ma[0] = v[0];
        for (std::size_t i = 1; i + 1 < n; ++i) ma[i] = (v[i - 1] + v[i] + v[i + 1]) / 3.0;
        ma[n - 1] = v[n - 1];
    };

    std::vector<double> gs(n), tas(n), ma;
    for (std::size_t i = 0; i < n; ++i) {
        gs[i] = traj.samples[i].ground_speed;
        tas[i] = traj.samples[i].tas;
    }

    smooth(gs, ma);
    out.samples[0].ground_accel = (ma[1] - ma[0]) / kSampleDtSeconds;
    for (std::size_t i = 1; i + 1 < n; ++i)
        out.samples[i].ground_accel = (ma[i + 1] - ma[i - 1]) / (2.0 * kSampleDtSeconds);
    out.samples[n - 1].ground_accel = (ma[n - 1] - ma[n - 2]) / kSampleDtSeconds;

    smooth(tas, ma);
    out.samples[0].air_accel = (ma[1] - ma[0]) / kSampleDtSeconds;
    for (std::size_t i = 1; i + 1 < n; ++i)
        out.samples[i].air_accel = (ma[i + 1] - ma[i - 1]) / (2.0 * kSampleDtSeconds);
    out.samples[n - 1].air_accel = (ma[n - 1] - ma[n - 2]) / kSampleDtSeconds;

    return out;
}

void validate_trajectory(const Trajectory& traj) {
    if (traj.samples.size() < 30)
        throw ValidationError("trajectory " + traj.flight_id + ": fewer than 30 samples");
    for (std::size_t i = 0; i < traj.samples.size(); ++i) {
        const StateSample& s = traj.samples[i];
        if (i > 0 && s.t != traj.samples[i - 1].t + kSampleDtSeconds)
            throw ValidationError("trajectory " + traj.flight_id + ": sample " +
                                  std::to_string(i) + " off the 4-second grid");
        if (!(s.temperature >= 180.0 && s.temperature <= 330.0))
            throw ValidationError("trajectory " + traj.flight_id + ": temperature " +
                                  csv::format_double(s.temperature) + " K out of range");
        if (!(s.tas >= 0.0))
            throw ValidationError("trajectory " + traj.flight_id + ": negative TAS");
    }
}

// ---------------------------------------------------------------------------
// CSV

namespace {
const std::vector<std::string> kTrajHeader = {
    "flight_id", "type_code",    "t",   "altitude",     "vertical_rate",
    "ground_speed", "tas", "ground_accel", "air_accel", "temperature"};
}

void write_trajectories_csv(const std::vector<Trajectory>& trajs, const std::string& path) {
    csv::Writer w(path);
    w.header(kTrajHeader);
    for (const Trajectory& traj : trajs) {
        for (const StateSample& s : traj.samples) {
            w.field(std::string_view(traj.flight_id));
            w.field(std::string_view(traj.type_code));
            w.field(s.t);
            w.field(s.altitude);
            w.field(s.vertical_rate);
            w.field(s.ground_speed);
            w.field(s.tas);
            w.field(s.ground_accel);
            w.field(s.air_accel);
            w.field(s.temperature);
            w.end_row();
        }
    }
    w.close();
}

std::vector<Trajectory> read_trajectories_csv(const std::string& path) {
    csv::Reader reader(path, kTrajHeader);
    std::vector<Trajectory> out;
    std::vector<std::string_view> f;
    while (reader.next(f)) {
        const std::size_t ln = reader.line_no();
        if (out.empty() || out.back().flight_id != f[0]) {
            Trajectory t;
            t.flight_id = std::string(f[0]);
            t.type_code = std::string(f[1]);
            out.push_back(std::move(t));
        } else if (out.back().type_code != f[1]) {
            throw ValidationError(path + ":" + std::to_string(ln) +
                                  ": flight changes type_code mid-file");
        }
        StateSample s;
        s.t = csv::parse_double(f[2], path, ln);
        s.altitude = csv::parse_double(f[3], path, ln);
        s.vertical_rate = csv::parse_double(f[4], path, ln);
        s.ground_speed = csv::parse_double(f[5], path, ln);
        s.tas = csv::parse_double(f[6], path, ln);
        s.ground_accel = csv::parse_double(f[7], path, ln);
        s.air_accel = csv::parse_double(f[8], path, ln);
        s.temperature = csv::parse_double(f[9], path, ln);
        out.back().samples.push_back(s);
    }
    for (const Trajectory& t : out) validate_trajectory(t);
    return out;
}

}  // namespace ffdg
