#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ffdg/errors.hpp"
#include "ffdg/fleet.hpp"
#include "ffdg/rng.hpp"

namespace ffdg {

namespace {

// A family archetype; variants jitter around it by a few percent, the way
// real aircraft families (A319/A320/A321, ATR42/72) cluster in
// characteristic space.
AircraftSpec draw_archetype(Xoshiro256pp& rng) {
    AircraftSpec s;
    const bool turboprop = rng.uniform01() < 0.22;
    const double size = rng.uniform01();  // 0 = small regional, 1 = heavy widebody
    if (turboprop) {
        s.engine_type = EngineType::turboprop;
        s.mtow = rng.uniform(15000.0, 28000.0);
        s.n_engines = 2.0;
        s.mmo = rng.uniform(0.45, 0.55);
        s.vmo = rng.uniform(230.0, 260.0);
        s.hmo = rng.uniform(24000.0, 28000.0);
        s.wing_area = s.mtow / rng.uniform(320.0, 420.0);
        s.bypass_ratio = rng.uniform(15.0, 25.0);
        s.pressure_ratio = rng.uniform(10.0, 16.0);
        s.rated_power = s.mtow / 1000.0 * rng.uniform(110.0, 140.0);
        s.rated_thrust = s.rated_power * rng.uniform(0.011, 0.014);
        s.ff_takeoff = s.rated_power * rng.uniform(6.5e-5, 8.0e-5);
    } else {
        s.engine_type = EngineType::turbofan;
        s.mtow = 35000.0 * std::pow(450000.0 / 35000.0, size);
        s.n_engines = size > 0.72 ? 4.0 : 2.0;
        s.mmo = rng.uniform(0.80, 0.90);
        s.vmo = rng.uniform(330.0, 365.0);
        s.hmo = rng.uniform(37000.0, 43000.0);
        s.wing_area = s.mtow / rng.uniform(550.0, 750.0);
        s.bypass_ratio = rng.uniform(4.8, 11.5);
        s.pressure_ratio = rng.uniform(24.0, 45.0);
        const double thrust_weight = rng.uniform(0.27, 0.33);
        s.rated_thrust = thrust_weight * s.mtow * 9.80665 / 1000.0 / s.n_engines;
        s.rated_power = s.rated_thrust * rng.uniform(180.0, 220.0);
        s.ff_takeoff = s.rated_thrust * rng.uniform(8.5e-3, 10.5e-3);
    }
    s.oew = s.mtow * rng.uniform(0.48, 0.58);
    const double aspect_ratio =
        turboprop ? rng.uniform(11.0, 13.0) : rng.uniform(8.5, 10.5);
    s.span = std::sqrt(aspect_ratio * s.wing_area);
    s.length = s.span * rng.uniform(0.95, 1.15);
    s.ff_climb = s.ff_takeoff * rng.uniform(0.78, 0.86);
    s.ff_approach = s.ff_takeoff * rng.uniform(0.28, 0.34);
    s.ff_idle = s.ff_takeoff * rng.uniform(0.08, 0.12);
    return s;
}

// Jitter tight enough that the fuel-flow ordering and oew < mtow survive.
AircraftSpec make_variant(const AircraftSpec& base, Xoshiro256pp& rng) {
    AircraftSpec s = base;
    const auto jitter = [&](double v, double frac) { return v * (1.0 + rng.uniform(-frac, frac)); };
    s.wing_area = jitter(base.wing_area, 0.04);
    s.span = jitter(base.span, 0.03);
    s.length = jitter(base.length, 0.05);
    s.mtow = jitter(base.mtow, 0.05);
    s.oew = jitter(base.oew, 0.04);
    s.mmo = jitter(base.mmo, 0.02);
    s.vmo = jitter(base.vmo, 0.02);
    s.hmo = std::min(jitter(base.hmo, 0.03), 43100.0);
    s.rated_power = jitter(base.rated_power, 0.05);
    s.rated_thrust = jitter(base.rated_thrust, 0.05);
    s.bypass_ratio = jitter(base.bypass_ratio, 0.04);
    s.pressure_ratio = jitter(base.pressure_ratio, 0.04);
    s.ff_takeoff = jitter(base.ff_takeoff, 0.03);
    s.ff_climb = jitter(base.ff_climb, 0.02);
    s.ff_approach = jitter(base.ff_approach, 0.02);
    s.ff_idle = jitter(base.ff_idle, 0.02);
    return s;
}

std::string family_code(int family) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "F%02d", family);
    return buf;
}

}  // namespace

Fleet synthesize_fleet(const SynthFleetOptions& opt) {
    if (opt.n_train < 1 || opt.n_gen < 0)
        throw ValidationError("synthesize_fleet: need n_train >= 1 and n_gen >= 0");
    Fleet fleet;
    Xoshiro256pp rng(derive_seed(opt.seed, "synth-fleet"));

    std::vector<AircraftSpec> archetypes;
    std::vector<int> variants_used;

    // training types: families of 2-4 variants
    int family = 0;
    while (static_cast<int>(fleet.specs.size()) < opt.n_train) {
        const AircraftSpec arch = draw_archetype(rng);
        const int n_variants =
            std::min<int>(2 + static_cast<int>(rng.below(3)),
                          opt.n_train - static_cast<int>(fleet.specs.size()));
        archetypes.push_back(arch);
        variants_used.push_back(n_variants);
        for (int v = 0; v < n_variants; ++v) {
            AircraftSpec s = make_variant(arch, rng);
            s.type_code = family_code(family) + "-" + std::to_string(v + 1);
            fleet.specs.push_back(std::move(s));
            fleet.membership.push_back(Membership::training);
        }
        ++family;
    }

    // generalization types: alternate near (new variant of a training family)
    // and far (fresh archetype), so the distance axis gets real spread
    for (int g = 0; g < opt.n_gen; ++g) {
        AircraftSpec s;
        if (g % 2 == 0 && !archetypes.empty()) {
            const std::size_t fam = rng.below(archetypes.size());
            s = make_variant(archetypes[fam], rng);
            s.type_code =
                family_code(static_cast<int>(fam)) + "-" + std::to_string(++variants_used[fam]);
        } else {
            s = make_variant(draw_archetype(rng), rng);
            s.type_code = family_code(family++) + "-1";
        }
        fleet.specs.push_back(std::move(s));
        fleet.membership.push_back(Membership::generalization);
    }

    // optionally blank a seeded fraction of cells, keeping every feature
    // observed at least twice so the fleet stays imputable
    if (opt.missing_frac > 0.0) {
        for (const auto& feat : kNumericFeatures) {
            std::vector<std::size_t> candidates;
            for (std::size_t i = 0; i < fleet.specs.size(); ++i) candidates.push_back(i);
            const std::size_t max_blank =
                candidates.size() > 2 ? candidates.size() - 2 : 0;
            std::size_t blanked = 0;
            for (const std::size_t i : candidates) {
                if (blanked >= max_blank) break;
                if (rng.uniform01() < opt.missing_frac) {
                    fleet.specs[i].*(feat.field) = NAN;
                    ++blanked;
                }
            }
        }
    }

    validate_fleet(fleet);
    return fleet;
}

}  // namespace ffdg
