#include "ffdg/fleet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <utility>

#include "ffdg/csv.hpp"
#include "ffdg/errors.hpp"
#include "ffdg/linalg.hpp"

namespace ffdg {

std::vector<std::string> spec_feature_names() {
    std::vector<std::string> names;
    names.reserve(kSpecFeatureCount);
    for (const auto& f : kNumericFeatures) names.emplace_back(f.name);
    for (const char* n : kEngineOneHotNames) names.emplace_back(n);
    return names;
}

std::vector<double> spec_feature_vector(const AircraftSpec& spec) {
    std::vector<double> v;
    v.reserve(kSpecFeatureCount);
    for (const auto& f : kNumericFeatures) v.push_back(spec.*(f.field));
    v.push_back(spec.engine_type == EngineType::turbofan ? 1.0 : 0.0);
    v.push_back(spec.engine_type == EngineType::turboprop ? 1.0 : 0.0);
    return v;
}

bool has_missing(const AircraftSpec& spec) {
    for (const auto& f : kNumericFeatures)
        if (std::isnan(spec.*(f.field))) return true;
    return false;
}

void validate_spec(const AircraftSpec& spec) {
    const auto fail = [&](const std::string& why) {
        throw ValidationError("spec " + spec.type_code + ": " + why);
    };
    if (has_missing(spec)) fail("missing numeric field");
    if (!(spec.oew > 0.0 && spec.oew < spec.mtow)) fail("requires 0 < oew < mtow");
    if (!(spec.wing_area > 0.0)) fail("wing_area must be positive");
    if (!(spec.span > 0.0)) fail("span must be positive");
    if (!(spec.n_engines >= 1.0)) fail("n_engines must be >= 1");
    if (!(spec.ff_idle > 0.0 && spec.ff_idle < spec.ff_approach &&
          spec.ff_approach < spec.ff_climb && spec.ff_climb < spec.ff_takeoff))
        fail("requires 0 < ff_idle < ff_approach < ff_climb < ff_takeoff");
}

long long Fleet::find(std::string_view type_code) const {
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (specs[i].type_code == type_code) return static_cast<long long>(i);
    return -1;
}

std::vector<std::size_t> Fleet::training_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (membership[i] == Membership::training) out.push_back(i);
    return out;
}

std::vector<std::size_t> Fleet::generalization_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < specs.size(); ++i)
        if (membership[i] == Membership::generalization) out.push_back(i);
    return out;
}

void validate_fleet(const Fleet& fleet) {
    if (fleet.specs.size() != fleet.membership.size())
        throw ValidationError("fleet: membership list out of sync");
    std::set<std::string> seen;
    for (const auto& s : fleet.specs) {
        if (s.type_code.empty()) throw ValidationError("fleet: empty type_code");
        if (!seen.insert(s.type_code).second)
            throw ValidationError("fleet: duplicate type_code " + s.type_code);
    }
    for (const auto& s : fleet.specs)
        if (!has_missing(s)) validate_spec(s);
}

// ---------------------------------------------------------------------------
// fleet CSV

namespace {

std::vector<std::string> fleet_header() {
    std::vector<std::string> h;
    h.emplace_back("type_code");
    h.emplace_back("wing_area");
    h.emplace_back("span");
    h.emplace_back("length");
    h.emplace_back("mtow");
    h.emplace_back("oew");
    h.emplace_back("mmo");
    h.emplace_back("vmo");
    h.emplace_back("hmo");
    h.emplace_back("engine_type");
    h.emplace_back("n_engines");
    h.emplace_back("rated_power");
    h.emplace_back("rated_thrust");
    h.emplace_back("bypass_ratio");
    h.emplace_back("pressure_ratio");
    h.emplace_back("ff_takeoff");
    h.emplace_back("ff_climb");
    h.emplace_back("ff_approach");
    h.emplace_back("ff_idle");
    h.emplace_back("set");
    return h;
}

// Order of numeric columns within the fleet CSV (engine_type sits between
// hmo and n_engines, so the numeric run is split).
constexpr std::array<double AircraftSpec::*, 8> kCsvBlockA{
    &AircraftSpec::wing_area, &AircraftSpec::span,   &AircraftSpec::length,
    &AircraftSpec::mtow,      &AircraftSpec::oew,    &AircraftSpec::mmo,
    &AircraftSpec::vmo,       &AircraftSpec::hmo};
constexpr std::array<double AircraftSpec::*, 9> kCsvBlockB{
    &AircraftSpec::n_engines,     &AircraftSpec::rated_power, &AircraftSpec::rated_thrust,
    &AircraftSpec::bypass_ratio,  &AircraftSpec::pressure_ratio, &AircraftSpec::ff_takeoff,
    &AircraftSpec::ff_climb,      &AircraftSpec::ff_approach, &AircraftSpec::ff_idle};

}  // namespace

Fleet read_fleet_csv(const std::string& path) {
    csv::Reader reader(path, fleet_header());
    Fleet fleet;
    std::vector<std::string_view> f;
    while (reader.next(f)) {
        AircraftSpec s;
        s.type_code = std::string(f[0]);
        std::size_t col = 1;
        const auto cell = [&](std::string_view v) -> double {
            return v.empty() ? NAN : csv::parse_double(v, path, reader.line_no());
        };
        for (auto m : kCsvBlockA) s.*m = cell(f[col++]);
        const std::string_view et = f[col++];
        if (et == "turbofan")
            s.engine_type = EngineType::turbofan;
        else if (et == "turboprop")
            s.engine_type = EngineType::turboprop;
        else
            throw ValidationError(path + ":" + std::to_string(reader.line_no()) +
                                  ": engine_type must be turbofan or turboprop, got '" +
                                  std::string(et) + "'");
        for (auto m : kCsvBlockB) s.*m = cell(f[col++]);
        const std::string_view set = f[col];
        Membership mem;
        if (set == "train")
            mem = Membership::training;
        else if (set == "gen")
            mem = Membership::generalization;
        else
            throw ValidationError(path + ":" + std::to_string(reader.line_no()) +
                                  ": set must be train or gen, got '" + std::string(set) + "'");
        fleet.specs.push_back(std::move(s));
        fleet.membership.push_back(mem);
    }
    validate_fleet(fleet);
    return fleet;
}

void write_fleet_csv(const Fleet& fleet, const std::string& path) {
    csv::Writer w(path);
    w.header(fleet_header());
    for (std::size_t i = 0; i < fleet.specs.size(); ++i) {
        const AircraftSpec& s = fleet.specs[i];
        w.field(std::string_view(s.type_code));
        const auto cell = [&](double v) {
            if (std::isnan(v))
                w.field(std::string_view(""));
            else
                w.field(v);
        };
        for (auto m : kCsvBlockA) cell(s.*m);
        w.field(std::string_view(s.engine_type == EngineType::turbofan ? "turbofan"
                                                                       : "turboprop"));
        for (auto m : kCsvBlockB) cell(s.*m);
        w.field(std::string_view(fleet.membership[i] == Membership::training ? "train" : "gen"));
        w.end_row();
    }
    w.close();
}

// ---------------------------------------------------------------------------
// imputation

Fleet impute_missing(const Fleet& fleet, int max_rounds) {
    const std::size_t n = fleet.specs.size();
    if (n < 2) throw ValidationError("impute_missing: need at least two specs");
    const std::size_t p = kNumericFeatures.size();

    // column-major working copy + missing mask
    std::vector<std::vector<double>> col(p, std::vector<double>(n));
    std::vector<std::vector<char>> miss(p, std::vector<char>(n, 0));
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const double v = fleet.specs[i].*(kNumericFeatures[j].field);
            col[j][i] = v;
            miss[j][i] = std::isnan(v) ? 1 : 0;
        }

    // mean initialization; a feature observed fewer than twice cannot anchor
    // a regression
    std::vector<bool> any_missing(p, false);
    for (std::size_t j = 0; j < p; ++j) {
        std::size_t observed = 0;
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (!miss[j][i]) {
                ++observed;
                sum += col[j][i];
            }
        if (observed == n) continue;
        any_missing[j] = true;
        if (observed == 0)
            throw ValidationError(std::string("impute_missing: feature ") +
                                  kNumericFeatures[j].name + " missing in all specs");
        if (observed < 2)
            throw ValidationError(std::string("impute_missing: feature ") +
                                  kNumericFeatures[j].name + " observed in fewer than two specs");
        const double mean = sum / static_cast<double>(observed);
        for (std::size_t i = 0; i < n; ++i)
            if (miss[j][i]) col[j][i] = mean;
    }

    const auto col_stats = [&](std::size_t j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += col[j][i];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = col[j][i] - mean;
            var += d * d;
        }
        return std::pair<double, double>(mean, std::sqrt(var / static_cast<double>(n)));
    };

    for (int round = 0; round < max_rounds; ++round) {
        double worst_rel_change = 0.0;
        for (std::size_t j = 0; j < p; ++j) {
            if (!any_missing[j]) continue;
            // standardized predictors: intercept + all other features
            std::vector<std::size_t> fit_rows, fill_rows;
            for (std::size_t i = 0; i < n; ++i)
                (miss[j][i] ? fill_rows : fit_rows).push_back(i);

            std::vector<double> mu(p), sigma(p);
            for (std::size_t k = 0; k < p; ++k) {
                const auto [m, s] = col_stats(k);
                mu[k] = m;
                sigma[k] = s > 1e-12 ? s : 1.0;
            }

            Matrix X(fit_rows.size(), p);  // intercept + (p-1) predictors
            std::vector<double> y(fit_rows.size());
            for (std::size_t r = 0; r < fit_rows.size(); ++r) {
                const std::size_t i = fit_rows[r];
                X(r, 0) = 1.0;
                std::size_t c = 1;
                for (std::size_t k = 0; k < p; ++k) {
                    if (k == j) continue;
                    X(r, c++) = (col[k][i] - mu[k]) / sigma[k];
                }
                y[r] = col[j][i];
            }
            const std::vector<double> beta = solve_least_squares(X, y);

            const double sj = sigma[j];
            for (const std::size_t i : fill_rows) {
                double pred = beta[0];
                std::size_t c = 1;
                for (std::size_t k = 0; k < p; ++k) {
                    if (k == j) continue;
                    pred += beta[c++] * (col[k][i] - mu[k]) / sigma[k];
                }
                worst_rel_change =
                    std::max(worst_rel_change, std::fabs(pred - col[j][i]) / sj);
                col[j][i] = pred;
            }
        }
        if (worst_rel_change < 1e-6) break;
    }

    Fleet out = fleet;
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t i = 0; i < n; ++i)
            out.specs[i].*(kNumericFeatures[j].field) = col[j][i];
    // engine count is a physical integer
    for (auto& s : out.specs) s.n_engines = std::max(1.0, std::round(s.n_engines));
    return out;
}

// ---------------------------------------------------------------------------
// quantile map

QuantileMap QuantileMap::fit(const std::vector<std::vector<double>>& columns,
                             std::vector<std::string> names, int n_quantiles) {
    if (columns.size() != names.size())
        throw ValidationError("QuantileMap::fit: names/columns mismatch");
    QuantileMap qm;
    qm.names_ = std::move(names);
    qm.anchors_.resize(columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        std::vector<double> sorted = columns[j];
        if (sorted.empty()) throw ValidationError("QuantileMap::fit: empty column " + qm.names_[j]);
        std::sort(sorted.begin(), sorted.end());
        const int q = std::max(2, std::min<int>(n_quantiles, static_cast<int>(sorted.size())));
        qm.n_quantiles_ = q;
        std::vector<double>& a = qm.anchors_[j];
        a.resize(q);
        // inverse-ECDF anchors (ceil convention): exactly invariant under
        // dataset duplication once the anchor count cap is active
        const double n = static_cast<double>(sorted.size());
        for (int k = 0; k < q; ++k) {
            if (k == 0) {
                a[k] = sorted.front();
                continue;
            }
            const double p = static_cast<double>(k) / static_cast<double>(q - 1);
            const auto idx = static_cast<std::size_t>(std::ceil(p * n)) - 1;
            a[k] = sorted[std::min(idx, sorted.size() - 1)];
        }
    }
    return qm;
}

double QuantileMap::map(std::size_t feature, double value) const {
    const std::vector<double>& a = anchors_.at(feature);
    const std::size_t q = a.size();
    // constant column: everything sits at the midpoint
    if (a.front() == a.back()) return 0.5;
    if (value <= a.front()) return 0.0;
    if (value >= a.back()) return 1.0;
    const auto it = std::upper_bound(a.begin(), a.end(), value);
    const std::size_t hi = static_cast<std::size_t>(it - a.begin());
    const double left = a[hi - 1], right = a[hi];
    const double frac = right > left ? (value - left) / (right - left) : 0.0;
    return (static_cast<double>(hi - 1) + frac) / static_cast<double>(q - 1);
}

std::size_t QuantileMap::feature_index(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw ValidationError("QuantileMap: unknown feature '" + std::string(name) + "'");
}

QuantileMap fit_fleet_quantile_map(const Fleet& fleet) {
    if (fleet.specs.empty()) throw ValidationError("fit_fleet_quantile_map: empty fleet");
    std::vector<std::string> names = spec_feature_names();
    std::vector<std::vector<double>> columns(names.size());
    for (const auto& s : fleet.specs) {
        if (has_missing(s))
            throw ValidationError("fit_fleet_quantile_map: spec " + s.type_code +
                                  " has missing values; impute first");
        const std::vector<double> v = spec_feature_vector(s);
        for (std::size_t j = 0; j < v.size(); ++j) columns[j].push_back(v[j]);
    }
    return QuantileMap::fit(columns, std::move(names),
                            std::min<int>(1000, static_cast<int>(fleet.specs.size())));
}

std::vector<double> mapped_feature_vector(const AircraftSpec& spec, const QuantileMap& qmap) {
    // resolve every fitted feature by name so a map fitted on a feature we do
    // not know about fails loudly
    const std::vector<std::string> own = spec_feature_names();
    const std::vector<double> raw = spec_feature_vector(spec);
    std::vector<double> out(qmap.names().size());
    for (std::size_t j = 0; j < qmap.names().size(); ++j) {
        const auto it = std::find(own.begin(), own.end(), qmap.names()[j]);
        if (it == own.end())
            throw ValidationError("pseudo_distance: feature '" + qmap.names()[j] +
                                  "' not present on aircraft specs");
        out[j] = qmap.map(j, raw[static_cast<std::size_t>(it - own.begin())]);
    }
    return out;
}

double pseudo_distance(const AircraftSpec& a, const AircraftSpec& b, const QuantileMap& qmap) {
    const std::vector<double> va = mapped_feature_vector(a, qmap);
    const std::vector<double> vb = mapped_feature_vector(b, qmap);
    double s = 0.0;
    for (std::size_t j = 0; j < va.size(); ++j) {
        const double d = va[j] - vb[j];
        s += d * d;
    }
    return std::sqrt(s);
}

ClosestResult closest_training_distance(const AircraftSpec& spec, const Fleet& fleet,
                                        const QuantileMap& qmap) {
    const std::vector<std::size_t> train = fleet.training_indices();
    if (train.empty()) throw ValidationError("closest_training_distance: no training members");
    ClosestResult best{std::numeric_limits<double>::infinity(), ""};
    for (const std::size_t i : train) {
        const double d = pseudo_distance(spec, fleet.specs[i], qmap);
        if (d < best.distance ||
            (d == best.distance && fleet.specs[i].type_code < best.type_code)) {
            best.distance = d;
            best.type_code = fleet.specs[i].type_code;
        }
    }
    return best;
}

}  // namespace ffdg
