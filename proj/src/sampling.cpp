#include "ffdg/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_map>

#include "ffdg/errors.hpp"
#include "ffdg/linalg.hpp"
#include "ffdg/parallel.hpp"
#include "ffdg/rng.hpp"

namespace ffdg {

namespace {

// pool rows grouped by flight (first-appearance order)
struct FlightGroups {
    std::vector<std::int32_t> flights;
    std::vector<std::vector<std::int64_t>> rows;
};

FlightGroups group_by_flight(const ObservationTable& table, std::span<const std::int64_t> pool) {
    FlightGroups g;
    std::unordered_map<std::int32_t, std::size_t> slot;
    for (const std::int64_t r : pool) {
        const std::int32_t f = table.row_flight(static_cast<std::size_t>(r));
        const auto it = slot.find(f);
        if (it == slot.end()) {
            slot.emplace(f, g.flights.size());
            g.flights.push_back(f);
            g.rows.emplace_back();
            g.rows.back().push_back(r);
        } else {
            g.rows[it->second].push_back(r);
        }
    }
    return g;
}

struct TypeGroups {
    std::vector<std::int32_t> types;
    std::vector<std::vector<std::int64_t>> rows;
};

TypeGroups group_by_type(const ObservationTable& table, std::span<const std::int64_t> pool) {
    TypeGroups g;
    std::unordered_map<std::int32_t, std::size_t> slot;
    for (const std::int64_t r : pool) {
        const std::int32_t t = table.row_type(static_cast<std::size_t>(r));
        const auto it = slot.find(t);
        if (it == slot.end()) {
            slot.emplace(t, g.types.size());
            g.types.push_back(t);
            g.rows.emplace_back();
            g.rows.back().push_back(r);
        } else {
            g.rows[it->second].push_back(r);
        }
    }
    return g;
}

}  // namespace

std::vector<std::int64_t> random_sample(const ObservationTable& table,
                                        std::span<const std::int64_t> pool, int budget,
                                        std::uint64_t seed) {
    if (budget < 1) throw ValidationError("random_sample: budget must be >= 1");
    const FlightGroups groups = group_by_flight(table, pool);
    std::vector<std::int64_t> out(groups.flights.size() * static_cast<std::size_t>(budget));
    par::parallel_for(groups.flights.size(), [&](std::size_t gi) {
        const std::vector<std::int64_t>& rows = groups.rows[gi];
        Xoshiro256pp rng(derive_seed(seed, "random-sample",
                                     fnv1a64(table.flight_id(groups.flights[gi]))));
        std::int64_t* dst = out.data() + gi * static_cast<std::size_t>(budget);
        for (int k = 0; k < budget; ++k) dst[k] = rows[rng.below(rows.size())];
    });
    return out;
}

std::array<double, 2> Projection2D::project(const std::array<double, 7>& state) const {
    std::array<double, 7> mapped;
    for (std::size_t k = 0; k < 7; ++k) mapped[k] = qmap.map(k, state[k]) - center[k];
    std::array<double, 2> out{};
    for (int a = 0; a < 2; ++a) {
        double s = 0.0;
        for (std::size_t k = 0; k < 7; ++k) s += axes[a][k] * mapped[k];
        out[a] = s;
    }
    return out;
}

Projection2D fit_projection(const ObservationTable& table, std::span<const std::int64_t> rows) {
    if (rows.size() < 3) throw ValidationError("fit_projection: need at least 3 rows");
    const std::size_t n = rows.size();

    std::vector<std::vector<double>> columns(7, std::vector<double>(n));
    for (std::size_t k = 0; k < 7; ++k)
        for (std::size_t i = 0; i < n; ++i)
            columns[k][i] = table.state(static_cast<std::size_t>(rows[i]), k);

    Projection2D proj;
    std::vector<std::string> names;
    for (const char* s : ObservationTable::kStateNames) names.emplace_back(s);
    proj.qmap = QuantileMap::fit(columns, std::move(names),
                                 std::min<int>(1000, static_cast<int>(n)));

    // mapped columns, reusing the storage
    for (std::size_t k = 0; k < 7; ++k)
        for (std::size_t i = 0; i < n; ++i) columns[k][i] = proj.qmap.map(k, columns[k][i]);

    for (std::size_t k = 0; k < 7; ++k) {
        double mean = 0.0;
        for (const double v : columns[k]) mean += v;
        proj.center[k] = mean / static_cast<double>(n);
    }

    Matrix cov(7, 7);
    for (std::size_t a = 0; a < 7; ++a)
        for (std::size_t b = a; b < 7; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += (columns[a][i] - proj.center[a]) * (columns[b][i] - proj.center[b]);
            cov(a, b) = s / static_cast<double>(n);
            cov(b, a) = cov(a, b);
        }

    const SymEigen eig = sym_eigen(cov);
    double trace = 0.0;
    for (std::size_t k = 0; k < 7; ++k) trace += cov(k, k);
    const double floor = 1e-12 * std::max(trace, 1e-30);
    for (int a = 0; a < 2; ++a) {
        if (eig.values[a] > floor) {
            for (std::size_t k = 0; k < 7; ++k) proj.axes[a][k] = eig.vectors[a][k];
            proj.explained[a] = eig.values[a];
            // sign convention: first nonzero loading positive
            for (std::size_t k = 0; k < 7; ++k) {
                if (proj.axes[a][k] != 0.0) {
                    if (proj.axes[a][k] < 0.0)
                        for (std::size_t j = 0; j < 7; ++j) proj.axes[a][j] = -proj.axes[a][j];
                    break;
                }
            }
        } else {
            proj.axes[a].fill(0.0);  // degenerate direction: constant coordinate
            proj.explained[a] = 0.0;
        }
    }
    return proj;
}

namespace {

struct Bandwidth {
    double hx, hy;
};

Bandwidth scott_bandwidth(std::span<const std::array<double, 2>> points,
                          std::span<const double> counts) {
    double n = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double c = counts.empty() ? 1.0 : counts[i];
        n += c;
        mx += c * points[i][0];
        my += c * points[i][1];
    }
    mx /= n;
    my /= n;
    double vx = 0.0, vy = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double c = counts.empty() ? 1.0 : counts[i];
        vx += c * (points[i][0] - mx) * (points[i][0] - mx);
        vy += c * (points[i][1] - my) * (points[i][1] - my);
    }
    const double scale = std::pow(n, -1.0 / 6.0);  // Scott's rule in 2-D
    Bandwidth bw;
    bw.hx = std::max(std::sqrt(vx / n) * scale, 1e-6);
    bw.hy = std::max(std::sqrt(vy / n) * scale, 1e-6);
    return bw;
}

std::vector<double> kde_eval(std::span<const std::array<double, 2>> points,
                             std::span<const double> counts,
                             std::span<const std::array<double, 2>> queries) {
    if (points.size() < 2 && counts.empty())
        throw ValidationError("kde_density: need at least 2 points");
    const Bandwidth bw = scott_bandwidth(points, counts);
    double n = 0.0;
    if (counts.empty())
        n = static_cast<double>(points.size());
    else
        for (const double c : counts) n += c;
    const double inv_hx = 1.0 / bw.hx, inv_hy = 1.0 / bw.hy;
    const double norm = 1.0 / (2.0 * M_PI * bw.hx * bw.hy * n);

    std::vector<double> out(queries.size());
    par::parallel_for(queries.size(), [&](std::size_t qi) {
        const double qx = queries[qi][0], qy = queries[qi][1];
        double s = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double dx = (points[i][0] - qx) * inv_hx;
            const double dy = (points[i][1] - qy) * inv_hy;
            const double k = std::exp(-0.5 * (dx * dx + dy * dy));
            s += counts.empty() ? k : counts[i] * k;
        }
        // strictly positive even when every kernel underflows
        out[qi] = std::max(s * norm, 1e-300);
    });
    return out;
}

}  // namespace

std::vector<double> kde_density(std::span<const std::array<double, 2>> points,
                                std::span<const std::array<double, 2>> queries) {
    return kde_eval(points, {}, queries);
}

std::vector<double> kde_density_weighted(std::span<const std::array<double, 2>> points,
                                         std::span<const double> counts,
                                         std::span<const std::array<double, 2>> queries) {
    if (points.size() != counts.size())
        throw ValidationError("kde_density_weighted: counts/points mismatch");
    if (points.empty()) throw ValidationError("kde_density_weighted: empty point set");
    return kde_eval(points, counts, queries);
}

namespace {

// Deduplicates identical projected points (the six mass variants of a flight
// share their state vector) and returns per-row densities for one type group.
std::vector<double> type_densities(const ObservationTable& table,
                                   const std::vector<std::int64_t>& rows) {
    const std::size_t n = rows.size();
    if (n < 3) throw ValidationError("uniform_sample: type group smaller than 3 rows");

    std::vector<std::int64_t> subset(rows.begin(), rows.end());
    const Projection2D proj = fit_projection(table, subset);

    std::vector<std::array<double, 2>> projected(n);
    par::parallel_for(n, [&](std::size_t i) {
        const auto r = static_cast<std::size_t>(rows[i]);
        std::array<double, 7> state;
        for (std::size_t k = 0; k < 7; ++k) state[k] = table.state(r, k);
        projected[i] = proj.project(state);
    });

    // exact dedup on the projected coordinates
    struct Key {
        double x, y;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::uint64_t hx, hy;
            static_assert(sizeof(double) == sizeof(std::uint64_t));
            std::memcpy(&hx, &k.x, 8);
            std::memcpy(&hy, &k.y, 8);
            return static_cast<std::size_t>(mix64(hx, hy));
        }
    };
    std::vector<std::array<double, 2>> unique;
    std::vector<double> counts;
    std::vector<std::size_t> row_to_unique(n);
    std::unordered_map<Key, std::size_t, KeyHash> lookup;
    lookup.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Key key{projected[i][0], projected[i][1]};
        const auto it = lookup.find(key);
        if (it == lookup.end()) {
            lookup.emplace(key, unique.size());
            row_to_unique[i] = unique.size();
            unique.push_back(projected[i]);
            counts.push_back(1.0);
        } else {
            row_to_unique[i] = it->second;
            counts[it->second] += 1.0;
        }
    }

    const std::vector<double> unique_density = kde_density_weighted(unique, counts, unique);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = unique_density[row_to_unique[i]];
    return out;
}

}  // namespace

std::vector<double> pool_densities(const ObservationTable& table,
                                   std::span<const std::int64_t> pool) {
    const TypeGroups groups = group_by_type(table, pool);
    std::unordered_map<std::int64_t, double> per_row;
    per_row.reserve(pool.size());
    for (std::size_t g = 0; g < groups.types.size(); ++g) {
        const std::vector<double> d = type_densities(table, groups.rows[g]);
        for (std::size_t i = 0; i < groups.rows[g].size(); ++i)
            per_row[groups.rows[g][i]] = d[i];
    }
    std::vector<double> out(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) out[i] = per_row[pool[i]];
    return out;
}

std::vector<std::int64_t> uniform_sample(const ObservationTable& table,
                                         std::span<const std::int64_t> pool, int budget,
                                         std::uint64_t seed) {
    if (budget < 1) throw ValidationError("uniform_sample: budget must be >= 1");
    const TypeGroups groups = group_by_type(table, pool);
    std::vector<std::int64_t> out;

    for (std::size_t g = 0; g < groups.types.size(); ++g) {
        const std::vector<std::int64_t>& rows = groups.rows[g];
        const std::vector<double> density = type_densities(table, rows);

        std::vector<double> cumulative(rows.size());
        double total = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            total += 1.0 / std::max(density[i], 1e-12);
            cumulative[i] = total;
        }

        std::size_t n_flights = 0;
        {
            std::unordered_map<std::int32_t, char> seen;
            for (const std::int64_t r : rows)
                if (seen.emplace(table.row_flight(static_cast<std::size_t>(r)), 1).second)
                    ++n_flights;
        }

        Xoshiro256pp rng(derive_seed(seed, "uniform-sample",
                                     fnv1a64(table.type_code(groups.types[g]))));
        const std::size_t draws = n_flights * static_cast<std::size_t>(budget);
        for (std::size_t k = 0; k < draws; ++k) {
            const double u = rng.uniform01() * total;
            const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
            const std::size_t idx =
                std::min(static_cast<std::size_t>(it - cumulative.begin()), rows.size() - 1);
            out.push_back(rows[idx]);
        }
    }
    return out;
}

}  // namespace ffdg
