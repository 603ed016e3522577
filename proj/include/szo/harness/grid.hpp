#pragma once

#include <szo/harness/config.hpp>
#include <szo/harness/csv.hpp>
#include <szo/harness/runner.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace szo::harness {

/// Parameter name -> candidate values.
using Grid = std::map<std::string, std::vector<double>>;

/// Either one grid shared by all algorithms, or one grid per algorithm.
struct GridSpec {
    std::optional<Grid> shared;
    std::map<Algorithm, Grid> per_algorithm;

    const Grid* for_algorithm(Algorithm a) const {
        if (auto it = per_algorithm.find(a); it != per_algorithm.end()) return &it->second;
        return shared ? &*shared : nullptr;
    }
};

inline Grid parse_grid_body(const json& j, const std::string& where) {
    if (!j.is_object() || j.empty()) throw InvalidConfig(where, "expected a non-empty object");
    Grid g;
    for (const auto& [key, values] : j.items()) {
        const std::string at = where.empty() ? key : where + "." + key;
        if (!override_keys().count(key)) throw InvalidConfig(at, "unknown parameter");
        if (!values.is_array() || values.empty()) throw InvalidConfig(at, "expected a non-empty array");
        for (const auto& v : values) g[key].push_back(detail::number(v, at));
    }
    return g;
}

inline GridSpec parse_grid(const json& j) {
    if (!j.is_object() || j.empty()) throw InvalidConfig("grid", "expected a non-empty object");
    GridSpec spec;
    const bool per_alg = algorithm_from_string(j.begin().key()).has_value();
    if (!per_alg) {
        spec.shared = parse_grid_body(j, "");
        return spec;
    }
    for (const auto& [name, body] : j.items()) {
        const auto alg = algorithm_from_string(name);
        if (!alg) throw InvalidConfig(name, "mixing algorithm keys and parameter keys");
        spec.per_algorithm[*alg] = parse_grid_body(body, name);
    }
    return spec;
}

struct GridPoint {
    Algorithm algorithm = Algorithm::GD;
    Overrides params;  // only the grid parameters
    double median_cum_regret_iter = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> per_seed;
    bool failed = false;
    std::string failure;
};

struct GridResult {
    std::vector<GridPoint> points;
    std::map<Algorithm, GridPoint> best;
    ExperimentConfig best_config;
};

inline double median(std::vector<double> v) {
    require(!v.empty(), "median of an empty set");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Cartesian product, parameters in sorted-name order, values in given order.
inline std::vector<Overrides> grid_points(const Grid& grid) {
    std::vector<Overrides> out{{}};
    for (const auto& [name, values] : grid) {
        std::vector<Overrides> next;
        for (const auto& partial : out)
            for (double v : values) {
                Overrides o = partial;
                o[name] = v;
                next.push_back(std::move(o));
            }
        out = std::move(next);
    }
    return out;
}

/// Lower median regret wins; ties go to the lexicographically smaller
/// parameter vector (parameters ordered by name).
inline bool better_point(const GridPoint& a, const GridPoint& b) {
    if (a.median_cum_regret_iter != b.median_cum_regret_iter)
        return a.median_cum_regret_iter < b.median_cum_regret_iter;
    std::vector<double> va, vb;
    for (const auto& [_, v] : a.params) va.push_back(v);
    for (const auto& [_, v] : b.params) vb.push_back(v);
    return va < vb;
}

/// Evaluates every grid point of every algorithm on the config's seeds and
/// keeps the point with the smallest median final iterate cumulative regret.
inline GridResult grid_search(const ExperimentConfig& cfg, const GridSpec& grid, std::uint64_t seed_offset = 0) {
    GridResult result;
    result.best_config = cfg;
    for (Algorithm alg : cfg.algorithms) {
        const Grid* g = grid.for_algorithm(alg);
        std::vector<Overrides> points = g ? grid_points(*g) : std::vector<Overrides>{{}};
        std::optional<GridPoint> best;
        for (const Overrides& params : points) {
            ExperimentConfig trial = cfg;
            for (const auto& [k, v] : params) trial.overrides[alg][k] = v;
            GridPoint gp;
            gp.algorithm = alg;
            gp.params = params;
            try {
                validate_experiment(trial, seed_offset);
            } catch (const InvalidConfig& e) {
                gp.failed = true;
                gp.failure = e.what();
            }
            for (std::uint64_t seed : cfg.seeds) {
                if (gp.failed) break;
                const CellResult cell = run_cell(trial, alg, seed, seed_offset);
                if (!cell.ok() || cell.trace.empty()) {
                    gp.failed = true;
                    gp.failure = cell.error.value_or("empty trace");
                    break;
                }
                gp.per_seed.push_back(cell.final_cum_regret_iter());
            }
            if (!gp.failed) {
                gp.median_cum_regret_iter = median(gp.per_seed);
                if (!best || better_point(gp, *best)) best = gp;
            }
            result.points.push_back(gp);
        }
        if (best) {
            result.best[alg] = *best;
            for (const auto& [k, v] : best->params) result.best_config.overrides[alg][k] = v;
        }
    }
    return result;
}

inline std::string grid_report_csv(const GridResult& result) {
    std::string out = "algo,params,median_cum_regret_iter,status\n";
    for (const auto& p : result.points) {
        std::string params;
        for (const auto& [k, v] : p.params) {
            if (!params.empty()) params += ';';
            params += k + "=" + format_double(v);
        }
        out += std::string(to_string(p.algorithm)) + "," + params + ",";
        out += p.failed ? std::string("") : format_double(p.median_cum_regret_iter);
        out += p.failed ? ",failed\n" : ",ok\n";
    }
    return out;
}

}  // namespace szo::harness
