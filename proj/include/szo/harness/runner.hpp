#pragma once

#include <szo/flaxman.hpp>
#include <szo/harness/config.hpp>
#include <szo/harness/csv.hpp>
#include <szo/mirror_descent.hpp>
#include <szo/objective.hpp>
#include <szo/oracle.hpp>
#include <szo/regret.hpp>
#include <szo/selection.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace szo::harness {

/// Seed streams for one trial. Every stream starts from
/// trial = splitmix64(seed + seed_offset); the objective stream is shared by
/// all algorithms of a trial, the noise and algorithm streams are keyed by
/// the algorithm's fixed index (GD 0, LassoGD 1, MD 2, MDTwice 3).
struct TrialSeeds {
    std::uint64_t objective = 0;
    std::uint64_t noise = 0;
    std::uint64_t algorithm = 0;
};

inline TrialSeeds derive_seeds(std::uint64_t seed, std::uint64_t seed_offset, Algorithm alg) {
    const std::uint64_t trial = splitmix64(seed + seed_offset);
    const auto index = static_cast<std::uint64_t>(alg) + 1;
    TrialSeeds out;
    out.objective = splitmix64(trial);
    out.noise = splitmix64(trial ^ (index << 32 | 1u));
    out.algorithm = splitmix64(trial ^ (index << 32 | 2u));
    return out;
}

struct CellResult {
    Algorithm algorithm = Algorithm::GD;
    std::uint64_t seed = 0;
    RegretTrace trace;
    std::optional<Vector> x_out;
    std::int64_t queries_used = 0;
    std::optional<std::vector<Index>> selected;  // LassoGD only
    std::optional<std::string> error;

    bool ok() const { return !error.has_value(); }
    double final_cum_regret_iter() const { return trace.empty() ? 0.0 : trace.back().cum_regret_iter; }
    double final_simple_regret() const { return trace.empty() ? 0.0 : trace.back().simple_regret; }
};

/// Resolves every schedule the algorithm would use, without querying.
inline void validate_cell(const ExperimentConfig& cfg, const Objective& obj, Algorithm alg) {
    const OptimizerParams op = make_params(cfg, obj, alg);
    switch (alg) {
        case Algorithm::GD:
            op.validate_common();
            resolve_flaxman_params(op, all_coordinates(obj.dim())).validate(obj.dim());
            break;
        case Algorithm::LassoGD: {
            const auto sp = resolve_selection_params(op, obj.dim());
            require(sp.T_prime >= 2, "per-round budget T' must be at least 2");
            break;
        }
        case Algorithm::MD: resolve_mirror_params(op, obj.dim(), false); break;
        case Algorithm::MDTwice: resolve_mirror_params(op, obj.dim(), true); break;
    }
}

/// Runs one (algorithm, seed) trial on a fresh oracle with budget T. Failures
/// are captured in the result together with the rows recorded so far.
inline CellResult run_cell(const ExperimentConfig& cfg, Algorithm alg, std::uint64_t seed,
                           std::uint64_t seed_offset = 0) {
    CellResult res;
    res.algorithm = alg;
    res.seed = seed;
    const TrialSeeds seeds = derive_seeds(seed, seed_offset, alg);
    const Objective obj = make_objective(cfg.objective, seeds.objective);
    const double f_star = obj.optimum_value();

    NoisyOracle oracle(obj, obj.dim(), cfg.sigma, seeds.noise, cfg.T);
    RegretMonitor monitor(oracle, [&obj](const Vector& x) { return obj.eval_true(x); }, f_star,
                          cfg.effective_checkpoints());
    Rng rng(seeds.algorithm);
    try {
        const OptimizerParams op = make_params(cfg, obj, alg);
        Vector x_out;
        switch (alg) {
            case Algorithm::GD: x_out = run_gd(monitor, op, rng).x_out; break;
            case Algorithm::LassoGD: {
                auto sel = successive_select(monitor, op, rng);
                x_out = sel.x_final;
                res.selected = sel.S_hat;
                break;
            }
            case Algorithm::MD: x_out = run_md(monitor, op, rng, false).x_out; break;
            case Algorithm::MDTwice: x_out = run_md(monitor, op, rng, true).x_out; break;
        }
        monitor.finish(x_out);
        res.x_out = x_out;
    } catch (const std::exception& e) {
        res.error = e.what();
    }
    res.trace = monitor.trace();
    res.queries_used = oracle.queries_used();
    return res;
}

inline std::string cell_filename(Algorithm alg, std::uint64_t seed) {
    return std::string(to_string(alg)) + "_seed" + std::to_string(seed) + ".csv";
}

struct ExperimentSummary {
    std::vector<CellResult> cells;
    std::vector<std::string> csv_paths;
    std::string manifest_path;
    bool all_ok() const {
        return std::all_of(cells.begin(), cells.end(), [](const CellResult& c) { return c.ok(); });
    }
};

/// Checks the configuration end to end (objective construction and every
/// schedule) before any query is made.
inline void validate_experiment(const ExperimentConfig& cfg, std::uint64_t seed_offset = 0) {
    for (std::uint64_t seed : cfg.seeds) {
        for (Algorithm alg : cfg.algorithms) {
            try {
                const Objective obj = make_objective(cfg.objective, derive_seeds(seed, seed_offset, alg).objective);
                validate_cell(cfg, obj, alg);
            } catch (const InvalidArgument& e) {
                throw InvalidConfig(std::string(to_string(alg)), e.what());
            }
        }
    }
}

/// One CSV per (algorithm, seed) plus manifest.json in cfg.output_dir.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg, std::uint64_t seed_offset = 0) {
    validate_experiment(cfg, seed_offset);
    namespace fs = std::filesystem;
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);

    ExperimentSummary summary;
    json manifest;
    manifest["config"] = config_to_json(cfg);
    manifest["seed_offset"] = seed_offset;
    manifest["cells"] = json::array();
    for (Algorithm alg : cfg.algorithms) {
        for (std::uint64_t seed : cfg.seeds) {
            CellResult cell = run_cell(cfg, alg, seed, seed_offset);
            const fs::path csv = dir / cell_filename(alg, seed);
            write_text(csv.string(), trace_csv(to_string(alg), seed, cell.trace));

            json entry;
            entry["algo"] = std::string(to_string(alg));
            entry["seed"] = seed;
            entry["csv"] = csv.filename().string();
            entry["status"] = cell.ok() ? "ok" : "failed";
            entry["queries_used"] = cell.queries_used;
            entry["rows"] = cell.trace.size();
            if (cell.error) entry["error"] = *cell.error;
            if (!cell.trace.empty()) {
                entry["final_cum_regret_iter"] = cell.final_cum_regret_iter();
                entry["final_simple_regret"] = cell.final_simple_regret();
            }
            if (cell.selected) entry["selected"] = *cell.selected;
            manifest["cells"].push_back(entry);

            summary.csv_paths.push_back(csv.string());
            summary.cells.push_back(std::move(cell));
        }
    }
    const fs::path manifest_path = dir / "manifest.json";
    write_text(manifest_path.string(), manifest.dump(2) + "\n");
    summary.manifest_path = manifest_path.string();
    return summary;
}

}  // namespace szo::harness
