#pragma once

#include <szo/core.hpp>
#include <szo/objective.hpp>
#include <szo/params.hpp>
#include <szo/regret.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace szo::harness {

using json = nlohmann::json;

class InvalidConfig : public Error {
  public:
    InvalidConfig(const std::string& field, const std::string& message)
        : Error(field + ": " + message), field_(field) {}
    const std::string& field() const noexcept { return field_; }

  private:
    std::string field_;
};

enum class Algorithm { GD = 0, LassoGD = 1, MD = 2, MDTwice = 3 };

inline constexpr std::array<Algorithm, 4> kAllAlgorithms = {Algorithm::GD, Algorithm::LassoGD, Algorithm::MD,
                                                           Algorithm::MDTwice};

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::GD: return "GD";
        case Algorithm::LassoGD: return "LassoGD";
        case Algorithm::MD: return "MD";
        case Algorithm::MDTwice: return "MDTwice";
    }
    return "?";
}

inline std::optional<Algorithm> algorithm_from_string(std::string_view name) {
    for (Algorithm a : kAllAlgorithms)
        if (to_string(a) == name) return a;
    return std::nullopt;
}

/// Per-algorithm constant overrides, by name.
using Overrides = std::map<std::string, double>;

inline const std::set<std::string>& override_keys() {
    static const std::set<std::string> keys = {"c_lambda", "c_eta",  "c_delta", "c_n",           "omega",
                                               "n",        "delta",  "eta",     "lambda",        "a",
                                               "zeta",     "H",      "L",       "flaxman_c_eta", "flaxman_c_delta"};
    return keys;
}

struct ExperimentConfig {
    ObjectiveSpec objective;
    double sigma = 0.0;
    std::int64_t T = 0;
    double B = 1.0;
    std::vector<Algorithm> algorithms;
    std::map<Algorithm, Overrides> overrides;
    std::vector<std::uint64_t> seeds;
    std::vector<std::int64_t> checkpoints;  // empty selects the log-spaced default
    std::string output_dir = "results";

    std::vector<std::int64_t> effective_checkpoints() const {
        return checkpoints.empty() ? default_checkpoints(T) : checkpoints;
    }
};

namespace detail {

inline void reject_unknown(const json& obj, const std::string& where, std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) throw InvalidConfig(where.empty() ? key : where + "." + key, "unknown key");
    }
}

inline const json& field(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw InvalidConfig(where.empty() ? key : where + "." + key, "missing required field");
    return obj.at(key);
}

inline double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw InvalidConfig(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw InvalidConfig(where, "expected a finite number");
    return x;
}

inline std::int64_t integer(const json& v, const std::string& where) {
    if (!v.is_number_integer()) throw InvalidConfig(where, "expected an integer");
    return v.get<std::int64_t>();
}

inline std::uint64_t unsigned_integer(const json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        throw InvalidConfig(where, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

}  // namespace detail

inline Overrides parse_overrides(const json& j, const std::string& where) {
    if (!j.is_object()) throw InvalidConfig(where, "expected an object");
    Overrides out;
    for (const auto& [key, value] : j.items()) {
        if (!override_keys().count(key)) throw InvalidConfig(where + "." + key, "unknown override");
        out[key] = detail::number(value, where + "." + key);
    }
    return out;
}

inline ObjectiveSpec parse_objective(const json& j) {
    using namespace detail;
    if (!j.is_object()) throw InvalidConfig("objective", "expected an object");
    reject_unknown(j, "objective", {"family", "d", "s", "support", "decay_rate", "shift"});
    ObjectiveSpec spec;
    const json& fam = field(j, "objective", "family");
    if (!fam.is_string()) throw InvalidConfig("objective.family", "expected a string");
    try {
        spec.family = family_from_string(fam.get<std::string>());
    } catch (const InvalidArgument& e) {
        throw InvalidConfig("objective.family", e.what());
    }
    spec.d = integer(field(j, "objective", "d"), "objective.d");
    spec.s = integer(field(j, "objective", "s"), "objective.s");
    if (spec.d < 1) throw InvalidConfig("objective.d", "must be at least 1");
    if (spec.s < 1 || spec.s > spec.d) throw InvalidConfig("objective.s", "must lie in [1, d]");
    if (j.contains("decay_rate")) {
        spec.decay_rate = number(j["decay_rate"], "objective.decay_rate");
        if (spec.decay_rate < 0.0) throw InvalidConfig("objective.decay_rate", "must be non-negative");
    }
    if (j.contains("support")) {
        const json& sup = j["support"];
        if (!sup.is_array()) throw InvalidConfig("objective.support", "expected an array");
        std::vector<Index> idx;
        std::set<Index> seen;
        for (const auto& v : sup) {
            const auto i = static_cast<Index>(integer(v, "objective.support"));
            if (i < 0 || i >= spec.d) throw InvalidConfig("objective.support", "index out of range");
            if (!seen.insert(i).second) throw InvalidConfig("objective.support", "duplicate index");
            idx.push_back(i);
        }
        if (static_cast<Index>(idx.size()) != spec.s) throw InvalidConfig("objective.support", "must list s indices");
        spec.support = idx;
    }
    if (j.contains("shift")) {
        const json& sh = j["shift"];
        if (!sh.is_array()) throw InvalidConfig("objective.shift", "expected an array");
        std::vector<double> b;
        for (const auto& v : sh) b.push_back(number(v, "objective.shift"));
        if (static_cast<Index>(b.size()) != spec.s) throw InvalidConfig("objective.shift", "must have s entries");
        spec.shift = b;
    }
    return spec;
}

inline ExperimentConfig parse_config(const json& j) {
    using namespace detail;
    if (!j.is_object()) throw InvalidConfig("config", "expected a JSON object");
    reject_unknown(j, "",
                   {"objective", "sigma", "T", "B", "algorithms", "overrides", "seeds", "checkpoints", "output_dir"});
    ExperimentConfig cfg;
    cfg.objective = parse_objective(field(j, "", "objective"));

    cfg.sigma = number(field(j, "", "sigma"), "sigma");
    if (cfg.sigma < 0.0) throw InvalidConfig("sigma", "must be non-negative");
    cfg.T = integer(field(j, "", "T"), "T");
    if (cfg.T < 1) throw InvalidConfig("T", "must be at least 1");
    cfg.B = number(field(j, "", "B"), "B");
    if (cfg.B <= 0.0) throw InvalidConfig("B", "must be positive");

    const json& algs = field(j, "", "algorithms");
    if (!algs.is_array() || algs.empty()) throw InvalidConfig("algorithms", "expected a non-empty array");
    for (const auto& a : algs) {
        if (!a.is_string()) throw InvalidConfig("algorithms", "expected algorithm names");
        const auto alg = algorithm_from_string(a.get<std::string>());
        if (!alg) throw InvalidConfig("algorithms", "unknown algorithm '" + a.get<std::string>() + "'");
        if (std::find(cfg.algorithms.begin(), cfg.algorithms.end(), *alg) != cfg.algorithms.end())
            throw InvalidConfig("algorithms", "duplicate algorithm '" + a.get<std::string>() + "'");
        cfg.algorithms.push_back(*alg);
    }

    if (j.contains("overrides")) {
        const json& ov = j["overrides"];
        if (!ov.is_object()) throw InvalidConfig("overrides", "expected an object keyed by algorithm");
        for (const auto& [name, value] : ov.items()) {
            const auto alg = algorithm_from_string(name);
            if (!alg) throw InvalidConfig("overrides." + name, "unknown algorithm");
            cfg.overrides[*alg] = parse_overrides(value, "overrides." + name);
        }
    }

    const json& seeds = field(j, "", "seeds");
    if (!seeds.is_array() || seeds.empty()) throw InvalidConfig("seeds", "expected a non-empty array");
    std::set<std::uint64_t> seen;
    for (const auto& s : seeds) {
        const auto v = unsigned_integer(s, "seeds");
        if (!seen.insert(v).second) throw InvalidConfig("seeds", "duplicate seed");
        cfg.seeds.push_back(v);
    }

    if (j.contains("checkpoints")) {
        const json& cp = j["checkpoints"];
        if (!cp.is_array()) throw InvalidConfig("checkpoints", "expected an array");
        for (const auto& c : cp) {
            const auto v = integer(c, "checkpoints");
            if (v < 1 || v > cfg.T) throw InvalidConfig("checkpoints", "each checkpoint must lie in [1, T]");
            if (!cfg.checkpoints.empty() && v <= cfg.checkpoints.back())
                throw InvalidConfig("checkpoints", "must be strictly increasing");
            cfg.checkpoints.push_back(v);
        }
    }

    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw InvalidConfig("output_dir", "expected a string");
        cfg.output_dir = j["output_dir"].get<std::string>();
    }
    return cfg;
}

inline json objective_to_json(const ObjectiveSpec& spec) {
    json j;
    j["family"] = std::string(to_string(spec.family));
    j["d"] = spec.d;
    j["s"] = spec.s;
    if (spec.family == Family::PolyDecayQuadratic || spec.decay_rate != 0.0) j["decay_rate"] = spec.decay_rate;
    if (spec.support) j["support"] = *spec.support;
    if (spec.shift) j["shift"] = *spec.shift;
    return j;
}

inline json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["objective"] = objective_to_json(cfg.objective);
    j["sigma"] = cfg.sigma;
    j["T"] = cfg.T;
    j["B"] = cfg.B;
    j["algorithms"] = json::array();
    for (Algorithm a : cfg.algorithms) j["algorithms"].push_back(std::string(to_string(a)));
    if (!cfg.overrides.empty()) {
        j["overrides"] = json::object();
        for (const auto& [alg, ov] : cfg.overrides) {
            json o = json::object();
            for (const auto& [k, v] : ov) o[k] = v;
            j["overrides"][std::string(to_string(alg))] = o;
        }
    }
    j["seeds"] = cfg.seeds;
    if (!cfg.checkpoints.empty()) j["checkpoints"] = cfg.checkpoints;
    j["output_dir"] = cfg.output_dir;
    return j;
}

/// Certified constants are taken over the l1 ball of radius B + 0.1 d, the
/// region reachable by iterates plus probes of radius up to 0.1.
inline constexpr double kCertifiedProbeRadius = 0.1;

/// Optimizer parameters for one algorithm: problem constants from the
/// objective, then the algorithm's overrides.
inline OptimizerParams make_params(const ExperimentConfig& cfg, const Objective& obj, Algorithm alg) {
    const CertifiedConstants cc = obj.certify(cfg.B + kCertifiedProbeRadius * static_cast<double>(obj.dim()));
    OptimizerParams p;
    p.T = cfg.T;
    p.B = cfg.B;
    p.s = obj.sparsity();
    p.H = cc.H();
    p.L = cc.L();
    p.sigma = cfg.sigma;
    p.minimizer_l1 = obj.optimum().l1_norm;

    const auto it = cfg.overrides.find(alg);
    if (it == cfg.overrides.end()) return p;
    const bool baseline = alg == Algorithm::GD;
    for (const auto& [key, v] : it->second) {
        const std::string where = "overrides." + std::string(to_string(alg)) + "." + key;
        auto positive = [&](double x) {
            if (!(x > 0.0)) throw InvalidConfig(where, "must be positive");
            return x;
        };
        if (key == "c_lambda") p.c_lambda = positive(v);
        else if (key == "c_eta") {
            // GD and the selection subroutine only have one-point step constants
            if (baseline || alg == Algorithm::LassoGD) p.flaxman_c_eta = positive(v);
            else p.c_eta = positive(v);
        } else if (key == "c_delta") {
            if (baseline) p.flaxman_c_delta = positive(v);
            else p.c_delta = positive(v);
        } else if (key == "c_n") p.c_n = positive(v);
        else if (key == "omega") p.omega = positive(v);
        else if (key == "n") {
            if (v < 1 || v != std::floor(v)) throw InvalidConfig(where, "must be a positive integer");
            p.n = static_cast<Index>(v);
        } else if (key == "delta") p.delta = positive(v);
        else if (key == "eta") p.eta = positive(v);
        else if (key == "lambda") p.lambda = positive(v);
        else if (key == "a") {
            if (!(v > 1.0 && v <= 2.0)) throw InvalidConfig(where, "must lie in (1, 2]");
            p.a = v;
        } else if (key == "zeta") {
            if (!(v >= 0.0 && v < 1.0)) throw InvalidConfig(where, "must lie in [0, 1)");
            p.zeta = v;
        } else if (key == "H") {
            if (v < 0.0) throw InvalidConfig(where, "must be non-negative");
            p.H = v;
        } else if (key == "L") {
            if (v < 0.0) throw InvalidConfig(where, "must be non-negative");
            p.L = v;
        } else if (key == "flaxman_c_eta") p.flaxman_c_eta = positive(v);
        else if (key == "flaxman_c_delta") p.flaxman_c_delta = positive(v);
    }
    return p;
}

}  // namespace szo::harness
