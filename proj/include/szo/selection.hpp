#pragma once

#include <szo/core.hpp>
#include <szo/flaxman.hpp>
#include <szo/lasso.hpp>
#include <szo/oracle.hpp>
#include <szo/params.hpp>
#include <szo/regret.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <vector>

namespace szo {

/// {i : |g_i| >= eta}, ascending.
inline std::vector<Index> threshold_support(const Vector& g, double eta) {
    require(eta > 0.0, "threshold eta must be positive");
    std::vector<Index> out;
    for (Index i = 0; i < g.size(); ++i)
        if (std::abs(g[i]) >= eta) out.push_back(i);
    return out;
}

inline std::vector<Index> set_union(const std::vector<Index>& a, const std::vector<Index>& b) {
    std::vector<Index> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

struct SelectionParams {
    std::int64_t T = 0;
    Index s = 1;
    std::int64_t T_prime = 0;  // floor(T / 2s)
    double delta = 0.0;
    double lambda = 0.0;
    double eta = 0.0;  // omega * lambda
    bool spend_leftover = true;
    FlaxmanParams flaxman;
};

inline SelectionParams resolve_selection_params(const OptimizerParams& op, Index d) {
    op.validate_common();
    require(op.T >= 4 * op.s, "component selection needs T >= 4s");
    const double log_d = std::log(static_cast<double>(std::max<Index>(d, 2)));
    const double T = static_cast<double>(op.T);
    const double s = static_cast<double>(op.s);

    SelectionParams p;
    p.T = op.T;
    p.s = op.s;
    p.T_prime = op.T / (2 * op.s);
    if (op.delta) {
        p.delta = *op.delta;
    } else {
        require(op.sigma > 0.0 && op.H > 0.0,
                "the default probing radius needs sigma > 0 and H > 0; set delta explicitly");
        p.delta = op.c_delta * std::pow(op.sigma * op.sigma * s * log_d / (op.H * op.H * T), 0.25);
    }
    require(p.delta > 0.0, "probing radius delta must be positive");
    p.lambda = op.lambda ? *op.lambda
                         : op.c_lambda * (op.sigma / p.delta * std::sqrt(s * log_d / T) + p.delta * op.H);
    require(p.lambda > 0.0, "lambda must be positive");
    p.eta = op.omega * p.lambda;
    p.flaxman = resolve_flaxman_params(op, {});
    return p;
}

struct SelectionResult {
    Vector x_final;
    RegretTrace trace;
    std::vector<Index> S_hat;
    std::vector<std::vector<Index>> support_history;  // S_hat after each round
    std::int64_t rounds = 0;
    std::int64_t queries = 0;
};

/// Successive component selection: alternate a Lasso gradient estimate at
/// the current point, union of thresholded coordinates into S_hat, and a
/// one-point run restricted to S_hat. Stops once |S_hat| reaches s, after s
/// rounds, or when a round adds nothing.
template <ZerothOrderOracle O>
SelectionResult successive_select(O& oracle, const SelectionParams& p, Rng& rng) {
    const Index d = oracle.dim();
    require(p.T_prime >= 2, "per-round budget T' must be at least 2");
    if (remaining_budget(oracle) < p.T) throw BudgetExhausted(oracle.queries_used() + remaining_budget(oracle));
    const std::int64_t start = oracle.queries_used();

    auto restricted = [&](const std::vector<Index>& support) {
        FlaxmanParams fp = p.flaxman;
        fp.active = support;
        return fp;
    };

    SelectionResult res;
    Vector x_prev = Vector::Zero(d);
    Vector x_cur = x_prev;
    std::vector<Index> S;
    std::vector<Index> S_prev;
    std::int64_t t = 0;
    while (static_cast<Index>(S.size()) < p.s && t < p.s && (t == 0 || S != S_prev)) {
        ++t;
        x_prev = x_cur;
        const GradientEstimate est = estimate_gradient(oracle, x_prev, p.T_prime, p.delta, p.lambda, rng);
        S_prev = S;
        S = set_union(S_prev, threshold_support(est.fit.g_hat, p.eta));
        res.support_history.push_back(S);
        if (!S.empty()) x_cur = run_flaxman(oracle, p.T_prime, x_prev, restricted(S), rng).x_out;
    }
    res.rounds = t;
    Vector out = static_cast<Index>(S.size()) == p.s ? x_cur : x_prev;

    const std::int64_t leftover = p.T - (oracle.queries_used() - start);
    if (p.spend_leftover && !S.empty() && leftover >= 1)
        out = run_flaxman(oracle, leftover, out, restricted(S), rng).x_out;

    observe(oracle, out);
    res.x_final = out;
    res.S_hat = S;
    res.queries = oracle.queries_used() - start;
    res.trace = trace_of(oracle);
    return res;
}

template <ZerothOrderOracle O>
SelectionResult successive_select(O& oracle, const OptimizerParams& op, Rng& rng) {
    return successive_select(oracle, resolve_selection_params(op, oracle.dim()), rng);
}

}  // namespace szo
