#pragma once

#include <szo/core.hpp>
#include <szo/oracle.hpp>
#include <szo/params.hpp>
#include <szo/projection.hpp>
#include <szo/regret.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace szo {

/// Uniform direction on the unit sphere of R^k.
inline Vector sample_sphere(Index k, Rng& rng) {
    require(k >= 1, "sphere dimension must be at least 1");
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector u(k);
    double norm = 0.0;
    do {
        for (Index i = 0; i < k; ++i) u[i] = normal(rng);
        norm = u.norm();
    } while (norm == 0.0);
    return u / norm;
}

/// One-point sphere-sampling baseline. Step t uses radius
/// c_delta t^(-1/4) and step size c_eta t^(-3/4).
struct FlaxmanParams {
    double c_delta = 0.25;
    double c_eta = 1.0;
    double zeta = 0.1;
    std::vector<Index> active;  // coordinates being optimized
    double B = 1.0;

    double delta_at(std::int64_t t) const { return c_delta * std::pow(static_cast<double>(t), -0.25); }
    double eta_at(std::int64_t t) const { return c_eta * std::pow(static_cast<double>(t), -0.75); }
    double inner_radius() const { return (1.0 - zeta) * B; }

    void validate(Index d) const {
        require(c_delta > 0.0 && c_eta > 0.0, "baseline constants must be positive");
        require(zeta >= 0.0 && zeta < 1.0, "zeta must lie in [0, 1)");
        require(B > 0.0, "l1 radius B must be positive");
        require(!active.empty(), "baseline needs at least one active coordinate");
        for (Index i : active) require(i >= 0 && i < d, "active coordinate out of range");
    }
};

inline std::vector<Index> all_coordinates(Index d) {
    std::vector<Index> out(static_cast<std::size_t>(d));
    std::iota(out.begin(), out.end(), Index{0});
    return out;
}

inline Vector gather(const Vector& x, const std::vector<Index>& idx) {
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Index>(k)] = x[idx[k]];
    return out;
}

inline void scatter(Vector& x, const std::vector<Index>& idx, const Vector& values) {
    for (std::size_t k = 0; k < idx.size(); ++k) x[idx[k]] = values[static_cast<Index>(k)];
}

/// One-point gradient estimate (k / delta) y u from a single query at x + delta u.
inline Vector one_point_gradient(double y, const Vector& u, double delta) {
    return (static_cast<double>(u.size()) / delta) * y * u;
}

/// One iteration at step index t >= 1; only active coordinates change.
template <ZerothOrderOracle O>
Vector flaxman_step(O& oracle, const Vector& x, const FlaxmanParams& p, std::int64_t t, Rng& rng) {
    const auto k = static_cast<Index>(p.active.size());
    const double delta = p.delta_at(t);
    const Vector u = sample_sphere(k, rng);
    Vector probe = x;
    scatter(probe, p.active, gather(x, p.active) + delta * u);
    const double y = oracle.query(probe);
    const Vector g = one_point_gradient(y, u, delta);
    Vector next = x;
    scatter(next, p.active, project_l1(gather(x, p.active) - p.eta_at(t) * g, p.inner_radius()));
    return next;
}

struct FlaxmanResult {
    Vector x_out;
    RegretTrace trace;
    std::int64_t queries = 0;
};

/// Exactly `budget` one-point steps from x_start (first pulled into the
/// shrunken ball on the active coordinates).
template <ZerothOrderOracle O>
FlaxmanResult run_flaxman(O& oracle, std::int64_t budget, const Vector& x_start, const FlaxmanParams& p,
                          Rng& rng) {
    require(budget >= 1, "baseline budget must be at least 1");
    require(x_start.size() == oracle.dim(), "start point dimension mismatch");
    p.validate(oracle.dim());
    const std::int64_t start = oracle.queries_used();

    Vector x = x_start;
    scatter(x, p.active, project_l1(gather(x, p.active), p.inner_radius()));
    for (std::int64_t t = 1; t <= budget; ++t) {
        observe(oracle, x);
        x = flaxman_step(oracle, x, p, t, rng);
    }
    observe(oracle, x);

    FlaxmanResult res;
    res.x_out = x;
    scatter(res.x_out, p.active, project_l1(gather(x, p.active), p.B));
    res.queries = oracle.queries_used() - start;
    res.trace = trace_of(oracle);
    return res;
}

inline FlaxmanParams resolve_flaxman_params(const OptimizerParams& op, std::vector<Index> active) {
    FlaxmanParams p;
    p.B = op.B;
    p.zeta = op.zeta;
    p.c_eta = op.flaxman_c_eta ? *op.flaxman_c_eta : op.B;
    p.c_delta = op.flaxman_c_delta ? *op.flaxman_c_delta : 0.25 * std::min(1.0, op.B);
    p.active = std::move(active);
    return p;
}

/// Full-dimensional baseline run with budget T.
template <ZerothOrderOracle O>
FlaxmanResult run_gd(O& oracle, const OptimizerParams& op, Rng& rng) {
    op.validate_common();
    const Index d = oracle.dim();
    if (remaining_budget(oracle) < op.T) throw BudgetExhausted(oracle.queries_used() + remaining_budget(oracle));
    return run_flaxman(oracle, op.T, Vector::Zero(d), resolve_flaxman_params(op, all_coordinates(d)), rng);
}

}  // namespace szo
