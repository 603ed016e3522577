#pragma once

#include <szo/core.hpp>
#include <szo/lasso.hpp>
#include <szo/oracle.hpp>
#include <szo/params.hpp>
#include <szo/projection.hpp>
#include <szo/regret.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace szo {

namespace detail {

// ||x||_p computed as m * N with m = max |x_i|, N = (sum (|x_i|/m)^p)^(1/p).
struct ScaledNorm {
    double max_abs = 0.0;
    double ratio_norm = 0.0;
};

inline ScaledNorm scaled_norm(const Vector& x, double p) {
    ScaledNorm out;
    out.max_abs = x.cwiseAbs().maxCoeff();
    if (out.max_abs == 0.0) return out;
    double acc = 0.0;
    for (Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]) / out.max_abs, p);
    out.ratio_norm = std::pow(acc, 1.0 / p);
    return out;
}

// gradient of (c/2) ||x||_p^2 with c = scale: c ||x||_p^(2-p) sign(x_i) |x_i|^(p-1)
inline Vector half_sq_norm_grad(const Vector& x, double p, double scale) {
    Vector g = Vector::Zero(x.size());
    const ScaledNorm sn = scaled_norm(x, p);
    if (sn.max_abs == 0.0) return g;
    const double front = scale * sn.max_abs * std::pow(sn.ratio_norm, 2.0 - p);
    for (Index i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) continue;
        const double r = std::abs(x[i]) / sn.max_abs;
        g[i] = std::copysign(front * std::pow(r, p - 1.0), x[i]);
    }
    return g;
}

}  // namespace detail

/// psi_a(x) = ||x||_a^2 / (2 (a - 1)), 1 < a <= 2.
inline double psi_value(const Vector& x, double a) {
    require(a > 1.0 && a <= 2.0, "potential exponent a must lie in (1, 2]");
    const auto sn = detail::scaled_norm(x, a);
    const double norm = sn.max_abs * sn.ratio_norm;
    return norm * norm / (2.0 * (a - 1.0));
}

inline Vector psi_grad(const Vector& x, double a) {
    require(a > 1.0 && a <= 2.0, "potential exponent a must lie in (1, 2]");
    if (a == 2.0) return x;
    return detail::half_sq_norm_grad(x, a, 1.0 / (a - 1.0));
}

/// Inverse of psi_grad: gradient of the convex conjugate
/// psi*(w) = (a - 1)/2 ||w||_b^2 with 1/a + 1/b = 1.
inline Vector psi_conjugate_grad(const Vector& w, double a) {
    require(a > 1.0 && a <= 2.0, "potential exponent a must lie in (1, 2]");
    if (a == 2.0) return w;
    const double b = a / (a - 1.0);
    return detail::half_sq_norm_grad(w, b, a - 1.0);
}

/// psi(x) - psi(anchor) - <grad psi(anchor), x - anchor>
inline double bregman_div(const Vector& x, const Vector& anchor, double a) {
    return psi_value(x, a) - psi_value(anchor, a) - psi_grad(anchor, a).dot(x - anchor);
}

/// 2 log d / (2 log d - 1), clamped to [1 + 1e-3, 2].
inline double default_exponent(Index d) {
    require(d >= 2, "the default potential exponent needs d >= 2");
    const double two_log = 2.0 * std::log(static_cast<double>(d));
    double a = two_log > 1.0 ? two_log / (two_log - 1.0) : 2.0;
    return std::clamp(a, 1.0 + 1e-3, 2.0);
}

struct MirrorParams {
    double a = 2.0;
    double eta = 1.0;
    double B = 1.0;
    std::int64_t T_prime = 0;
    Index n = 1;
    double delta = 1.0;
    double lambda = 1.0;
    bool use_twice = false;

    /// eta < 1/(2H): the step condition under which the regret analysis holds.
    bool step_condition_holds(double H) const { return H <= 0.0 || eta < 1.0 / (2.0 * H); }
};

struct MdUpdateOptions {
    double tol = 1e-8;
    int max_inner = 500;
    double fail_residual = 1e-4;
};

/// eta g^T (x - x_t) + D(x; x_t)
inline double md_objective(const Vector& x, const Vector& x_t, const Vector& g, double eta, double a) {
    return eta * g.dot(x - x_t) + bregman_div(x, x_t, a);
}

/// Frank-Wolfe gap of the update objective over the l1 ball at x; zero
/// exactly at the constrained minimizer.
inline double md_optimality_gap(const Vector& x, const Vector& x_t, const Vector& g, double eta, double a,
                                double B) {
    const Vector grad = eta * g + psi_grad(x, a) - psi_grad(x_t, a);
    return grad.dot(x) + B * grad.cwiseAbs().maxCoeff();
}

/// argmin over ||x||_1 <= B of eta g^T (x - x_t) + D(x; x_t).
///
/// Stationarity reads grad psi(x) = soft(theta, nu) with
/// theta = grad psi(x_t) - eta g and nu >= 0 the multiplier of the l1
/// constraint, so x = grad psi*(soft(theta, nu)); ||x(nu)||_1 is
/// non-increasing in nu and nu is found by bisection.
inline Vector md_update(const Vector& x_t, const Vector& g, const MirrorParams& p,
                        const MdUpdateOptions& opts = {}) {
    require(x_t.size() == g.size(), "iterate and gradient dimensions differ");
    require(p.B > 0.0 && p.eta > 0.0, "mirror step needs B > 0 and eta > 0");
    require(x_t.lpNorm<1>() <= p.B + 1e-9, "mirror step started outside the l1 ball");
    if (!g.allFinite()) throw NonFinite("gradient estimate contains NaN or Inf");

    const Vector theta = psi_grad(x_t, p.a) - p.eta * g;
    auto primal = [&](double nu) {
        Vector w(theta.size());
        for (Index i = 0; i < theta.size(); ++i) w[i] = soft_threshold(theta[i], nu);
        return psi_conjugate_grad(w, p.a);
    };

    Vector x = primal(0.0);
    if (x.lpNorm<1>() > p.B) {
        double lo = 0.0;
        double hi = theta.cwiseAbs().maxCoeff();
        Vector x_hi = Vector::Zero(theta.size());
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
            const double mid = 0.5 * (lo + hi);
            Vector x_mid = primal(mid);
            if (x_mid.lpNorm<1>() > p.B) {
                lo = mid;
            } else {
                hi = mid;
                x_hi = std::move(x_mid);
            }
        }
        x = std::move(x_hi);
    }

    const double gap = md_optimality_gap(x, x_t, g, p.eta, p.a, p.B);
    if (!(gap <= opts.fail_residual)) throw InnerSolveFailed(gap);
    return x;
}

struct MdResult {
    Vector x_out;
    Vector x_last;
    std::vector<Vector> iterates;  // x_0 .. x_T'
    RegretTrace trace;
    std::int64_t queries = 0;
};

/// T' mirror steps from x_0 = 0, each with gradient estimate(x_t). The
/// output is the last iterate, or the mean of x_1..x_T' when averaging.
template <ZerothOrderOracle O, class Estimator>
MdResult mirror_descent_epochs(O& oracle, Index d, const MirrorParams& p, bool average, Estimator&& estimate) {
    MdResult res;
    Vector x = Vector::Zero(d);
    Vector sum = Vector::Zero(d);
    res.iterates.push_back(x);
    const std::int64_t start = oracle.queries_used();
    for (std::int64_t t = 0; t < p.T_prime; ++t) {
        if (average && t > 0)
            observe(oracle, x, Vector(sum / static_cast<double>(t)));
        else
            observe(oracle, x);
        const Vector g = estimate(x);
        x = md_update(x, g, p);
        sum += x;
        res.iterates.push_back(x);
    }
    res.x_last = x;
    res.x_out = average && p.T_prime > 0 ? Vector(sum / static_cast<double>(p.T_prime)) : x;
    res.queries = oracle.queries_used() - start;
    res.trace = trace_of(oracle);
    return res;
}

/// Schedules for the plain (de-biased) and twice de-biased variants.
inline MirrorParams resolve_mirror_params(const OptimizerParams& op, Index d, bool twice) {
    op.validate_common();
    const double log_d = std::log(static_cast<double>(std::max<Index>(d, 2)));
    const double T = static_cast<double>(op.T);
    const double s = static_cast<double>(op.s);

    MirrorParams p;
    p.use_twice = twice;
    p.B = op.B;
    p.a = op.a ? *op.a : default_exponent(d);
    require(p.a > 1.0 && p.a <= 2.0, "potential exponent a must lie in (1, 2]");

    if (op.n) {
        p.n = *op.n;
    } else {
        const double raw = twice ? op.c_n * (1.0 + op.L) * std::pow(s, 2.0 / 3.0) * std::sqrt(T)
                                 : op.c_n * (1.0 + op.H) * std::sqrt(s * T);
        // the schedule may exceed the budget at small T; keep at least two epochs
        p.n = std::clamp<Index>(static_cast<Index>(std::floor(raw)), 1, std::max<Index>(1, op.T / 4));
    }
    require(p.n >= 1, "per-epoch probe count n must be at least 1");
    require(op.T >= 4 * p.n, "mirror descent needs T >= 4n");
    p.T_prime = op.T / (2 * p.n);

    const double n = static_cast<double>(p.n);
    if (twice) {
        p.eta = op.eta ? *op.eta : op.c_eta * op.B * std::pow(n, 2.0 / 3.0) * std::sqrt(log_d / T);
        p.delta = op.delta ? *op.delta : op.c_delta * std::cbrt(s * log_d / n);
        p.lambda = op.lambda ? *op.lambda : default_lambda(op.sigma, p.delta, p.n, d, op.H, op.c_lambda);
    } else {
        p.eta = op.eta ? *op.eta : op.c_eta * op.B * std::sqrt(n * log_d / T);
        p.delta = op.delta ? *op.delta : op.c_delta * std::sqrt(s * log_d / n);
        p.lambda = op.lambda ? *op.lambda : default_lambda(op.sigma, p.delta, 2 * p.n, d, op.H, op.c_lambda);
    }
    require(p.eta > 0.0 && p.delta > 0.0 && p.lambda > 0.0, "eta, delta and lambda must be positive");
    return p;
}

/// Mirror descent over the l1 ball with Lasso gradient estimates: de-biased
/// from a 2n batch, or twice de-biased from n probes at delta/2 and n at delta.
template <ZerothOrderOracle O>
MdResult run_md(O& oracle, const OptimizerParams& op, Rng& rng, bool twice = false) {
    const Index d = oracle.dim();
    const MirrorParams p = resolve_mirror_params(op, d, twice);
    if (remaining_budget(oracle) < 2 * p.n * p.T_prime)
        throw BudgetExhausted(oracle.queries_used() + remaining_budget(oracle));

    if (twice) {
        const double sigma = op.sigma;
        const double H = op.H;
        const double c = op.c_lambda;
        const std::optional<double> fixed = op.lambda;
        const Index n = p.n;
        LambdaRule rule = [=](double delta) {
            return fixed ? *fixed : default_lambda(sigma, delta, n, d, H, c);
        };
        return mirror_descent_epochs(oracle, d, p, true, [&](const Vector& x) {
            return twice_debias_estimate(oracle, x, p.n, p.delta, rule, rng).direction();
        });
    }
    return mirror_descent_epochs(oracle, d, p, false, [&](const Vector& x) {
        return estimate_gradient(oracle, x, 2 * p.n, p.delta, p.lambda, rng).g_tilde;
    });
}

}  // namespace szo
