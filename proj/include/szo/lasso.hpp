#pragma once

#include <szo/core.hpp>
#include <szo/oracle.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace szo {

/// n Rademacher probes around a center and their normalized responses
/// y_tilde_i = y_i / delta, with y_i observed at center + delta * z_i.
struct ProbeBatch {
    Vector center;
    double delta = 0.0;
    Matrix Z;  // n x d, entries exactly +-1
    Vector y_tilde;

    Index n() const noexcept { return Z.rows(); }
    Index d() const noexcept { return Z.cols(); }
};

struct LassoOptions {
    double tol = 1e-8;     // max coordinate change over a sweep
    Index max_sweeps = 0;  // 0 selects max(10 (d + 1), 10000)
    bool record_objective = false;
};

struct LassoFit {
    Vector g_hat;
    double mu_hat = 0.0;
    double lambda = 0.0;
    Index iterations = 0;
    bool converged = false;
    double final_gap = 0.0;
    /// Penalized objective after each sweep; filled when requested.
    std::vector<double> sweep_objective;
};

struct GradientEstimate {
    LassoFit fit;
    Vector g_tilde;
    std::optional<Vector> g_tw;
    double delta = 0.0;
    std::int64_t queries_spent = 0;

    /// The vector an optimizer should step along.
    const Vector& direction() const { return g_tw ? *g_tw : g_tilde; }
};

/// i.i.d. uniform +-1 entries, filled probe by probe.
inline Matrix sample_rademacher(Index n, Index d, Rng& rng) {
    require(n >= 1 && d >= 1, "rademacher design needs n >= 1 and d >= 1");
    Matrix Z(n, d);
    std::uint64_t bits = 0;
    int left = 0;
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < d; ++j) {
            if (left == 0) {
                bits = rng();
                left = 64;
            }
            Z(i, j) = (bits & 1u) ? 1.0 : -1.0;
            bits >>= 1;
            --left;
        }
    }
    return Z;
}

/// Queries the oracle once per row of a given sign design.
template <ZerothOrderOracle O>
ProbeBatch probe(O& oracle, const Vector& center, Matrix Z, double delta) {
    require(delta > 0.0, "probing radius delta must be positive");
    require(Z.cols() == center.size(), "design width must match the center's dimension");
    require((Z.array().abs() == 1.0).all(), "probe design entries must be +-1");
    observe(oracle, center);
    ProbeBatch batch;
    batch.center = center;
    batch.delta = delta;
    batch.y_tilde.resize(Z.rows());
    Vector point(center.size());
    for (Index i = 0; i < Z.rows(); ++i) {
        point = center + delta * Z.row(i).transpose();
        batch.y_tilde[i] = oracle.query(point) / delta;
    }
    batch.Z = std::move(Z);
    return batch;
}

template <ZerothOrderOracle O>
ProbeBatch build_probe_batch(O& oracle, const Vector& center, Index n, double delta, Rng& rng) {
    require(delta > 0.0, "probing radius delta must be positive");
    if (remaining_budget(oracle) < n) throw BudgetExhausted(oracle.queries_used() + remaining_budget(oracle));
    return probe(oracle, center, sample_rademacher(n, center.size(), rng), delta);
}

inline double soft_threshold(double rho, double t) {
    if (rho > t) return rho - t;
    if (rho < -t) return rho + t;
    return 0.0;
}

/// (1/n) ||y - Z g - mu 1||^2 + lambda (||g||_1 + |mu|)
inline double lasso_objective(const Matrix& Z, const Vector& y, const Vector& g, double mu, double lambda) {
    const Vector r = (y - Z * g).array() - mu;
    return r.squaredNorm() / static_cast<double>(Z.rows()) + lambda * (g.lpNorm<1>() + std::abs(mu));
}

inline double lasso_objective(const ProbeBatch& batch, const LassoFit& fit) {
    return lasso_objective(batch.Z, batch.y_tilde, fit.g_hat, fit.mu_hat, fit.lambda);
}

/// ||(1/n) [Z 1]^T (y - Z g - mu 1)||_inf; at a Lasso solution this is at most lambda/2.
inline double kkt_residual(const ProbeBatch& batch, const LassoFit& fit) {
    const Vector r = (batch.y_tilde - batch.Z * fit.g_hat).array() - fit.mu_hat;
    const double n = static_cast<double>(batch.n());
    const double slope_part = (batch.Z.transpose() * r).cwiseAbs().maxCoeff() / n;
    return std::max(slope_part, std::abs(r.sum()) / n);
}

/// Cyclic coordinate descent over (g_1..g_d, mu). With +-1 columns every
/// column has unit empirical second moment, so each coordinate update is a
/// closed-form soft threshold at lambda/2.
inline LassoFit solve_lasso(const ProbeBatch& batch, double lambda, const LassoOptions& opts = {}) {
    const Index n = batch.n();
    const Index d = batch.d();
    require(n >= 1 && d >= 1, "empty probe batch");
    require(batch.y_tilde.size() == n, "response length must match the number of probes");
    require(lambda >= 0.0, "lambda must be non-negative");
    require(lambda > 0.0 || n > d, "lambda = 0 requires more probes than dimensions");
    if (!batch.y_tilde.allFinite()) throw NonFinite("probe responses contain NaN or Inf");

    const Index max_sweeps = opts.max_sweeps > 0 ? opts.max_sweeps : std::max<Index>(10 * (d + 1), 10000);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double t = lambda / 2.0;

    LassoFit fit;
    fit.lambda = lambda;
    fit.g_hat = Vector::Zero(d);
    Vector r = batch.y_tilde;

    for (Index sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (Index j = 0; j < d; ++j) {
            const double old = fit.g_hat[j];
            const double rho = inv_n * batch.Z.col(j).dot(r) + old;
            const double updated = soft_threshold(rho, t);
            const double change = updated - old;
            if (change != 0.0) {
                r.noalias() -= change * batch.Z.col(j);
                fit.g_hat[j] = updated;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        {
            const double old = fit.mu_hat;
            const double updated = soft_threshold(inv_n * r.sum() + old, t);
            const double change = updated - old;
            if (change != 0.0) {
                r.array() -= change;
                fit.mu_hat = updated;
                max_change = std::max(max_change, std::abs(change));
            }
        }
        fit.iterations = sweep + 1;
        fit.final_gap = max_change;
        if (opts.record_objective)
            fit.sweep_objective.push_back(inv_n * r.squaredNorm() +
                                          lambda * (fit.g_hat.lpNorm<1>() + std::abs(fit.mu_hat)));
        if (max_change < opts.tol) {
            fit.converged = true;
            break;
        }
    }
    return fit;
}

/// g_tilde = g_hat + (1/m) Z^T (y - Z g_hat - mu_hat 1), m = rows of Z.
inline Vector debias(const LassoFit& fit, const ProbeBatch& batch) {
    if (fit.g_hat.size() != batch.d() || batch.y_tilde.size() != batch.n())
        throw InvalidArgument("fit and probe batch dimensions disagree");
    const Vector r = (batch.y_tilde - batch.Z * fit.g_hat).array() - fit.mu_hat;
    return fit.g_hat + (batch.Z.transpose() * r) / static_cast<double>(batch.n());
}

inline GradientEstimate estimate_from_batch(const ProbeBatch& batch, double lambda,
                                            const LassoOptions& opts = {}) {
    GradientEstimate est;
    est.fit = solve_lasso(batch, lambda, opts);
    est.g_tilde = debias(est.fit, batch);
    est.delta = batch.delta;
    est.queries_spent = batch.n();
    return est;
}

template <ZerothOrderOracle O>
GradientEstimate estimate_gradient(O& oracle, const Vector& center, Index n, double delta, double lambda,
                                   Rng& rng, const LassoOptions& opts = {}) {
    return estimate_from_batch(build_probe_batch(oracle, center, n, delta, rng), lambda, opts);
}

/// Penalty as a function of the probing radius used for a batch.
using LambdaRule = std::function<double(double delta)>;

/// g_tw = 2 g_tilde(delta/2) - g_tilde(delta), from one batch at each radius.
inline GradientEstimate twice_debias(const ProbeBatch& half_radius, const ProbeBatch& full_radius,
                                     const LambdaRule& lambda_for, const LassoOptions& opts = {}) {
    require(half_radius.d() == full_radius.d(), "batches disagree on dimension");
    GradientEstimate half = estimate_from_batch(half_radius, lambda_for(half_radius.delta), opts);
    GradientEstimate full = estimate_from_batch(full_radius, lambda_for(full_radius.delta), opts);
    GradientEstimate out = std::move(full);
    out.g_tw = 2.0 * half.g_tilde - out.g_tilde;
    out.queries_spent = half_radius.n() + full_radius.n();
    return out;
}

template <ZerothOrderOracle O>
GradientEstimate twice_debias_estimate(O& oracle, const Vector& center, Index n, double delta,
                                       const LambdaRule& lambda_for, Rng& rng, const LassoOptions& opts = {}) {
    require(delta > 0.0, "probing radius delta must be positive");
    if (remaining_budget(oracle) < 2 * n)
        throw BudgetExhausted(oracle.queries_used() + remaining_budget(oracle));
    ProbeBatch half = build_probe_batch(oracle, center, n, delta / 2.0, rng);
    ProbeBatch full = build_probe_batch(oracle, center, n, delta, rng);
    return twice_debias(half, full, lambda_for, opts);
}

/// lambda = c (sigma/delta sqrt(log d / n) + delta H)
inline double default_lambda(double sigma, double delta, Index n, Index d, double H, double c = 1.0) {
    const double log_d = std::log(static_cast<double>(std::max<Index>(d, 2)));
    return c * (sigma / delta * std::sqrt(log_d / static_cast<double>(n)) + delta * H);
}

/// Radius equating the stochastic and curvature terms of the error envelope.
inline double balanced_delta(double sigma, double H, Index n, Index d) {
    require(H > 0.0, "balanced delta needs H > 0");
    const double log_d = std::log(static_cast<double>(std::max<Index>(d, 2)));
    return std::sqrt(sigma * std::sqrt(log_d / static_cast<double>(n)) / H);
}

}  // namespace szo
