#pragma once

#include <szo/core.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace szo {

enum class Family { IdentityQuadratic, PolyDecayQuadratic, QuarticIdentity };

inline std::string_view to_string(Family f) {
    switch (f) {
        case Family::IdentityQuadratic: return "IdentityQuadratic";
        case Family::PolyDecayQuadratic: return "PolyDecayQuadratic";
        case Family::QuarticIdentity: return "QuarticIdentity";
    }
    return "?";
}

inline Family family_from_string(std::string_view name) {
    if (name == "IdentityQuadratic") return Family::IdentityQuadratic;
    if (name == "PolyDecayQuadratic") return Family::PolyDecayQuadratic;
    if (name == "QuarticIdentity") return Family::QuarticIdentity;
    throw InvalidArgument("unknown objective family '" + std::string(name) + "'");
}

struct ObjectiveSpec {
    Family family = Family::IdentityQuadratic;
    Index d = 0;
    Index s = 0;
    /// Drawn uniformly from [0, d) when absent.
    std::optional<std::vector<Index>> support;
    double decay_rate = 0.0;
    /// Linear/shift vector on the support, in support order; all ones when absent.
    std::optional<std::vector<double>> shift;
};

/// Upper bounds on the derivative norms over an l1 ball, as consumed by the
/// optimizer parameter schedules.
struct CertifiedConstants {
    double radius = 0.0;       // l1 radius of the certified region
    double gradient_l1 = 0.0;  // sup ||grad f||_1
    double hessian_l1 = 0.0;   // sup sum_ij |hess_ij|
    double hessian_lipschitz = 0.0;
    double H() const { return std::max(gradient_l1, hessian_l1); }
    double L() const { return hessian_lipschitz; }
};

struct Optimum {
    double value = 0.0;
    Vector point;
    double l1_norm = 0.0;
};

/// Synthetic sparse convex objective f(x) = f_S(x_S).
///
/// Every family is built from a diagonal Q (entries q_i on the support, in
/// increasing index order) and a shift b:
///   quadratic families:  f_S(x) = sum_i q_i x_i^2 + b_i x_i
///   quartic family:      f_S(x) = r^2 + r,  r = sum_i q_i (x_i - b_i)^2
class Objective {
  public:
    Objective(Family family, Index d, std::vector<Index> support, std::vector<double> q,
              std::vector<double> b)
        : family_(family), d_(d), support_(std::move(support)), q_(std::move(q)), b_(std::move(b)) {}

    Family family() const noexcept { return family_; }
    Index dim() const noexcept { return d_; }
    Index sparsity() const noexcept { return static_cast<Index>(support_.size()); }
    const std::vector<Index>& support() const noexcept { return support_; }
    const std::vector<double>& diagonal() const noexcept { return q_; }
    const std::vector<double>& shift() const noexcept { return b_; }

    double eval_true(const Vector& x) const {
        check_dim(x);
        if (is_quadratic()) {
            double f = 0.0;
            for (std::size_t k = 0; k < support_.size(); ++k) {
                const double xi = x[support_[k]];
                f += q_[k] * xi * xi + b_[k] * xi;
            }
            return f;
        }
        const double r = quartic_inner(x);
        return r * r + r;
    }

    double operator()(const Vector& x) const { return eval_true(x); }

    Vector grad_true(const Vector& x) const {
        check_dim(x);
        Vector g = Vector::Zero(d_);
        if (is_quadratic()) {
            for (std::size_t k = 0; k < support_.size(); ++k)
                g[support_[k]] = 2.0 * q_[k] * x[support_[k]] + b_[k];
            return g;
        }
        const double outer = 2.0 * quartic_inner(x) + 1.0;
        for (std::size_t k = 0; k < support_.size(); ++k)
            g[support_[k]] = outer * 2.0 * q_[k] * (x[support_[k]] - b_[k]);
        return g;
    }

    /// Dense d x d Hessian; only the support block is non-zero.
    Matrix hessian_true(const Vector& x) const {
        check_dim(x);
        Matrix h = Matrix::Zero(d_, d_);
        const auto s = support_.size();
        if (is_quadratic()) {
            for (std::size_t k = 0; k < s; ++k) h(support_[k], support_[k]) = 2.0 * q_[k];
            return h;
        }
        const double outer = 2.0 * quartic_inner(x) + 1.0;
        for (std::size_t i = 0; i < s; ++i) {
            const double ui = x[support_[i]] - b_[i];
            for (std::size_t j = 0; j < s; ++j) {
                const double uj = x[support_[j]] - b_[j];
                h(support_[i], support_[j]) = 8.0 * q_[i] * q_[j] * ui * uj;
            }
            h(support_[i], support_[i]) += 2.0 * q_[i] * outer;
        }
        return h;
    }

    Optimum optimum() const {
        Optimum opt;
        opt.point = Vector::Zero(d_);
        if (is_quadratic()) {
            for (std::size_t k = 0; k < support_.size(); ++k) {
                opt.point[support_[k]] = -b_[k] / (2.0 * q_[k]);
                opt.value -= b_[k] * b_[k] / (4.0 * q_[k]);
            }
        } else {
            for (std::size_t k = 0; k < support_.size(); ++k) opt.point[support_[k]] = b_[k];
        }
        opt.l1_norm = opt.point.lpNorm<1>();
        return opt;
    }

    double optimum_value() const { return optimum().value; }

    /// Bounds valid on {x : ||x||_1 <= radius}. Only x_S matters, so the
    /// bounds use ||x_S||_1 <= radius.
    CertifiedConstants certify(double radius) const {
        require(radius >= 0.0, "certification radius must be non-negative");
        const double q_max = *std::max_element(q_.begin(), q_.end());
        const double q_sum = std::accumulate(q_.begin(), q_.end(), 0.0);
        double b_l1 = 0.0;
        for (double v : b_) b_l1 += std::abs(v);

        CertifiedConstants c;
        c.radius = radius;
        if (is_quadratic()) {
            c.gradient_l1 = 2.0 * q_max * radius + b_l1;
            c.hessian_l1 = 2.0 * q_sum;
            c.hessian_lipschitz = 0.0;
            return c;
        }
        // ||u||_2^2 <= ||u||_1^2 <= U^2 with u = x_S - b
        const double u = radius + b_l1;
        const double r_max = q_max * u * u;
        c.gradient_l1 = (2.0 * r_max + 1.0) * 2.0 * q_max * u;
        c.hessian_l1 = 2.0 * q_sum * (2.0 * r_max + 1.0) + 8.0 * q_max * q_max * u * u;
        c.hessian_lipschitz = 24.0 * q_sum * q_max * u;
        return c;
    }

  private:
    bool is_quadratic() const noexcept { return family_ != Family::QuarticIdentity; }

    double quartic_inner(const Vector& x) const {
        double r = 0.0;
        for (std::size_t k = 0; k < support_.size(); ++k) {
            const double u = x[support_[k]] - b_[k];
            r += q_[k] * u * u;
        }
        return r;
    }

    void check_dim(const Vector& x) const {
        if (x.size() != d_)
            throw InvalidArgument("objective expects dimension " + std::to_string(d_) + ", got " +
                                  std::to_string(x.size()));
    }

    Family family_;
    Index d_;
    std::vector<Index> support_;
    std::vector<double> q_;
    std::vector<double> b_;
};

/// Uniformly random size-s subset of [0, d), sorted.
inline std::vector<Index> draw_support(Index d, Index s, Rng& rng) {
    std::vector<Index> all(static_cast<std::size_t>(d));
    std::iota(all.begin(), all.end(), Index{0});
    // partial Fisher-Yates
    for (Index i = 0; i < s; ++i) {
        std::uniform_int_distribution<Index> pick(i, d - 1);
        std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rng))]);
    }
    all.resize(static_cast<std::size_t>(s));
    std::sort(all.begin(), all.end());
    return all;
}

inline Objective make_objective(const ObjectiveSpec& spec, std::uint64_t seed) {
    require(spec.d >= 1, "objective dimension d must be at least 1");
    require(spec.s >= 1, "support size s must be at least 1");
    require(spec.s <= spec.d, "support size s exceeds dimension d");
    require(spec.decay_rate >= 0.0, "decay rate must be non-negative");

    std::vector<Index> support;
    if (spec.support) {
        support = *spec.support;
        require(static_cast<Index>(support.size()) == spec.s, "support must contain exactly s indices");
        std::sort(support.begin(), support.end());
        require(std::adjacent_find(support.begin(), support.end()) == support.end(),
                "support indices must be distinct");
        require(support.front() >= 0 && support.back() < spec.d, "support index out of range");
    } else {
        Rng rng(seed);
        support = draw_support(spec.d, spec.s, rng);
    }

    std::vector<double> b(static_cast<std::size_t>(spec.s), 1.0);
    if (spec.shift) {
        require(static_cast<Index>(spec.shift->size()) == spec.s, "shift must have s entries");
        b = *spec.shift;
    }

    std::vector<double> q(static_cast<std::size_t>(spec.s), 1.0);
    if (spec.family == Family::PolyDecayQuadratic) {
        // rank within the sorted support, 1-based
        for (std::size_t k = 0; k < q.size(); ++k)
            q[k] = std::pow(static_cast<double>(k + 1), -spec.decay_rate);
    }
    return Objective(spec.family, spec.d, std::move(support), std::move(q), std::move(b));
}

}  // namespace szo
