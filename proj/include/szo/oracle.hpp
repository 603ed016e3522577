#pragma once

#include <szo/core.hpp>

#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <utility>

namespace szo {

/// Anything that answers noisy function-value queries and counts them.
template <class O>
concept ZerothOrderOracle = requires(O& o, const Vector& x) {
    { o.query(x) } -> std::convertible_to<double>;
    { o.queries_used() } -> std::convertible_to<std::int64_t>;
    { o.dim() } -> std::convertible_to<Index>;
};

/// Oracles that want to know where the optimizer currently stands (for
/// regret bookkeeping). `iterate` is the point queries are made around,
/// `output` is the point the algorithm would return if stopped now.
template <class O>
concept IterateObserver = requires(O& o, const Vector& x) { o.observe(x, x); };

template <ZerothOrderOracle O>
void observe(O& oracle, const Vector& iterate, const Vector& output) {
    if constexpr (IterateObserver<O>) oracle.observe(iterate, output);
}

template <ZerothOrderOracle O>
void observe(O& oracle, const Vector& iterate) {
    observe(oracle, iterate, iterate);
}

/// y = f(x) + xi with xi ~ N(0, sigma^2) i.i.d., optionally budget-capped.
template <class F>
class NoisyOracle {
  public:
    NoisyOracle(F f, Index dim, double sigma, std::uint64_t seed,
                std::optional<std::int64_t> budget = std::nullopt)
        : f_(std::move(f)), dim_(dim), sigma_(sigma), rng_(seed), budget_(budget) {
        require(sigma >= 0.0, "noise level sigma must be non-negative");
        require(!budget || *budget >= 0, "budget must be non-negative");
    }

    double query(const Vector& x) {
        if (budget_ && used_ >= *budget_) throw BudgetExhausted(*budget_);
        require(x.size() == dim_, "query dimension mismatch");
        ++used_;
        const double value = static_cast<double>(f_(x));
        if (sigma_ == 0.0) return value;
        return value + sigma_ * normal_(rng_);
    }

    std::int64_t queries_used() const noexcept { return used_; }
    std::optional<std::int64_t> budget() const noexcept { return budget_; }
    std::int64_t remaining() const noexcept {
        return budget_ ? *budget_ - used_ : std::numeric_limits<std::int64_t>::max();
    }
    Index dim() const noexcept { return dim_; }
    double sigma() const noexcept { return sigma_; }
    const F& function() const noexcept { return f_; }

  private:
    F f_;
    Index dim_;
    double sigma_;
    Rng rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::optional<std::int64_t> budget_;
    std::int64_t used_ = 0;
};

template <class F>
NoisyOracle(F, Index, double, std::uint64_t) -> NoisyOracle<F>;

template <ZerothOrderOracle O>
std::int64_t remaining_budget(const O& oracle) {
    if constexpr (requires { oracle.remaining(); })
        return oracle.remaining();
    else
        return std::numeric_limits<std::int64_t>::max();
}

}  // namespace szo
