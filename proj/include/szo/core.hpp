#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace szo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Pseudo-random engine used everywhere. Streams are deterministic for a
/// given seed within one standard-library implementation.
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
  public:
    using Error::Error;
};

class BudgetExhausted : public Error {
  public:
    BudgetExhausted(std::int64_t budget)
        : Error("query budget of " + std::to_string(budget) + " exhausted"), budget_(budget) {}
    std::int64_t budget() const noexcept { return budget_; }

  private:
    std::int64_t budget_;
};

class NonFinite : public Error {
  public:
    using Error::Error;
};

class InnerSolveFailed : public Error {
  public:
    InnerSolveFailed(double residual)
        : Error("mirror-descent inner solve left optimality residual " + std::to_string(residual)),
          residual_(residual) {}
    double residual() const noexcept { return residual_; }

  private:
    double residual_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidArgument(message);
}

/// splitmix64 finalizer; used for all seed derivation.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace szo
