#pragma once

#include <szo/core.hpp>

#include <cstdint>
#include <optional>

namespace szo {

/// Every tunable of the three optimizers. Problem constants (T, B, s, H, L,
/// sigma) feed the default schedules; an explicit n/delta/lambda/eta/a
/// replaces the corresponding schedule, and the c_* multipliers scale it.
struct OptimizerParams {
    std::int64_t T = 0;
    double B = 1.0;
    Index s = 1;
    double H = 1.0;
    double L = 0.0;
    double sigma = 0.0;

    std::optional<Index> n;
    std::optional<double> delta;
    std::optional<double> lambda;
    std::optional<double> eta;
    std::optional<double> a;
    double omega = 2.0;

    double c_n = 1.0;
    double c_delta = 1.0;
    double c_lambda = 1.0;
    double c_eta = 1.0;

    // one-point baseline, as the standalone GD method or the restricted subroutine
    std::optional<double> flaxman_c_eta;    // default B
    std::optional<double> flaxman_c_delta;  // default 0.25 min(1, B)
    double zeta = 0.1;

    /// ||x*||_1 when known; checked against B before any query.
    std::optional<double> minimizer_l1;

    void validate_common() const {
        require(T >= 1, "query budget T must be at least 1");
        require(B > 0.0, "l1 radius B must be positive");
        require(s >= 1, "sparsity s must be at least 1");
        require(H >= 0.0 && L >= 0.0 && sigma >= 0.0, "H, L and sigma must be non-negative");
        require(omega > 0.0, "omega must be positive");
        require(c_n > 0.0 && c_delta > 0.0 && c_lambda > 0.0 && c_eta > 0.0, "schedule constants must be positive");
        require(zeta >= 0.0 && zeta < 1.0, "zeta must lie in [0, 1)");
        if (minimizer_l1) require(B >= *minimizer_l1 - 1e-12, "B is smaller than the minimizer's l1 norm");
    }
};

}  // namespace szo
