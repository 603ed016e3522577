#pragma once

#include <szo/core.hpp>
#include <szo/oracle.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace szo {

struct RegretRow {
    std::int64_t queries_used = 0;
    double f_iterate = 0.0;
    double simple_regret = 0.0;
    double cum_regret_iter = 0.0;
    double cum_regret_query = 0.0;
};

using RegretTrace = std::vector<RegretRow>;

/// Wraps an oracle and records regret at checkpoint query counts.
///
/// Every query is charged to the iterate most recently announced through
/// observe(); cumulative regret over iterates is the running mean of
/// f(iterate) - f*, over queries the running mean of f(query point) - f*.
/// Regrets use the noiseless function, never the oracle's answers.
template <ZerothOrderOracle O>
class RegretMonitor {
  public:
    using Truth = std::function<double(const Vector&)>;

    RegretMonitor(O& inner, Truth truth, double f_star, std::vector<std::int64_t> checkpoints)
        : inner_(inner), truth_(std::move(truth)), f_star_(f_star), checkpoints_(std::move(checkpoints)) {
        std::sort(checkpoints_.begin(), checkpoints_.end());
        checkpoints_.erase(std::unique(checkpoints_.begin(), checkpoints_.end()), checkpoints_.end());
        checkpoints_.erase(std::remove_if(checkpoints_.begin(), checkpoints_.end(),
                                          [](std::int64_t c) { return c <= 0; }),
                           checkpoints_.end());
    }

    double query(const Vector& x) {
        const double y = inner_.query(x);
        ++count_;
        const double f_query = truth_(x);
        sum_query_ += f_query - f_star_;
        sum_iter_ += (have_iterate_ ? f_iterate_ : f_query) - f_star_;
        while (next_ < checkpoints_.size() && checkpoints_[next_] < count_) ++next_;
        if (next_ < checkpoints_.size() && checkpoints_[next_] == count_) {
            record(have_iterate_ ? f_iterate_ : f_query);
            ++next_;
        }
        return y;
    }

    void observe(const Vector& iterate, const Vector& output) {
        f_iterate_ = truth_(iterate);
        f_output_ = &iterate == &output ? f_iterate_ : truth_(output);
        have_iterate_ = true;
    }

    /// Closes the trace with the algorithm's returned point. Adds a final row
    /// unless the last checkpoint coincided with the final query.
    void finish(const Vector& x_out) {
        f_output_ = truth_(x_out);
        if (!have_iterate_) f_iterate_ = f_output_;
        have_iterate_ = true;
        if (count_ == 0) return;
        if (!rows_.empty() && rows_.back().queries_used == count_) {
            rows_.back().simple_regret = f_output_ - f_star_;
            return;
        }
        record(f_iterate_);
    }

    std::int64_t queries_used() const { return count_; }
    Index dim() const { return inner_.dim(); }
    std::int64_t remaining() const { return remaining_budget(inner_); }
    const RegretTrace& trace() const noexcept { return rows_; }
    double f_star() const noexcept { return f_star_; }

  private:
    void record(double f_iter) {
        RegretRow row;
        row.queries_used = count_;
        row.f_iterate = f_iter;
        row.simple_regret = (have_iterate_ ? f_output_ : f_iter) - f_star_;
        row.cum_regret_iter = sum_iter_ / static_cast<double>(count_);
        row.cum_regret_query = sum_query_ / static_cast<double>(count_);
        rows_.push_back(row);
    }

    O& inner_;
    Truth truth_;
    double f_star_;
    std::vector<std::int64_t> checkpoints_;
    std::size_t next_ = 0;
    std::int64_t count_ = 0;
    double sum_iter_ = 0.0;
    double sum_query_ = 0.0;
    double f_iterate_ = 0.0;
    double f_output_ = 0.0;
    bool have_iterate_ = false;
    RegretTrace rows_;
};

/// Trace of a monitored oracle; empty for plain oracles.
template <ZerothOrderOracle O>
RegretTrace trace_of(const O& oracle) {
    if constexpr (requires { oracle.trace(); })
        return oracle.trace();
    else
        return {};
}

/// Thirty log-spaced query counts from 1000 to T (fewer if T is small).
inline std::vector<std::int64_t> default_checkpoints(std::int64_t T, int count = 30,
                                                     std::int64_t first = 1000) {
    std::vector<std::int64_t> out;
    if (T <= 0) return out;
    if (T <= first) return {T};
    const double lo = std::log(static_cast<double>(first));
    const double hi = std::log(static_cast<double>(T));
    for (int i = 0; i < count; ++i) {
        const double t = count == 1 ? hi : lo + (hi - lo) * i / (count - 1);
        auto c = static_cast<std::int64_t>(std::llround(std::exp(t)));
        c = std::clamp<std::int64_t>(c, first, T);
        if (out.empty() || c > out.back()) out.push_back(c);
    }
    if (out.back() != T) out.push_back(T);
    return out;
}

}  // namespace szo
