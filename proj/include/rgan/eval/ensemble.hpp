#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rgan/error.hpp"

namespace rgan {

/// Per-time-index mean and population (1/N) variance over a trace set.
struct EnsembleStats {
    std::vector<double> mean;
    std::vector<double> variance;
    std::size_t count = 0;

    std::size_t length() const { return mean.size(); }
};

/// Streaming Welford accumulator; traces may arrive in any grouping.
class EnsembleAccumulator {
public:
    void add(std::span<const double> trace)
    {
        if (count_ == 0) {
            mean_.assign(trace.size(), 0.0);
            m2_.assign(trace.size(), 0.0);
        } else if (trace.size() != mean_.size()) {
            fail(ErrorCategory::dimension, "ensemble traces differ in length: " + std::to_string(trace.size()) +
                                               " vs " + std::to_string(mean_.size()));
        }
        ++count_;
        const double inv = 1.0 / static_cast<double>(count_);
        for (std::size_t t = 0; t < trace.size(); ++t) {
            const double d = trace[t] - mean_[t];
            mean_[t] += d * inv;
            m2_[t] += d * (trace[t] - mean_[t]);
        }
    }

    std::size_t count() const { return count_; }

    EnsembleStats stats() const
    {
        if (count_ == 0) fail(ErrorCategory::validation, "ensemble statistics need at least one trace");
        EnsembleStats s{mean_, m2_, count_};
        const double inv = 1.0 / static_cast<double>(count_);
        for (double& v : s.variance) v = v > 0.0 ? v * inv : 0.0;
        return s;
    }

private:
    std::size_t count_ = 0;
    std::vector<double> mean_, m2_;
};

inline EnsembleStats ensemble_stats(const std::vector<std::vector<double>>& traces)
{
    EnsembleAccumulator acc;
    for (const auto& t : traces) acc.add(t);
    return acc.stats();
}

/// Mean over time of the squared difference between two variance curves.
inline double variance_mse(const EnsembleStats& a, const EnsembleStats& b)
{
    if (a.variance.size() != b.variance.size() || a.variance.empty())
        fail(ErrorCategory::dimension, "variance_mse needs equal, non-empty lengths (" +
                                           std::to_string(a.variance.size()) + " vs " + std::to_string(b.variance.size()) + ")");
    double sum = 0.0;
    for (std::size_t t = 0; t < a.variance.size(); ++t) {
        const double d = a.variance[t] - b.variance[t];
        sum += d * d;
    }
    return sum / static_cast<double>(a.variance.size());
}

} // namespace rgan
