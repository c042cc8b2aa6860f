#pragma once

// Statistical self-test of the variate generators: sample means against
// law-of-large-numbers bounds, sign checks, and a Kolmogorov-Smirnov test of
// the exponential against its analytic CDF.

#include "s2s/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

namespace s2s {

struct Samplers {
    std::function<double(double, RngStream&)> exponential = sample_exponential;
    std::function<double(double, double, RngStream&)> truncated_normal = sample_truncated_normal;
    std::function<std::int64_t(double, double, RngStream&)> batch_size = sample_batch_size;
};

struct CheckResult {
    std::string distribution;
    std::string statistic;
    double value = 0.0;
    double low = 0.0;
    double high = 0.0;

    bool passed() const noexcept { return value >= low && value <= high; }
};

/// One-sample KS distance between `draws` and Exponential(mean).
inline double ks_statistic_exponential(std::vector<double> draws, double mean) {
    std::sort(draws.begin(), draws.end());
    const auto n = static_cast<double>(draws.size());
    double d = 0.0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const double cdf = draws[i] <= 0.0 ? 0.0 : -std::expm1(-draws[i] / mean);
        const double k = static_cast<double>(i);
        d = std::max({d, (k + 1.0) / n - cdf, cdf - k / n});
    }
    return d;
}

/// Asymptotic two-sided 1% critical value of the KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

struct DrawSummary {
    double mean = 0.0;
    double stddev = 0.0;
    double min = std::numeric_limits<double>::infinity();
    std::size_t negatives = 0;
};

inline DrawSummary describe(const std::vector<double>& xs) {
    DrawSummary s;
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
        s.min = std::min(s.min, x);
        if (x < 0.0) ++s.negatives;
    }
    s.mean = sum / static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stddev = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return s;
}

/// Mean bounds are calibrated at 100,000 draws and widen as 1/sqrt(n) for
/// smaller samples. The KS test uses at most the first 10,000 draws.
inline std::vector<CheckResult> validate_distributions(std::size_t samples, std::uint64_t seed,
                                                       const Samplers& samplers = {}) {
    if (samples < 2) samples = 2;
    const double widen = std::sqrt(100000.0 / static_cast<double>(samples));
    std::vector<CheckResult> out;

    {
        RngStream stream(seed, StreamPurpose::time_to_picture);
        std::vector<double> xs(samples);
        for (auto& x : xs) x = samplers.exponential(240.0, stream);
        const auto s = describe(xs);
        out.push_back({"exponential(240)", "mean", s.mean, 240.0 - 4.0 * widen, 240.0 + 4.0 * widen});
        out.push_back({"exponential(240)", "negative draws", static_cast<double>(s.negatives), 0.0, 0.0});
        xs.resize(std::min<std::size_t>(samples, 10000));
        out.push_back({"exponential(240)", "KS statistic", ks_statistic_exponential(xs, 240.0), 0.0,
                       ks_critical_1pct(xs.size())});
    }
    {
        RngStream stream(seed, StreamPurpose::transfer_to_sat);
        std::vector<double> xs(samples);
        for (auto& x : xs) x = samplers.truncated_normal(30.0, 6.0, stream);
        const auto s = describe(xs);
        out.push_back({"truncated_normal(30, 6)", "mean", s.mean, 30.0 - 0.15 * widen, 30.0 + 0.15 * widen});
        out.push_back({"truncated_normal(30, 6)", "negative draws", static_cast<double>(s.negatives), 0.0, 0.0});
    }
    {
        RngStream stream(seed, StreamPurpose::downlink_to_shooter);
        std::vector<double> xs(samples);
        for (auto& x : xs) x = samplers.truncated_normal(6.0, 0.6, stream);
        const auto s = describe(xs);
        out.push_back({"truncated_normal(6, 0.6)", "std", s.stddev, 0.6 * 0.95, 0.6 * 1.05});
        out.push_back({"truncated_normal(6, 0.6)", "negative draws", static_cast<double>(s.negatives), 0.0, 0.0});
    }
    for (const auto& [mean, sd, width] : {std::tuple{20.0, 5.0, 0.1}, std::tuple{10.0, 2.5, 0.1}}) {
        RngStream stream(seed, StreamPurpose::batch_size);
        std::vector<double> xs(samples);
        for (auto& x : xs) x = static_cast<double>(samplers.batch_size(mean, sd, stream));
        const auto s = describe(xs);
        const std::string name = "batch_size(" + std::to_string(static_cast<int>(mean)) + ")";
        out.push_back({name, "mean", s.mean, mean - width * widen, mean + width * widen});
        out.push_back({name, "negative draws", static_cast<double>(s.negatives), 0.0, 0.0});
    }
    return out;
}

} // namespace s2s
