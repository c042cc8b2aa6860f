#pragma once

// Wait-time aggregation and base-case comparison.
//
// "Total wait" is the mean satellite wait plus the mean downlink wait, in
// minutes. It is not end-to-end latency: service times are excluded.

#include "s2s/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace s2s {

struct MetricsSummary {
    std::string scenario_id;
    int replication = 0;
    std::uint64_t seed = 0;
    // Absent when no request completed.
    std::optional<double> mean_sat_wait_s;
    std::optional<double> mean_downlink_wait_s;
    std::optional<double> total_wait_min;
    std::size_t completed = 0;
    std::size_t incomplete = 0;
    double gs_processing_share = 0.0;

    bool waits_absent() const noexcept { return !total_wait_min.has_value(); }
};

/// Aggregate the completed requests of one replication. Requests still in
/// flight are censored from the means and counted as incomplete.
inline MetricsSummary summarize(std::span<const ImageRequest> requests, std::size_t generated) {
    MetricsSummary s;
    double sat_sum = 0.0;
    double downlink_sum = 0.0;
    double processing_sum = 0.0;
    double end_to_end_sum = 0.0;
    for (const auto& r : requests) {
        if (!r.completed()) continue;
        ++s.completed;
        sat_sum += r.sat_wait()->seconds();
        downlink_sum += r.downlink_wait()->seconds();
        processing_sum += r.ground_processing.seconds();
        end_to_end_sum += r.end_to_end()->seconds();
    }
    if (s.completed > generated) {
        throw std::logic_error("summarize: more completed requests than generated");
    }
    s.incomplete = generated - s.completed;
    if (s.completed > 0) {
        const auto n = static_cast<double>(s.completed);
        s.mean_sat_wait_s = sat_sum / n;
        s.mean_downlink_wait_s = downlink_sum / n;
        s.total_wait_min = (*s.mean_sat_wait_s + *s.mean_downlink_wait_s) / 60.0;
    }
    s.gs_processing_share = end_to_end_sum > 0.0 ? std::clamp(processing_sum / end_to_end_sum, 0.0, 1.0) : 0.0;
    return s;
}

inline double percent_change(double value, double base) {
    if (!(base > 0.0)) {
        throw std::invalid_argument("percent_change: base must be > 0, got " + std::to_string(base));
    }
    return 100.0 * (value - base) / base;
}

/// Signed, two decimals: "+6.10%", "-69.19%", "+0.00%".
inline std::string format_percent(double pct) {
    if (std::isnan(pct)) return "n/a";
    std::string s = fmt::format("{:+.2f}%", pct);
    if (s == "-0.00%") s = "+0.00%";
    return s;
}

/// Minutes to one decimal: "34.4m".
inline std::string format_minutes(double minutes) { return fmt::format("{:.1f}m", minutes); }

struct MeanInterval {
    double mean = 0.0;
    double low = 0.0;
    double high = 0.0;
    std::size_t n = 0;
};

/// Normal-approximation 95% interval over independent replication values.
inline MeanInterval mean_ci95(std::span<const double> values) {
    MeanInterval out;
    out.n = values.size();
    if (values.empty()) return out;
    double sum = 0.0;
    for (double v : values) sum += v;
    out.mean = sum / static_cast<double>(out.n);
    double half = 0.0;
    if (out.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - out.mean) * (v - out.mean);
        half = 1.959963984540054 * std::sqrt(ss / static_cast<double>(out.n - 1) / static_cast<double>(out.n));
    }
    out.low = out.mean - half;
    out.high = out.mean + half;
    return out;
}

struct ComparisonRow {
    std::string scenario_id;
    std::string mode;
    std::string resources;
    std::string modulation;
    std::size_t replications = 0;
    double mean_sat_wait_s = 0.0;
    double mean_downlink_wait_s = 0.0;
    double total_wait_min = 0.0;
    double ci_low_min = 0.0;
    double ci_high_min = 0.0;
    double pct_change_vs_base = 0.0;
    double gs_processing_share = 0.0;
    double completed_mean = 0.0;
    double incomplete_mean = 0.0;
};

/// Replication-averaged row for one scenario. Replications without any
/// completed request do not contribute to the wait means.
inline ComparisonRow aggregate(std::span<const MetricsSummary> summaries) {
    ComparisonRow row;
    if (summaries.empty()) {
        throw std::invalid_argument("aggregate: no replications");
    }
    row.scenario_id = summaries.front().scenario_id;
    row.replications = summaries.size();
    std::vector<double> totals;
    double sat = 0.0, downlink = 0.0, share = 0.0, completed = 0.0, incomplete = 0.0;
    for (const auto& s : summaries) {
        if (s.total_wait_min) {
            totals.push_back(*s.total_wait_min);
            sat += *s.mean_sat_wait_s;
            downlink += *s.mean_downlink_wait_s;
        }
        share += s.gs_processing_share;
        completed += static_cast<double>(s.completed);
        incomplete += static_cast<double>(s.incomplete);
    }
    const auto n = static_cast<double>(summaries.size());
    if (!totals.empty()) {
        const auto k = static_cast<double>(totals.size());
        row.mean_sat_wait_s = sat / k;
        row.mean_downlink_wait_s = downlink / k;
        const auto ci = mean_ci95(totals);
        row.total_wait_min = ci.mean;
        row.ci_low_min = ci.low;
        row.ci_high_min = ci.high;
    }
    row.gs_processing_share = share / n;
    row.completed_mean = completed / n;
    row.incomplete_mean = incomplete / n;
    return row;
}

/// Fill pct_change_vs_base on every row. Throws if the base row is missing;
/// a base with zero total wait leaves every change undefined (NaN).
inline void apply_base_comparison(std::span<ComparisonRow> rows, const std::string& base_id) {
    const auto base = std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.scenario_id == base_id; });
    if (base == rows.end()) {
        throw std::invalid_argument("base scenario '" + base_id + "' not present in results");
    }
    const double base_total = base->total_wait_min;
    for (auto& r : rows) {
        r.pct_change_vs_base = base_total > 0.0 ? percent_change(r.total_wait_min, base_total)
                                                : std::numeric_limits<double>::quiet_NaN();
    }
    base->pct_change_vs_base = 0.0;
}

struct ShareRange {
    double min = 0.0;
    double max = 0.0;
};

/// Range of the ground-processing share over ground-mode rows; empty when
/// there are none.
inline std::optional<ShareRange> bottleneck_share(std::span<const ComparisonRow> rows) {
    std::optional<ShareRange> out;
    for (const auto& r : rows) {
        if (r.mode != to_string(ProcessingMode::ground_station)) continue;
        if (!out) {
            out = ShareRange{r.gs_processing_share, r.gs_processing_share};
        } else {
            out->min = std::min(out->min, r.gs_processing_share);
            out->max = std::max(out->max, r.gs_processing_share);
        }
    }
    return out;
}

inline std::string format_share(double fraction) { return fmt::format("{:.1f}%", 100.0 * fraction); }

inline std::string render_share_line(const ShareRange& range) {
    return fmt::format("Ground-station processing: {} to {} of the time", format_share(range.min),
                       format_share(range.max));
}

/// Human-readable comparison table, rows in input order.
inline std::string render_report(std::span<const ComparisonRow> rows, const std::string& base_id) {
    if (rows.empty()) {
        throw std::invalid_argument("render_report: no rows");
    }
    std::vector<ComparisonRow> work(rows.begin(), rows.end());
    apply_base_comparison(work, base_id);

    std::size_t width = 8;
    for (const auto& r : work) width = std::max(width, r.scenario_id.size());

    std::string out;
    out += fmt::format("{:<{}}  {:>9}  {:>9}  {:>21}\n", "scenario", width, "total", "vs base", "95% CI");
    for (const auto& r : work) {
        out += fmt::format("{:<{}}  {:>9}  {:>9}  {:>21}\n", r.scenario_id, width, format_minutes(r.total_wait_min),
                           format_percent(r.pct_change_vs_base),
                           fmt::format("[{:.1f}, {:.1f}]", r.ci_low_min, r.ci_high_min));
    }
    out += "\nTotal wait = mean satellite wait + mean downlink wait (minutes), excluding service times.\n";
    out += "Onboard modes have no ground-station queue; their downlink wait is 0 by definition.\n";
    if (const auto share = bottleneck_share(work)) {
        out += render_share_line(*share) + "\n";
    }
    return out;
}

} // namespace s2s
