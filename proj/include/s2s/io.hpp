#pragma once

// Machine-readable result files.
//
// Per-replication CSV columns (fixed):
//   scenario_id,mode,resources,modulation,replication,seed,
//   mean_sat_wait_s,mean_downlink_wait_s,total_wait_min,completed,incomplete
// Numbers are written at full round-trip precision; an absent wait (no
// completed request) is an empty field in CSV and null in JSON.

#include "s2s/config_file.hpp"
#include "s2s/metrics.hpp"
#include "s2s/scenario.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

namespace s2s {

inline constexpr std::string_view kArtifactVersion = "0.1.0";

inline constexpr std::string_view kReplicationCsvHeader =
    "scenario_id,mode,resources,modulation,replication,seed,mean_sat_wait_s,mean_downlink_wait_s,total_wait_min,"
    "completed,incomplete";

inline constexpr std::string_view kComparisonCsvHeader =
    "scenario_id,mode,resources,modulation,replications,mean_sat_wait_s,mean_downlink_wait_s,total_wait_min,"
    "ci_low_min,ci_high_min,pct_change_vs_base,gs_processing_share,completed_mean,incomplete_mean";

enum class OutputFormat { csv, json };

namespace detail {

inline std::string num(double v) { return std::isfinite(v) ? fmt::format("{}", v) : std::string(); }
inline std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

inline nlohmann::ordered_json jnum(double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr; }
inline nlohmann::ordered_json jnum(const std::optional<double>& v) { return v ? jnum(*v) : nullptr; }

} // namespace detail

// Replication-mean row written after the per-replication rows of a run.
struct AggregateRow {
    double mean_sat_wait_s = 0.0;
    double mean_downlink_wait_s = 0.0;
    double total_wait_min = 0.0;
    double completed = 0.0;
    double incomplete = 0.0;
};

inline AggregateRow aggregate_row(const ComparisonRow& r) {
    return {r.mean_sat_wait_s, r.mean_downlink_wait_s, r.total_wait_min, r.completed_mean, r.incomplete_mean};
}

inline void write_replications_csv(std::ostream& out, const Scenario& s, std::span<const MetricsSummary> rows,
                                   const std::optional<AggregateRow>& aggregate = std::nullopt) {
    out << kReplicationCsvHeader << '\n';
    const auto prefix = fmt::format("{},{},{},{}", s.id, to_string(s.mode), to_string(s.constraint), to_string(s.modulation));
    for (const auto& r : rows) {
        out << prefix << ',' << r.replication << ',' << r.seed << ',' << detail::num(r.mean_sat_wait_s) << ','
            << detail::num(r.mean_downlink_wait_s) << ',' << detail::num(r.total_wait_min) << ',' << r.completed << ','
            << r.incomplete << '\n';
    }
    if (aggregate) {
        out << prefix << ",mean,," << detail::num(aggregate->mean_sat_wait_s) << ','
            << detail::num(aggregate->mean_downlink_wait_s) << ',' << detail::num(aggregate->total_wait_min) << ','
            << detail::num(aggregate->completed) << ',' << detail::num(aggregate->incomplete) << '\n';
    }
}

inline nlohmann::ordered_json replication_json(const Scenario& s, const MetricsSummary& r) {
    nlohmann::ordered_json j;
    j["scenario_id"] = s.id;
    j["mode"] = to_string(s.mode);
    j["resources"] = to_string(s.constraint);
    j["modulation"] = to_string(s.modulation);
    j["replication"] = r.replication;
    j["seed"] = r.seed;
    j["mean_sat_wait_s"] = detail::jnum(r.mean_sat_wait_s);
    j["mean_downlink_wait_s"] = detail::jnum(r.mean_downlink_wait_s);
    j["total_wait_min"] = detail::jnum(r.total_wait_min);
    j["completed"] = r.completed;
    j["incomplete"] = r.incomplete;
    return j;
}

struct Manifest {
    std::uint64_t master_seed = 0;
    double horizon_hours = 24.0;
    int replications = 30;
    bool deterministic = false;
    std::size_t scenarios = 0;
    ConstellationConfig config;
    std::vector<std::pair<std::string, std::string>> failed; // (scenario id, diagnostic)
    std::optional<std::string> timestamp;                    // omitted for reproducible output
};

inline nlohmann::ordered_json manifest_json(const Manifest& m) {
    nlohmann::ordered_json j;
    j["artifact_version"] = kArtifactVersion;
    j["master_seed"] = m.master_seed;
    j["horizon_hours"] = m.horizon_hours;
    j["replications"] = m.replications;
    j["deterministic"] = m.deterministic;
    j["scenarios"] = m.scenarios;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : config_entries(m.config)) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json failed = nlohmann::ordered_json::array();
    for (const auto& [id, why] : m.failed) failed.push_back({{"scenario_id", id}, {"error", why}});
    j["failed"] = failed;
    if (m.timestamp) j["timestamp"] = *m.timestamp;
    return j;
}

inline void write_replications_json(std::ostream& out, const Scenario& s, std::span<const MetricsSummary> rows,
                                    const Manifest& manifest,
                                    const std::optional<AggregateRow>& aggregate = std::nullopt) {
    nlohmann::ordered_json doc;
    doc["manifest"] = manifest_json(manifest);
    auto& arr = doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) arr.push_back(replication_json(s, r));
    if (aggregate) {
        nlohmann::ordered_json a;
        a["scenario_id"] = s.id;
        a["mode"] = to_string(s.mode);
        a["resources"] = to_string(s.constraint);
        a["modulation"] = to_string(s.modulation);
        a["replication"] = "mean";
        a["seed"] = nullptr;
        a["mean_sat_wait_s"] = detail::jnum(aggregate->mean_sat_wait_s);
        a["mean_downlink_wait_s"] = detail::jnum(aggregate->mean_downlink_wait_s);
        a["total_wait_min"] = detail::jnum(aggregate->total_wait_min);
        a["completed"] = aggregate->completed;
        a["incomplete"] = aggregate->incomplete;
        doc["aggregate"] = a;
    }
    out << doc.dump(2) << '\n';
}

inline void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows) {
    out << kComparisonCsvHeader << '\n';
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.scenario_id, r.mode, r.resources,
                           r.modulation, r.replications, detail::num(r.mean_sat_wait_s),
                           detail::num(r.mean_downlink_wait_s), detail::num(r.total_wait_min),
                           detail::num(r.ci_low_min), detail::num(r.ci_high_min), detail::num(r.pct_change_vs_base),
                           detail::num(r.gs_processing_share), detail::num(r.completed_mean),
                           detail::num(r.incomplete_mean));
    }
}

inline nlohmann::ordered_json comparison_json(std::span<const ComparisonRow> rows) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["scenario_id"] = r.scenario_id;
        j["mode"] = r.mode;
        j["resources"] = r.resources;
        j["modulation"] = r.modulation;
        j["replications"] = r.replications;
        j["mean_sat_wait_s"] = detail::jnum(r.mean_sat_wait_s);
        j["mean_downlink_wait_s"] = detail::jnum(r.mean_downlink_wait_s);
        j["total_wait_min"] = detail::jnum(r.total_wait_min);
        j["ci_low_min"] = detail::jnum(r.ci_low_min);
        j["ci_high_min"] = detail::jnum(r.ci_high_min);
        j["pct_change_vs_base"] = detail::jnum(r.pct_change_vs_base);
        j["gs_processing_share"] = detail::jnum(r.gs_processing_share);
        j["completed_mean"] = detail::jnum(r.completed_mean);
        j["incomplete_mean"] = detail::jnum(r.incomplete_mean);
        arr.push_back(std::move(j));
    }
    return arr;
}

/// Read a comparison table. Only scenario_id and total_wait_min are required;
/// other known columns are picked up when present.
inline std::vector<ComparisonRow> read_comparison_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.empty()) {
        throw std::runtime_error("comparison table is empty");
    }
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    const auto header = split(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    if (!col.contains("scenario_id") || !col.contains("total_wait_min")) {
        throw std::runtime_error("comparison table needs scenario_id and total_wait_min columns");
    }

    std::vector<ComparisonRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != header.size()) {
            throw std::runtime_error("comparison table line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
        }
        auto text = [&](const char* name) -> std::string {
            const auto it = col.find(name);
            return it == col.end() ? std::string() : cells[it->second];
        };
        auto number = [&](const char* name, double fallback) {
            const std::string t = text(name);
            if (t.empty()) return fallback;
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(t, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != t.size()) {
                throw std::runtime_error("comparison table line " + std::to_string(line_no) + ": bad number in " +
                                         name + ": " + t);
            }
            return v;
        };
        ComparisonRow r;
        r.scenario_id = text("scenario_id");
        if (r.scenario_id.empty()) {
            throw std::runtime_error("comparison table line " + std::to_string(line_no) + ": empty scenario_id");
        }
        r.mode = text("mode");
        r.resources = text("resources");
        r.modulation = text("modulation");
        r.replications = static_cast<std::size_t>(number("replications", 0.0));
        r.mean_sat_wait_s = number("mean_sat_wait_s", 0.0);
        r.mean_downlink_wait_s = number("mean_downlink_wait_s", 0.0);
        r.total_wait_min = number("total_wait_min", std::numeric_limits<double>::quiet_NaN());
        if (std::isnan(r.total_wait_min)) {
            throw std::runtime_error("comparison table line " + std::to_string(line_no) + ": missing total_wait_min");
        }
        r.ci_low_min = number("ci_low_min", r.total_wait_min);
        r.ci_high_min = number("ci_high_min", r.total_wait_min);
        r.pct_change_vs_base = number("pct_change_vs_base", 0.0);
        r.gs_processing_share = number("gs_processing_share", 0.0);
        r.completed_mean = number("completed_mean", 0.0);
        r.incomplete_mean = number("incomplete_mean", 0.0);
        rows.push_back(std::move(r));
    }
    if (rows.empty()) {
        throw std::runtime_error("comparison table has no rows");
    }
    return rows;
}

} // namespace s2s
