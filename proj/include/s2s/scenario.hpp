#pragma once

// The 36-cell experiment matrix: 3 processing modes x 3 resource constraints
// x 4 modulations, each run as seeded independent replications.

#include "s2s/metrics.hpp"
#include "s2s/pipeline.hpp"
#include "s2s/stochastic.hpp"

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace s2s {

enum class Modulation { none, half_images, double_processing, double_satellites };

inline constexpr std::array kAllModulations{Modulation::none, Modulation::half_images, Modulation::double_processing,
                                            Modulation::double_satellites};

constexpr std::string_view to_string(Modulation m) noexcept {
    switch (m) {
    case Modulation::none: return "none";
    case Modulation::half_images: return "half-images";
    case Modulation::double_processing: return "double-processing";
    case Modulation::double_satellites: return "double-satellites";
    }
    return "?";
}

struct Scenario {
    std::string id;
    ProcessingMode mode = ProcessingMode::ground_station;
    ResourceConstraint constraint = ResourceConstraint::all;
    Modulation modulation = Modulation::none;

    bool operator==(const Scenario&) const = default;
};

inline std::string scenario_id(ProcessingMode mode, ResourceConstraint constraint, Modulation modulation) {
    std::string id(to_string(mode));
    id += '.';
    id += to_string(constraint);
    id += '.';
    id += to_string(modulation);
    return id;
}

inline Scenario make_scenario(ProcessingMode mode, ResourceConstraint constraint, Modulation modulation) {
    return Scenario{scenario_id(mode, constraint, modulation), mode, constraint, modulation};
}

inline const std::string kBaseScenarioId =
    scenario_id(ProcessingMode::ground_station, ResourceConstraint::all, Modulation::none);

/// Mode-major, then constraint, then modulation. Index 0 is the base case.
inline std::vector<Scenario> build_matrix() {
    std::vector<Scenario> out;
    out.reserve(kAllModes.size() * kAllConstraints.size() * kAllModulations.size());
    for (auto mode : kAllModes)
        for (auto constraint : kAllConstraints)
            for (auto modulation : kAllModulations)
                out.push_back(make_scenario(mode, constraint, modulation));
    return out;
}

inline ConstellationConfig apply_modulation(ConstellationConfig config, Modulation m) {
    auto doubled = [](DistributionSpec s) {
        s.mean *= 2.0;
        s.stddev *= 2.0;
        return s;
    };
    switch (m) {
    case Modulation::none: break;
    case Modulation::half_images:
        config.batch_mean /= 2.0;
        config.batch_std /= 2.0;
        break;
    case Modulation::double_processing:
        config.gs_processing = doubled(config.gs_processing);
        config.onboard_processing = doubled(config.onboard_processing);
        config.onboard_sr = doubled(config.onboard_sr);
        break;
    case Modulation::double_satellites: config.num_satellites *= 2; break;
    }
    return config;
}

/// Modulation first; the resource constraint then overrides counts.
inline ConstellationConfig scenario_config(const ConstellationConfig& base, const Scenario& s) {
    return apply_resource_constraint(apply_modulation(base, s.modulation), s.constraint);
}

struct ReplicationPlan {
    int replications = 30;
    std::uint64_t master_seed = 0;
    SimTime horizon = SimTime::from_hours(24);
};

constexpr std::uint32_t fnv1a32(std::string_view s) noexcept {
    std::uint32_t h = 0x811c9dc5U;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x01000193U;
    }
    return h;
}

/// Injective in (id hash, replication) for replication < 2^32: the key packs
/// both into one word and mix64 is a bijection.
inline std::uint64_t replication_seed(std::uint64_t master_seed, std::string_view id, int replication) {
    const std::uint64_t key = (static_cast<std::uint64_t>(fnv1a32(id)) << 32) | static_cast<std::uint32_t>(replication);
    return mix64(mix64(master_seed) + key);
}

class ScenarioError : public std::runtime_error {
public:
    ScenarioError(std::string scenario_id, int replication, std::uint64_t seed, const std::string& what)
        : std::runtime_error("scenario " + scenario_id + ", replication " + std::to_string(replication) + ", seed " +
                             std::to_string(seed) + ": " + what),
          scenario_id_(std::move(scenario_id)), replication_(replication), seed_(seed) {}

    const std::string& scenario_id() const noexcept { return scenario_id_; }
    int replication() const noexcept { return replication_; }
    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::string scenario_id_;
    int replication_;
    std::uint64_t seed_;
};

// Sees every replication's raw outcome. Called from worker threads under
// run_matrix, so it must be thread-safe there.
using ReplicationInspector =
    std::function<void(const Scenario&, int replication, std::uint64_t seed, const ReplicationOutcome&)>;

inline std::vector<MetricsSummary> run_scenario(const Scenario& scenario, const ReplicationPlan& plan,
                                                const ConstellationConfig& base,
                                                const ReplicationInspector& inspector = {}) {
    if (plan.replications < 1) {
        throw std::invalid_argument("replications must be >= 1");
    }
    const ConstellationConfig config = scenario_config(base, scenario);
    std::vector<MetricsSummary> out;
    out.reserve(static_cast<std::size_t>(plan.replications));
    for (int r = 0; r < plan.replications; ++r) {
        const std::uint64_t seed = replication_seed(plan.master_seed, scenario.id, r);
        try {
            const ReplicationOutcome outcome = simulate(config, scenario.mode, plan.horizon, seed);
            if (inspector) inspector(scenario, r, seed, outcome);
            MetricsSummary s = summarize(outcome.requests, outcome.generated());
            s.scenario_id = scenario.id;
            s.replication = r;
            s.seed = seed;
            out.push_back(std::move(s));
        } catch (const std::exception& e) {
            throw ScenarioError(scenario.id, r, seed, e.what());
        }
    }
    return out;
}

struct ScenarioRun {
    Scenario scenario;
    std::vector<MetricsSummary> replications;
    std::string error; // empty on success

    bool ok() const noexcept { return error.empty(); }
};

/// Run every scenario, `parallel` at a time. Results keep the input order
/// regardless of scheduling; a failing scenario is reported, not rethrown.
inline std::vector<ScenarioRun> run_matrix(std::span<const Scenario> scenarios, const ReplicationPlan& plan,
                                           const ConstellationConfig& base, int parallel = 1,
                                           const ReplicationInspector& inspector = {}) {
    std::vector<ScenarioRun> runs(scenarios.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < scenarios.size(); i = next++) {
            runs[i].scenario = scenarios[i];
            try {
                runs[i].replications = run_scenario(scenarios[i], plan, base, inspector);
            } catch (const std::exception& e) {
                runs[i].error = e.what();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, parallel));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    return runs;
}

/// Comparison rows for the successful runs, with percent change against the base.
inline std::vector<ComparisonRow> comparison_table(std::span<const ScenarioRun> runs,
                                                   const std::string& base_id = kBaseScenarioId) {
    std::vector<ComparisonRow> rows;
    for (const auto& run : runs) {
        if (!run.ok()) continue;
        ComparisonRow row = aggregate(run.replications);
        row.mode = std::string(to_string(run.scenario.mode));
        row.resources = std::string(to_string(run.scenario.constraint));
        row.modulation = std::string(to_string(run.scenario.modulation));
        rows.push_back(std::move(row));
    }
    apply_base_comparison(rows, base_id);
    return rows;
}

} // namespace s2s
