#include "s2s/scenario.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <queue>
#include <set>
#include <vector>

using namespace s2s;

TEST(BuildMatrix, ThirtySixUniqueCells) {
    const auto m = build_matrix();
    ASSERT_EQ(m.size(), 36u);
    std::set<std::string> ids;
    for (const auto& s : m) ids.insert(s.id);
    EXPECT_EQ(ids.size(), 36u);
    EXPECT_EQ(m.front().id, kBaseScenarioId);
    EXPECT_EQ(m.front(), make_scenario(ProcessingMode::ground_station, ResourceConstraint::all, Modulation::none));
    EXPECT_EQ(build_matrix(), m);
}

TEST(BuildMatrix, EveryTripleExactlyOnce) {
    const auto m = build_matrix();
    for (auto mode : kAllModes)
        for (auto c : kAllConstraints)
            for (auto mod : kAllModulations)
                EXPECT_EQ(std::count_if(m.begin(), m.end(),
                                        [&](const Scenario& s) {
                                            return s.mode == mode && s.constraint == c && s.modulation == mod;
                                        }),
                          1);
}

TEST(ApplyModulation, Examples) {
    const ConstellationConfig base;
    const auto half = apply_modulation(base, Modulation::half_images);
    EXPECT_EQ(half.batch_mean, 10.0);
    EXPECT_EQ(half.batch_std, 2.5);
    EXPECT_EQ(apply_modulation(base, Modulation::double_satellites).num_satellites, 6);
    const auto slow = apply_modulation(base, Modulation::double_processing);
    EXPECT_EQ(slow.gs_processing.mean, 6.0);
    EXPECT_EQ(slow.onboard_processing.mean, 12.0);
    EXPECT_EQ(slow.onboard_sr.mean, 12.0);
    EXPECT_EQ(slow.onboard_to_shooter, base.onboard_to_shooter);
    EXPECT_EQ(apply_modulation(base, Modulation::none), base);
}

TEST(ApplyModulation, ConstraintOverridesAfterModulation) {
    const auto s = make_scenario(ProcessingMode::ground_station, ResourceConstraint::one_satellite,
                                 Modulation::double_satellites);
    EXPECT_EQ(scenario_config(ConstellationConfig{}, s).num_satellites, 1);
}

TEST(ReplicationSeeds, InjectiveOverMatrixAndReplications) {
    for (std::uint64_t master : {0ULL, 7ULL, 20220307ULL}) {
        std::set<std::uint64_t> seeds;
        std::size_t n = 0;
        for (const auto& s : build_matrix()) {
            for (int r = 0; r < 1000; ++r, ++n) seeds.insert(replication_seed(master, s.id, r));
        }
        EXPECT_EQ(seeds.size(), n);
    }
    std::set<std::uint32_t> hashes;
    for (const auto& s : build_matrix()) hashes.insert(fnv1a32(s.id));
    EXPECT_EQ(hashes.size(), 36u);
}

TEST(RunScenario, DeterministicGivenSeed) {
    const ReplicationPlan plan{3, 11, SimTime::from_hours(12)};
    const auto s = make_scenario(ProcessingMode::onboard, ResourceConstraint::all, Modulation::none);
    const auto a = run_scenario(s, plan, ConstellationConfig{});
    const auto b = run_scenario(s, plan, ConstellationConfig{});
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].seed, b[i].seed);
        EXPECT_EQ(a[i].total_wait_min, b[i].total_wait_min);
        EXPECT_EQ(a[i].completed, b[i].completed);
    }
}

TEST(RunScenario, ReplicationsGetDistinctSeeds) {
    const ReplicationPlan plan{2, 11, SimTime::from_hours(2)};
    const auto rows = run_scenario(build_matrix().front(), plan, ConstellationConfig{});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NE(rows[0].seed, rows[1].seed);
    EXPECT_EQ(rows[1].replication, 1);
}

TEST(RunScenario, FailureNamesScenarioReplicationAndSeed) {
    ConstellationConfig broken;
    broken.request_interval = Duration(0);
    const ReplicationPlan plan{2, 11, SimTime::from_hours(1)};
    const auto s = build_matrix()[5];
    try {
        run_scenario(s, plan, broken);
        FAIL() << "expected ScenarioError";
    } catch (const ScenarioError& e) {
        EXPECT_EQ(e.scenario_id(), s.id);
        EXPECT_EQ(e.replication(), 0);
        EXPECT_EQ(e.seed(), replication_seed(11, s.id, 0));
        EXPECT_NE(std::string(e.what()).find(s.id), std::string::npos);
    }
}

namespace {

// Independent FIFO multi-server model of the ground flow with fixed service
// times: sats serve in arrival order; ground stations serve in order of
// picture completion.
struct OracleResult {
    std::size_t delivered = 0;
    double mean_sat_wait = 0.0;
};

OracleResult ground_flow_oracle(int sats, int stations, int batch, double interval, double horizon) {
    using MinHeap = std::priority_queue<double, std::vector<double>, std::greater<>>;
    MinHeap sat_free, gs_free;
    for (int i = 0; i < sats; ++i) sat_free.push(0.0);
    for (int i = 0; i < stations; ++i) gs_free.push(0.0);
    std::vector<std::pair<double, double>> pictures; // (picture done, sat wait)
    for (double t = 0.0; t < horizon; t += interval) {
        for (int k = 0; k < batch; ++k) {
            const double start = std::max(t, sat_free.top());
            sat_free.pop();
            const double done = start + 30 + 240;
            sat_free.push(done);
            pictures.emplace_back(done, start - t);
        }
    }
    std::stable_sort(pictures.begin(), pictures.end(), [](auto& a, auto& b) { return a.first < b.first; });
    OracleResult out;
    double wait_sum = 0.0;
    for (const auto& [done, wait] : pictures) {
        const double start = std::max(done, gs_free.top());
        gs_free.pop();
        const double delivered = start + 180 + 3 + 6;
        gs_free.push(delivered);
        if (delivered <= horizon) {
            ++out.delivered;
            wait_sum += wait;
        }
    }
    out.mean_sat_wait = out.delivered ? wait_sum / static_cast<double>(out.delivered) : 0.0;
    return out;
}

} // namespace

TEST(RunScenario, DeterministicBaseMatchesQueueOracle) {
    const ConstellationConfig base = ConstellationConfig{}.zero_variance();
    for (const auto& [constraint, sats, stations] :
         {std::tuple{ResourceConstraint::all, 3, 5}, std::tuple{ResourceConstraint::one_satellite, 1, 5},
          std::tuple{ResourceConstraint::one_ground_station, 3, 1}}) {
        const auto s = make_scenario(ProcessingMode::ground_station, constraint, Modulation::none);
        const auto rows = run_scenario(s, ReplicationPlan{1, 3, SimTime::from_hours(24)}, base);
        const auto oracle = ground_flow_oracle(sats, stations, 20, 1800, 86400);
        EXPECT_EQ(rows[0].completed, oracle.delivered) << s.id;
        EXPECT_EQ(rows[0].completed + rows[0].incomplete, 48u * 20u) << s.id;
        EXPECT_NEAR(*rows[0].mean_sat_wait_s, oracle.mean_sat_wait, 1e-6) << s.id;
    }
}

TEST(RunMatrix, ParallelMatchesSerial) {
    const ReplicationPlan plan{2, 5, SimTime::from_hours(6)};
    const auto m = build_matrix();
    const auto serial = run_matrix(m, plan, ConstellationConfig{}, 1);
    const auto parallel = run_matrix(m, plan, ConstellationConfig{}, 4);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        ASSERT_TRUE(serial[i].ok());
        EXPECT_EQ(serial[i].scenario, parallel[i].scenario);
        for (std::size_t r = 0; r < serial[i].replications.size(); ++r) {
            EXPECT_EQ(serial[i].replications[r].total_wait_min, parallel[i].replications[r].total_wait_min);
        }
    }
    const auto rows = comparison_table(serial);
    EXPECT_EQ(rows.size(), 36u);
    EXPECT_EQ(rows.front().pct_change_vs_base, 0.0);
}

TEST(RunMatrix, FailuresAreReportedPerScenario) {
    ConstellationConfig broken;
    broken.request_interval = Duration(0);
    const auto m = build_matrix();
    const auto runs = run_matrix(std::span(m).first(2), ReplicationPlan{1, 1, SimTime(3600)}, broken, 2);
    for (const auto& r : runs) EXPECT_FALSE(r.ok());
}

TEST(ReplicationStatistics, IntervalNarrowsWithMoreReplications) {
    const auto base = build_matrix().front();
    auto width = [&](int reps) {
        const auto rows = run_scenario(base, ReplicationPlan{reps, 99, SimTime::from_hours(24)}, ConstellationConfig{});
        const auto agg = aggregate(rows);
        return agg.ci_high_min - agg.ci_low_min;
    };
    EXPECT_LT(width(120), width(30));
}
