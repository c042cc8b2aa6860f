#pragma once

// Sensor-to-shooter imaging processes.
//
// Requests arrive in batches every request interval. Each request queues for a
// satellite, which uplinks the tasking and waits to reach the target. What
// happens after the picture depends on the processing mode:
//
//   ground_station  release satellite -> queue for a ground station -> link,
//                   process, downlink to shooter -> release ground station
//   onboard         keep the satellite through processing and the direct
//                   downlink to the shooter
//   onboard_sr      as onboard, with a super-resolution step after processing

#include "s2s/des/environment.hpp"
#include "s2s/des/resource.hpp"
#include "s2s/sim_time.hpp"
#include "s2s/stochastic.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace s2s {

enum class ProcessingMode { ground_station, onboard, onboard_sr };

inline constexpr std::array kAllModes{ProcessingMode::ground_station, ProcessingMode::onboard,
                                      ProcessingMode::onboard_sr};

constexpr std::string_view to_string(ProcessingMode m) noexcept {
    switch (m) {
    case ProcessingMode::ground_station: return "ground";
    case ProcessingMode::onboard: return "onboard";
    case ProcessingMode::onboard_sr: return "onboard-sr";
    }
    return "?";
}

enum class ResourceConstraint { all, one_satellite, one_ground_station };

inline constexpr std::array kAllConstraints{ResourceConstraint::all, ResourceConstraint::one_satellite,
                                            ResourceConstraint::one_ground_station};

constexpr std::string_view to_string(ResourceConstraint c) noexcept {
    switch (c) {
    case ResourceConstraint::all: return "all";
    case ResourceConstraint::one_satellite: return "one-sat";
    case ResourceConstraint::one_ground_station: return "one-gs";
    }
    return "?";
}

struct ConstellationConfig {
    int num_satellites = 3;
    int num_ground_stations = 5;
    Duration request_interval = Duration::from_minutes(30);
    double batch_mean = 20.0;
    double batch_std = 5.0;

    DistributionSpec data_transfer_to_sat = DistributionSpec::truncated_normal(30.0, 6.0);
    DistributionSpec time_to_picture = DistributionSpec::exponential(4 * 60.0);
    DistributionSpec gs_link = DistributionSpec::exponential(3 * 60.0);
    DistributionSpec gs_processing = DistributionSpec::fixed(3.0);
    DistributionSpec downlink_to_shooter = DistributionSpec::truncated_normal(6.0, 0.6);
    DistributionSpec onboard_to_shooter = DistributionSpec::fixed(6.0);
    DistributionSpec onboard_processing = DistributionSpec::fixed(6.0);
    DistributionSpec onboard_sr = DistributionSpec::fixed(6.0);

    void validate() const {
        if (num_satellites < 1 || num_ground_stations < 1) {
            throw std::invalid_argument("satellite and ground station counts must be >= 1");
        }
        if (!(request_interval.seconds() > 0.0)) {
            throw std::invalid_argument("request interval must be > 0");
        }
        if (!(batch_mean >= 0.0) || !(batch_std >= 0.0)) {
            throw std::invalid_argument("batch mean and std must be >= 0");
        }
        for (const auto* spec : stage_specs()) {
            spec->validate();
        }
    }

    /// Every stage at its mean and a fixed batch size.
    ConstellationConfig zero_variance() const {
        ConstellationConfig out = *this;
        out.batch_std = 0.0;
        for (auto* spec : out.stage_specs()) {
            *spec = spec->collapsed();
        }
        return out;
    }

    std::array<const DistributionSpec*, 8> stage_specs() const {
        return {&data_transfer_to_sat, &time_to_picture,    &gs_link,            &gs_processing,
                &downlink_to_shooter,  &onboard_to_shooter, &onboard_processing, &onboard_sr};
    }
    std::array<DistributionSpec*, 8> stage_specs() {
        return {&data_transfer_to_sat, &time_to_picture,    &gs_link,            &gs_processing,
                &downlink_to_shooter,  &onboard_to_shooter, &onboard_processing, &onboard_sr};
    }

    bool operator==(const ConstellationConfig&) const = default;
};

inline ConstellationConfig apply_resource_constraint(ConstellationConfig config, ResourceConstraint constraint) {
    switch (constraint) {
    case ResourceConstraint::all: break;
    case ResourceConstraint::one_satellite: config.num_satellites = 1; break;
    case ResourceConstraint::one_ground_station: config.num_ground_stations = 1; break;
    }
    return config;
}

enum class RequestStage { created, sat_enqueued, sat_granted, picture_done, downlink_enqueued, downlink_granted, delivered };

// Lifecycle of one image request. Unset timestamps mark stages not reached
// before the horizon.
struct ImageRequest {
    std::uint32_t id = 0;
    SimTime t_created;
    std::optional<SimTime> t_sat_enqueued;
    std::optional<SimTime> t_sat_granted;
    std::optional<SimTime> t_picture_done;
    std::optional<SimTime> t_downlink_enqueued;
    std::optional<SimTime> t_downlink_granted;
    std::optional<SimTime> t_delivered;
    // Busy time spent in ground-station image processing (0 for onboard modes).
    Duration ground_processing;

    bool completed() const noexcept { return t_delivered.has_value(); }

    RequestStage last_stage() const noexcept {
        if (t_delivered) return RequestStage::delivered;
        if (t_downlink_granted) return RequestStage::downlink_granted;
        if (t_downlink_enqueued) return RequestStage::downlink_enqueued;
        if (t_picture_done) return RequestStage::picture_done;
        if (t_sat_granted) return RequestStage::sat_granted;
        if (t_sat_enqueued) return RequestStage::sat_enqueued;
        return RequestStage::created;
    }

    std::optional<Duration> sat_wait() const {
        if (!t_sat_granted || !t_sat_enqueued) return std::nullopt;
        return *t_sat_granted - *t_sat_enqueued;
    }
    std::optional<Duration> downlink_wait() const {
        if (!t_downlink_granted || !t_downlink_enqueued) return std::nullopt;
        return *t_downlink_granted - *t_downlink_enqueued;
    }
    std::optional<Duration> end_to_end() const {
        if (!t_delivered) return std::nullopt;
        return *t_delivered - t_created;
    }

    /// Timestamps set so far are non-decreasing in lifecycle order.
    bool timestamps_monotone() const {
        SimTime prev = t_created;
        for (const auto& t : {t_sat_enqueued, t_sat_granted, t_picture_done, t_downlink_enqueued,
                              t_downlink_granted, t_delivered}) {
            if (!t) break;
            if (*t < prev) return false;
            prev = *t;
        }
        return true;
    }
};

struct RequestBatch {
    SimTime at;
    std::int64_t count = 0;
};

/// One batch at t = 0, interval, 2 * interval, ... strictly before the horizon.
inline std::vector<RequestBatch> generate_requests(const ConstellationConfig& config, SimTime horizon,
                                                   RngStream& batch_stream) {
    if (!(horizon.seconds() > 0.0)) {
        throw std::invalid_argument("generate_requests: horizon must be > 0");
    }
    if (!(config.request_interval.seconds() > 0.0)) {
        throw std::invalid_argument("generate_requests: request interval must be > 0");
    }
    std::vector<RequestBatch> batches;
    for (std::int64_t k = 0;; ++k) {
        const double t = static_cast<double>(k) * config.request_interval.seconds();
        if (t >= horizon.seconds()) break;
        batches.push_back(RequestBatch{SimTime(t), sample_batch_size(config.batch_mean, config.batch_std, batch_stream)});
    }
    return batches;
}

inline des::Process run_ground_flow(des::Environment& env, ImageRequest& request, des::Resource& sats,
                                    des::Resource& ground_stations, const ConstellationConfig& config,
                                    StreamSet& streams) {
    request.t_sat_enqueued = env.now();
    const des::Lease sat = co_await sats.acquire();
    request.t_sat_granted = env.now();
    co_await env.hold(config.data_transfer_to_sat.sample(streams[StreamPurpose::transfer_to_sat]));
    co_await env.hold(config.time_to_picture.sample(streams[StreamPurpose::time_to_picture]));
    request.t_picture_done = env.now();
    sats.release(sat);

    request.t_downlink_enqueued = env.now();
    const des::Lease station = co_await ground_stations.acquire();
    request.t_downlink_granted = env.now();
    co_await env.hold(config.gs_link.sample(streams[StreamPurpose::gs_link]));
    const Duration processing = config.gs_processing.sample(streams[StreamPurpose::processing]);
    co_await env.hold(processing);
    request.ground_processing = processing;
    co_await env.hold(config.downlink_to_shooter.sample(streams[StreamPurpose::downlink_to_shooter]));
    ground_stations.release(station);
    request.t_delivered = env.now();
}

inline des::Process run_onboard_flow(des::Environment& env, ImageRequest& request, des::Resource& sats, bool with_sr,
                                     const ConstellationConfig& config, StreamSet& streams) {
    request.t_sat_enqueued = env.now();
    const des::Lease sat = co_await sats.acquire();
    request.t_sat_granted = env.now();
    co_await env.hold(config.data_transfer_to_sat.sample(streams[StreamPurpose::transfer_to_sat]));
    co_await env.hold(config.time_to_picture.sample(streams[StreamPurpose::time_to_picture]));
    request.t_picture_done = env.now();

    // No ground-station queue: the downlink wait is zero by construction.
    request.t_downlink_enqueued = env.now();
    request.t_downlink_granted = env.now();
    co_await env.hold(config.onboard_processing.sample(streams[StreamPurpose::processing]));
    if (with_sr) {
        co_await env.hold(config.onboard_sr.sample(streams[StreamPurpose::processing]));
    }
    co_await env.hold(config.onboard_to_shooter.sample(streams[StreamPurpose::downlink_to_shooter]));
    request.t_delivered = env.now();
    sats.release(sat);
}

struct ReplicationOutcome {
    ProcessingMode mode = ProcessingMode::ground_station;
    std::vector<ImageRequest> requests; // every generated request, in creation order
    des::RunStats stats;
    std::uint64_t trace_hash = 0;
    std::vector<des::WaitRecord> satellite_log;
    std::vector<des::WaitRecord> ground_station_log;

    std::size_t generated() const noexcept { return requests.size(); }
};

// Optional per-event callback for invariant checks.
using StepInspector = std::function<void(SimTime, const des::Resource& sats, const des::Resource& ground_stations)>;

/// Run one replication of one configuration to the horizon.
inline ReplicationOutcome simulate(const ConstellationConfig& config, ProcessingMode mode, SimTime horizon,
                                   std::uint64_t seed, const StepInspector& inspector = {}) {
    config.validate();
    StreamSet streams(seed);
    const auto batches = generate_requests(config, horizon, streams[StreamPurpose::batch_size]);

    ReplicationOutcome out;
    out.mode = mode;
    std::size_t total = 0;
    for (const auto& b : batches) total += static_cast<std::size_t>(b.count);
    out.requests.resize(total);

    des::Environment env;
    des::Resource sats(env, "satellites", config.num_satellites);
    des::Resource ground_stations(env, "ground_stations", config.num_ground_stations);

    std::size_t next = 0;
    for (const auto& batch : batches) {
        const std::size_t first = next;
        next += static_cast<std::size_t>(batch.count);
        env.schedule_at(batch.at, [&, first, last = next] {
            for (std::size_t i = first; i < last; ++i) {
                ImageRequest& r = out.requests[i];
                r.id = static_cast<std::uint32_t>(i);
                r.t_created = env.now();
                if (mode == ProcessingMode::ground_station) {
                    env.start(run_ground_flow(env, r, sats, ground_stations, config, streams));
                } else {
                    env.start(run_onboard_flow(env, r, sats, mode == ProcessingMode::onboard_sr, config, streams));
                }
            }
        });
    }
    if (inspector) {
        env.set_step_observer([&](SimTime t, des::EventId) { inspector(t, sats, ground_stations); });
    }

    out.stats = env.run_until(horizon);
    out.trace_hash = env.trace_hash();
    out.satellite_log = sats.wait_log();
    out.ground_station_log = ground_stations.wait_log();
    return out;
}

} // namespace s2s
