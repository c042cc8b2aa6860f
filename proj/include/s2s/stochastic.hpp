#pragma once

// Seeded random variates for the imaging timeline.
//
// Every stream is a std::mt19937_64 (output sequence fixed by the C++
// standard) seeded with a SplitMix64-derived sub-seed of (master seed,
// purpose). Uniform, normal and exponential transforms are written out here
// instead of using <random> distributions, whose output is implementation
// defined, so variate sequences are identical across toolchains.

#include "s2s/sim_time.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace s2s {

enum class StreamPurpose : std::uint8_t {
    batch_size,
    transfer_to_sat,
    time_to_picture,
    gs_link,
    downlink_to_shooter,
    processing,
};

inline constexpr std::array kAllPurposes{
    StreamPurpose::batch_size,     StreamPurpose::transfer_to_sat,     StreamPurpose::time_to_picture,
    StreamPurpose::gs_link,        StreamPurpose::downlink_to_shooter, StreamPurpose::processing,
};

constexpr std::string_view to_string(StreamPurpose p) noexcept {
    switch (p) {
    case StreamPurpose::batch_size: return "batch-size";
    case StreamPurpose::transfer_to_sat: return "transfer-to-sat";
    case StreamPurpose::time_to_picture: return "time-to-picture";
    case StreamPurpose::gs_link: return "gs-link";
    case StreamPurpose::downlink_to_shooter: return "downlink-to-shooter";
    case StreamPurpose::processing: return "processing";
    }
    return "?";
}

/// SplitMix64 finalizer. A bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_stream_seed(std::uint64_t master, StreamPurpose purpose) noexcept {
    return mix64(mix64(master) ^ (static_cast<std::uint64_t>(purpose) + 1) * 0xd1342543de82ef95ULL);
}

class RngStream {
public:
    RngStream(std::uint64_t master_seed, StreamPurpose purpose)
        : purpose_(purpose), seed_(derive_stream_seed(master_seed, purpose)), engine_(seed_) {}

    StreamPurpose purpose() const noexcept { return purpose_; }
    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; consumes two uniforms per variate.
    double standard_normal() {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    StreamPurpose purpose_;
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Inverse-CDF exponential transform of a uniform draw u in [0, 1).
inline double exponential_from_uniform(double mean, double u) { return -mean * std::log1p(-u); }

inline double sample_exponential(double mean, RngStream& stream) {
    if (!(mean > 0.0)) {
        throw std::invalid_argument("exponential mean must be > 0, got " + std::to_string(mean));
    }
    return exponential_from_uniform(mean, stream.uniform());
}

/// Normal(mean, std) conditioned on >= 0, by rejection.
inline double sample_truncated_normal(double mean, double stddev, RngStream& stream) {
    if (!(mean >= 0.0)) {
        throw std::invalid_argument("truncated normal mean must be >= 0, got " + std::to_string(mean));
    }
    if (!(stddev >= 0.0)) {
        throw std::invalid_argument("truncated normal std must be >= 0, got " + std::to_string(stddev));
    }
    if (stddev == 0.0) {
        return mean;
    }
    for (;;) {
        const double x = mean + stddev * stream.standard_normal();
        if (x >= 0.0) {
            return x;
        }
    }
}

/// Normal draw rounded to the nearest integer (halves away from zero), floored at 0.
inline std::int64_t sample_batch_size(double mean, double stddev, RngStream& stream) {
    if (!(stddev >= 0.0)) {
        throw std::invalid_argument("batch std must be >= 0, got " + std::to_string(stddev));
    }
    const double x = stddev == 0.0 ? mean : mean + stddev * stream.standard_normal();
    const auto n = std::llround(x);
    return n < 0 ? 0 : n;
}

enum class DistributionKind { deterministic, normal_truncated, exponential };

struct DistributionSpec {
    DistributionKind kind = DistributionKind::deterministic;
    double mean = 0.0; // seconds
    double stddev = 0.0; // seconds; normal_truncated only

    static DistributionSpec fixed(double mean) { return checked({DistributionKind::deterministic, mean, 0.0}); }
    static DistributionSpec truncated_normal(double mean, double stddev) {
        return checked({DistributionKind::normal_truncated, mean, stddev});
    }
    static DistributionSpec exponential(double mean) { return checked({DistributionKind::exponential, mean, 0.0}); }

    void validate() const {
        if (!std::isfinite(mean) || !std::isfinite(stddev)) {
            throw std::invalid_argument("distribution parameters must be finite");
        }
        if (kind == DistributionKind::exponential ? !(mean > 0.0) : !(mean >= 0.0)) {
            throw std::invalid_argument("distribution mean out of range: " + std::to_string(mean));
        }
        if (stddev < 0.0) {
            throw std::invalid_argument("distribution std must be >= 0: " + std::to_string(stddev));
        }
    }

    /// Same mean, no variance.
    DistributionSpec collapsed() const { return DistributionSpec{DistributionKind::deterministic, mean, 0.0}; }

    Duration sample(RngStream& stream) const {
        switch (kind) {
        case DistributionKind::deterministic: return Duration(mean);
        case DistributionKind::normal_truncated: return Duration(sample_truncated_normal(mean, stddev, stream));
        case DistributionKind::exponential: return Duration(sample_exponential(mean, stream));
        }
        return Duration(mean);
    }

    bool operator==(const DistributionSpec&) const = default;

private:
    static DistributionSpec checked(DistributionSpec s) {
        s.validate();
        return s;
    }
};

// One stream per purpose, all derived from a single replication seed.
class StreamSet {
public:
    explicit StreamSet(std::uint64_t master_seed)
        : streams_{RngStream(master_seed, StreamPurpose::batch_size),
                   RngStream(master_seed, StreamPurpose::transfer_to_sat),
                   RngStream(master_seed, StreamPurpose::time_to_picture),
                   RngStream(master_seed, StreamPurpose::gs_link),
                   RngStream(master_seed, StreamPurpose::downlink_to_shooter),
                   RngStream(master_seed, StreamPurpose::processing)} {}

    RngStream& operator[](StreamPurpose p) noexcept { return streams_[static_cast<std::size_t>(p)]; }

private:
    std::array<RngStream, kAllPurposes.size()> streams_;
};

} // namespace s2s
