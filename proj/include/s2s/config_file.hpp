#pragma once

// Flat `key = value` scenario configuration. One entry per line, `#` starts a
// comment. Every key is optional and defaults to the base case; units are
// fixed by suffix (_min minutes, _s seconds).

#include "s2s/pipeline.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace s2s {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& what)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

class ConfigFileMissing : public std::runtime_error {
public:
    explicit ConfigFileMissing(const std::string& path) : std::runtime_error("cannot open config file " + path) {}
};

inline constexpr std::array<std::string_view, 15> kConfigKeys{
    "img_request_interval_min",
    "mean_num_images",
    "std_num_images",
    "mean_data_transfer_to_sat_s",
    "std_data_transfer_to_sat_s",
    "mean_downlink_to_shooter_s",
    "std_downlink_to_shooter_s",
    "num_sats",
    "sat_time_to_picture_min",
    "num_ground_stations",
    "time_to_ground_station_link_min",
    "ground_station_processing_s",
    "onboard_sat_to_shooter_s",
    "onboard_sat_processing_s",
    "onboard_sat_sr_s",
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline bool is_known_key(std::string_view key) {
    for (auto k : kConfigKeys)
        if (k == key) return true;
    return false;
}

} // namespace detail

/// Key/value view of a configuration, in canonical key order and file units.
inline std::vector<std::pair<std::string, double>> config_entries(const ConstellationConfig& c) {
    return {
        {"img_request_interval_min", c.request_interval.minutes()},
        {"mean_num_images", c.batch_mean},
        {"std_num_images", c.batch_std},
        {"mean_data_transfer_to_sat_s", c.data_transfer_to_sat.mean},
        {"std_data_transfer_to_sat_s", c.data_transfer_to_sat.stddev},
        {"mean_downlink_to_shooter_s", c.downlink_to_shooter.mean},
        {"std_downlink_to_shooter_s", c.downlink_to_shooter.stddev},
        {"num_sats", static_cast<double>(c.num_satellites)},
        {"sat_time_to_picture_min", c.time_to_picture.mean / 60.0},
        {"num_ground_stations", static_cast<double>(c.num_ground_stations)},
        {"time_to_ground_station_link_min", c.gs_link.mean / 60.0},
        {"ground_station_processing_s", c.gs_processing.mean},
        {"onboard_sat_to_shooter_s", c.onboard_to_shooter.mean},
        {"onboard_sat_processing_s", c.onboard_processing.mean},
        {"onboard_sat_sr_s", c.onboard_sr.mean},
    };
}

inline ConstellationConfig parse_config(std::istream& in, const std::string& source = "<config>") {
    std::map<std::string, std::pair<double, int>, std::less<>> values; // key -> (value, line)
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(source, line_no, "expected `key = value`");
        }
        const auto key = detail::trim(line.substr(0, eq));
        const auto text = detail::trim(line.substr(eq + 1));
        if (key.empty() || text.empty()) {
            throw ConfigError(source, line_no, "expected `key = value`");
        }
        if (!detail::is_known_key(key)) {
            throw ConfigError(source, line_no, "unknown key '" + std::string(key) + "'");
        }
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
            throw ConfigError(source, line_no, "value for '" + std::string(key) + "' is not a number: " + std::string(text));
        }
        if (v < 0.0) {
            throw ConfigError(source, line_no, "'" + std::string(key) + "' must be non-negative, got " + std::string(text));
        }
        if (values.contains(key)) {
            throw ConfigError(source, line_no, "duplicate key '" + std::string(key) + "'");
        }
        values.emplace(std::string(key), std::pair{v, line_no});
    }

    ConstellationConfig c;
    auto get = [&](std::string_view key, double fallback) -> std::pair<double, int> {
        const auto it = values.find(key);
        return it == values.end() ? std::pair{fallback, 0} : it->second;
    };
    auto fail = [&](std::string_view key, int line, const std::string& why) {
        throw ConfigError(source, line, "'" + std::string(key) + "' " + why);
    };
    auto positive = [&](std::string_view key, double fallback) {
        const auto [v, line] = get(key, fallback);
        if (!(v > 0.0)) fail(key, line, "must be > 0");
        return v;
    };
    auto count = [&](std::string_view key, int fallback) {
        const auto [v, line] = get(key, fallback);
        if (v != std::floor(v) || v < 1.0 || v > 1e6) fail(key, line, "must be an integer >= 1");
        return static_cast<int>(v);
    };

    c.request_interval = Duration::from_minutes(positive("img_request_interval_min", c.request_interval.minutes()));
    c.batch_mean = get("mean_num_images", c.batch_mean).first;
    c.batch_std = get("std_num_images", c.batch_std).first;
    c.data_transfer_to_sat = DistributionSpec::truncated_normal(get("mean_data_transfer_to_sat_s", 30.0).first,
                                                                get("std_data_transfer_to_sat_s", 6.0).first);
    c.downlink_to_shooter = DistributionSpec::truncated_normal(get("mean_downlink_to_shooter_s", 6.0).first,
                                                               get("std_downlink_to_shooter_s", 0.6).first);
    c.num_satellites = count("num_sats", c.num_satellites);
    c.time_to_picture = DistributionSpec::exponential(60.0 * positive("sat_time_to_picture_min", 4.0));
    c.num_ground_stations = count("num_ground_stations", c.num_ground_stations);
    c.gs_link = DistributionSpec::exponential(60.0 * positive("time_to_ground_station_link_min", 3.0));
    c.gs_processing = DistributionSpec::fixed(get("ground_station_processing_s", 3.0).first);
    c.onboard_to_shooter = DistributionSpec::fixed(get("onboard_sat_to_shooter_s", 6.0).first);
    c.onboard_processing = DistributionSpec::fixed(get("onboard_sat_processing_s", 6.0).first);
    c.onboard_sr = DistributionSpec::fixed(get("onboard_sat_sr_s", 6.0).first);
    c.validate();
    return c;
}

inline ConstellationConfig parse_config_text(std::string_view text, const std::string& source = "<config>") {
    std::istringstream in{std::string(text)};
    return parse_config(in, source);
}

inline ConstellationConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigFileMissing(path);
    }
    return parse_config(in, path);
}

} // namespace s2s
