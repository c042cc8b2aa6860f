#pragma once

#include <cmath>
#include <compare>
#include <stdexcept>
#include <string>

namespace s2s {

// Signed span of simulated time, in seconds. Negative values are representable
// so that callers can be rejected at the point of use rather than at conversion.
class Duration {
public:
    constexpr Duration() noexcept = default;
    constexpr explicit Duration(double seconds) noexcept : seconds_(seconds) {}

    static constexpr Duration from_minutes(double minutes) noexcept { return Duration(minutes * 60.0); }
    static constexpr Duration from_hours(double hours) noexcept { return Duration(hours * 3600.0); }

    constexpr double seconds() const noexcept { return seconds_; }
    constexpr double minutes() const noexcept { return seconds_ / 60.0; }

    constexpr auto operator<=>(const Duration&) const noexcept = default;

    constexpr Duration operator+(Duration o) const noexcept { return Duration(seconds_ + o.seconds_); }
    constexpr Duration operator-(Duration o) const noexcept { return Duration(seconds_ - o.seconds_); }
    constexpr Duration operator*(double k) const noexcept { return Duration(seconds_ * k); }
    constexpr Duration& operator+=(Duration o) noexcept { seconds_ += o.seconds_; return *this; }

private:
    double seconds_ = 0.0;
};

// Point on the simulation clock. Always finite and >= 0.
class SimTime {
public:
    constexpr SimTime() noexcept = default;

    constexpr explicit SimTime(double seconds) : seconds_(seconds) {
        if (!(seconds >= 0.0) || !std::isfinite(seconds)) {
            throw std::invalid_argument("SimTime must be finite and non-negative, got " + std::to_string(seconds));
        }
    }

    static constexpr SimTime zero() noexcept { return SimTime(); }
    static constexpr SimTime from_hours(double hours) { return SimTime(hours * 3600.0); }

    constexpr double seconds() const noexcept { return seconds_; }
    constexpr double minutes() const noexcept { return seconds_ / 60.0; }

    constexpr auto operator<=>(const SimTime&) const noexcept = default;

    constexpr SimTime operator+(Duration d) const { return SimTime(seconds_ + d.seconds()); }
    constexpr Duration operator-(SimTime o) const noexcept { return Duration(seconds_ - o.seconds_); }

private:
    double seconds_ = 0.0;
};

namespace literals {
constexpr Duration operator""_s(long double v) { return Duration(static_cast<double>(v)); }
constexpr Duration operator""_s(unsigned long long v) { return Duration(static_cast<double>(v)); }
constexpr Duration operator""_min(unsigned long long v) { return Duration::from_minutes(static_cast<double>(v)); }
} // namespace literals

} // namespace s2s
