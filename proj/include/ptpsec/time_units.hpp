// Simulated-time base types. All times and durations are integer
// nanoseconds; every quantity in the bundled scenarios (microsecond
// scale) is exactly representable, so the core never needs float
// tolerances.
#pragma once

#include <cstdint>

namespace ptpsec {

// Absolute simulated time, nanoseconds since the simulation epoch.
using TimeNs = std::int64_t;

// Signed span, nanoseconds.
using DurationNs = std::int64_t;

constexpr DurationNs microseconds(std::int64_t us) { return us * 1'000; }
constexpr DurationNs milliseconds(std::int64_t ms) { return ms * 1'000'000; }
constexpr DurationNs seconds(std::int64_t s) { return s * 1'000'000'000; }

constexpr std::int64_t kNsPerSecond = 1'000'000'000;

} // namespace ptpsec
