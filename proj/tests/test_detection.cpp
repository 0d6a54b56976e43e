#include <doctest.h>

#include "ptpsec/detection.hpp"
#include "ptpsec/errors.hpp"

using namespace ptpsec;
using namespace ptpsec::detection;

namespace {

EstimateSet set_of(std::vector<DurationNs> estimates, DurationNs threshold) {
    return EstimateSet{0, std::move(estimates), threshold};
}

} // namespace

TEST_CASE("detect fires on any estimate above the threshold") {
    CHECK_FALSE(detect(set_of({0, 0}, microseconds(1))).attacked);

    Verdict one = detect(set_of({microseconds(500)}, microseconds(1)));
    CHECK(one.attacked);
    CHECK(one.triggering == std::set<int>{1});

    // Cancellation shape: the first estimate is wiped, the second fires.
    Verdict cancel = detect(set_of({0, microseconds(500)}, microseconds(1)));
    CHECK(cancel.attacked);
    CHECK(cancel.triggering == std::set<int>{2});

    CHECK_THROWS_AS(detect(set_of({}, 0)), SimError);
}

TEST_CASE("an on-threshold estimate does not fire") {
    CHECK_FALSE(detect(set_of({microseconds(20)}, microseconds(20))).attacked);
    CHECK(detect(set_of({microseconds(20) + 1}, microseconds(20))).attacked);
}

TEST_CASE("consensus with an all-attacked sync path") {
    Localization loc = consensus_asymmetry(
        set_of({microseconds(500), microseconds(500), microseconds(500)}, microseconds(1)), 1);
    CHECK(loc.consensus_alpha == microseconds(500));
    CHECK(loc.attacked_paths == std::set<int>{0});
    CHECK_FALSE(loc.ambiguous);
    for (DurationNs implied : loc.implied_path_alphas)
        CHECK(implied == 0);
}

TEST_CASE("consensus localizes a single attacked redundant path") {
    Localization loc =
        consensus_asymmetry(set_of({microseconds(500), 0, 0}, microseconds(1)), 1);
    CHECK(loc.consensus_alpha == 0);
    CHECK(loc.attacked_paths == std::set<int>{1});
    CHECK(loc.implied_path_alphas[0] == -microseconds(500));
    CHECK_FALSE(loc.ambiguous);
}

TEST_CASE("the two-path tie reports both hypotheses, attack-first") {
    Localization loc = consensus_asymmetry(set_of({0, microseconds(500)}, microseconds(1)), 1);
    CHECK(loc.ambiguous);
    // Primary: sync path treated as attacked.
    CHECK(loc.consensus_alpha == microseconds(500));
    CHECK(loc.attacked_paths == std::set<int>{0, 1});
    REQUIRE(loc.alternative.has_value());
    CHECK(loc.alternative->consensus_alpha == 0);
    CHECK(loc.alternative->attacked_paths == std::set<int>{2});
}

TEST_CASE("consensus rejects bad inputs") {
    CHECK_THROWS_AS(consensus_asymmetry(set_of({}, 0), 0), SimError);
    try {
        consensus_asymmetry(set_of({0, 0}, 0), 2); // floor(2/2) = 1
        FAIL("expected BoundViolation");
    } catch (const SimError& e) {
        CHECK(e.code() == Errc::bound_violation);
    }
}

TEST_CASE("clustering tolerates jitter inside the threshold") {
    // Estimates scattered within the threshold cluster together and the
    // consensus is their mean.
    Localization loc = consensus_asymmetry(
        set_of({microseconds(499), microseconds(500), microseconds(501)}, microseconds(5)), 1);
    CHECK(loc.consensus_alpha == microseconds(500));
    CHECK(loc.attacked_paths == std::set<int>{0});
    CHECK_FALSE(loc.ambiguous);
}

namespace {

std::vector<RoundVerdict> verdict_series(std::vector<bool> attacked) {
    std::vector<RoundVerdict> series;
    for (std::size_t i = 0; i < attacked.size(); ++i)
        series.push_back({i, static_cast<TimeNs>(i) * seconds(1), attacked[i]});
    return series;
}

} // namespace

TEST_CASE("detection latency counts rounds from the attack boundary") {
    // Attack starts at t = 3 s; the round initiated at 3 s already fires.
    auto instant = verdict_series({false, false, false, true, true, true, false, false});
    CHECK(detection_latency(instant, seconds(3)) == 1);
    // A boundary between rounds: the next initiated round is the base.
    CHECK(detection_latency(instant, seconds(2) + 500'000'000) == 1);

    // Verdict lags two rounds behind the onset.
    auto lagged = verdict_series({false, false, false, false, false, true, false});
    CHECK(detection_latency(lagged, seconds(3)) == 3);

    // Attack ends at t = 5 s inclusive: the first round that can clear is
    // round 6.
    CHECK(clear_latency(instant, seconds(5)) == 1);
    auto slow_clear = verdict_series({false, true, true, true, true, true, true, false});
    CHECK(clear_latency(slow_clear, seconds(5)) == 2);
}

TEST_CASE("latency queries without a matching verdict throw NeverDetected") {
    auto quiet = verdict_series({false, false, false});
    try {
        detection_latency(quiet, seconds(1));
        FAIL("expected NeverDetected");
    } catch (const SimError& e) {
        CHECK(e.code() == Errc::never_detected);
    }
    auto never_clear = verdict_series({true, true, true});
    CHECK_THROWS_AS(clear_latency(never_clear, seconds(0)), SimError);
    // Series that ends before the boundary.
    CHECK_THROWS_AS(detection_latency(quiet, seconds(50)), SimError);
}
