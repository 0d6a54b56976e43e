#include <doctest.h>

#include "ptpsec/adversary.hpp"

using namespace ptpsec;

namespace {

AttackSpec sync_attack(const std::string& edge, DurationNs epsilon, TimeNs start, TimeNs end) {
    AttackSpec spec;
    spec.edge_id = edge;
    spec.direction = LinkDirection::forward;
    spec.message_filter = {MessageKind::sync};
    spec.profile = {AttackProfile::Kind::static_delay, epsilon, 0, start, end};
    return spec;
}

NetworkGraph pair_graph() {
    TopologySpec spec;
    spec.nodes = {"M", "S"};
    spec.edges = {{"e0", "M", "S", microseconds(100), microseconds(100)},
                  {"e1", "M", "S", microseconds(100), microseconds(100)}};
    spec.master = "M";
    spec.slaves = {"S"};
    return build_graph(spec);
}

} // namespace

TEST_CASE("static delay applies inside the window only") {
    AttackerState state({sync_attack("e0", microseconds(500), seconds(100), seconds(500))});

    CHECK(state.added_delay("e0", LinkDirection::forward, MessageKind::sync, seconds(300)) ==
          microseconds(500));
    CHECK(state.added_delay("e0", LinkDirection::forward, MessageKind::sync, seconds(50)) == 0);
    // Window boundaries are inclusive.
    CHECK(state.added_delay("e0", LinkDirection::forward, MessageKind::sync, seconds(100)) ==
          microseconds(500));
    CHECK(state.added_delay("e0", LinkDirection::forward, MessageKind::sync, seconds(500)) ==
          microseconds(500));
    CHECK(state.added_delay("e0", LinkDirection::forward, MessageKind::sync,
                            seconds(500) + 1) == 0);
    // Wrong edge, direction or kind: no delay.
    CHECK(state.added_delay("e1", LinkDirection::forward, MessageKind::sync, seconds(300)) == 0);
    CHECK(state.added_delay("e0", LinkDirection::reverse, MessageKind::sync, seconds(300)) == 0);
    CHECK(state.added_delay("e0", LinkDirection::forward, MessageKind::meas, seconds(300)) == 0);
}

TEST_CASE("incremental delay ramps linearly and saturates") {
    AttackSpec spec = sync_attack("e0", microseconds(500), seconds(100), seconds(600));
    spec.profile.kind = AttackProfile::Kind::incremental;
    spec.profile.delta_per_second = 1250; // 1.25 us per second
    AttackerState state({spec});

    auto at = [&](TimeNs t) {
        return state.added_delay("e0", LinkDirection::forward, MessageKind::sync, t);
    };
    CHECK(at(seconds(100)) == 0);
    CHECK(at(seconds(300)) == microseconds(250)); // min(500, 1.25 * 200)
    CHECK(at(seconds(500)) == microseconds(500));
    CHECK(at(seconds(550)) == microseconds(500)); // saturated

    // Non-decreasing over the window.
    DurationNs prev = 0;
    for (TimeNs t = seconds(100); t <= seconds(600); t += seconds(1)) {
        DurationNs v = at(t);
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("a Sync filter never delays the other message kinds") {
    AttackerState state({sync_attack("e0", microseconds(500), 0, seconds(10))});
    for (MessageKind kind : {MessageKind::follow_up, MessageKind::delay_req,
                             MessageKind::delay_resp, MessageKind::meas, MessageKind::meas_fup}) {
        CHECK(state.added_delay("e0", LinkDirection::forward, kind, seconds(5)) == 0);
    }
}

TEST_CASE("profile validation catches malformed specs") {
    AttackSpec backwards = sync_attack("e0", microseconds(1), seconds(5), seconds(5));
    CHECK_THROWS_AS(AttackerState({backwards}), SimError);

    AttackSpec empty_filter = sync_attack("e0", microseconds(1), 0, seconds(5));
    empty_filter.message_filter.clear();
    CHECK_THROWS_AS(AttackerState({empty_filter}), SimError);

    AttackSpec short_ramp = sync_attack("e0", microseconds(500), seconds(100), seconds(200));
    short_ramp.profile.kind = AttackProfile::Kind::incremental;
    short_ramp.profile.delta_per_second = 1250; // needs 400 s to reach 500 us
    CHECK_THROWS_AS(AttackerState({short_ramp}), SimError);

    AttackSpec sloppy = sync_attack("e0", microseconds(1), 0, seconds(5));
    sloppy.profile.delta_per_second = 7; // static profile with a ramp rate
    CHECK_THROWS_AS(AttackerState({sloppy}), SimError);
}

TEST_CASE("conflicting specs on the same tuple are rejected") {
    AttackSpec a = sync_attack("e0", microseconds(500), seconds(0), seconds(10));
    AttackSpec b = sync_attack("e0", microseconds(100), seconds(5), seconds(15));

    try {
        AttackerState state({a, b});
        FAIL("expected ConflictingSpecs");
    } catch (const SimError& e) {
        CHECK(e.code() == Errc::conflicting_specs);
    }

    // Disjoint windows, different kinds, or different directions are fine.
    AttackSpec later = sync_attack("e0", microseconds(100), seconds(11), seconds(15));
    CHECK_NOTHROW(AttackerState({a, later}));

    AttackSpec dreq = a;
    dreq.message_filter = {MessageKind::delay_req};
    CHECK_NOTHROW(AttackerState({a, dreq}));

    AttackSpec reverse = a;
    reverse.direction = LinkDirection::reverse;
    AttackerState both({a, reverse});
    // Overlapping specs that do not conflict sum per direction.
    CHECK(both.added_delay("e0", LinkDirection::forward, MessageKind::sync, seconds(1)) ==
          microseconds(500));
    CHECK(both.added_delay("e0", LinkDirection::reverse, MessageKind::sync, seconds(1)) ==
          microseconds(500));
}

TEST_CASE("validate_attacker cross-checks edges against the graph") {
    NetworkGraph g = pair_graph();
    AttackerState good({sync_attack("e0", microseconds(500), 0, seconds(10))});
    CHECK_NOTHROW(validate_attacker(good, g));

    // Coordinated two-path placement is allowed.
    AttackSpec second = sync_attack("e1", microseconds(500), 0, seconds(10));
    second.message_filter = {MessageKind::meas};
    CHECK_NOTHROW(validate_attacker(AttackerState({good.specs()[0], second}), g));

    AttackerState ghost({sync_attack("nope", microseconds(1), 0, seconds(10))});
    try {
        validate_attacker(ghost, g);
        FAIL("expected UnknownEdge");
    } catch (const SimError& e) {
        CHECK(e.code() == Errc::unknown_edge);
    }
}
