#include <doctest.h>

#include <functional>
#include <vector>

#include "ptpsec/engine.hpp"

using namespace ptpsec;

TEST_CASE("events fire in due order, FIFO among equal timestamps") {
    Simulator sim;
    std::vector<int> fired;
    sim.schedule(seconds(2), EventKind::timer_expiry, [&] { fired.push_back(3); });
    sim.schedule(seconds(1), EventKind::timer_expiry, [&] { fired.push_back(1); });
    sim.schedule(seconds(1), EventKind::timer_expiry, [&] { fired.push_back(2); });
    sim.run_until(seconds(3));
    CHECK(fired == std::vector<int>{1, 2, 3});
    CHECK(sim.now() == seconds(3));
}

TEST_CASE("an event at exactly t_end is processed") {
    Simulator sim;
    bool fired = false;
    sim.schedule(seconds(5), EventKind::timer_expiry, [&] { fired = true; });
    sim.run_until(seconds(5));
    CHECK(fired);
}

TEST_CASE("scheduling at the current instant fires before later events") {
    Simulator sim;
    std::vector<int> fired;
    sim.schedule(seconds(1), EventKind::timer_expiry, [&] {
        fired.push_back(1);
        sim.schedule(sim.now(), EventKind::timer_expiry, [&] { fired.push_back(2); });
    });
    sim.schedule(seconds(2), EventKind::timer_expiry, [&] { fired.push_back(3); });
    sim.run_until(seconds(2));
    CHECK(fired == std::vector<int>{1, 2, 3});
}

TEST_CASE("scheduling into the past is rejected") {
    Simulator sim;
    sim.run_until(seconds(1));
    CHECK_THROWS_AS(sim.schedule(0, EventKind::timer_expiry, [] {}), SimError);
}

TEST_CASE("run_until with an empty queue just advances time") {
    Simulator sim;
    sim.run_until(seconds(10));
    CHECK(sim.now() == seconds(10));
    CHECK(sim.events_processed() == 0);
}

TEST_CASE("clock readings are affine in true time") {
    LocalClock ident;
    CHECK(ident.local_time(seconds(7)) == seconds(7));

    LocalClock offset(microseconds(250), 0);
    CHECK(offset.local_time(seconds(200)) == seconds(200) + microseconds(250));

    LocalClock drifting(0, 10'000); // 10 ppm
    CHECK(drifting.local_time(seconds(1)) == seconds(1) + microseconds(10));
    // Truncation toward zero on fractional nanoseconds.
    LocalClock slow(0, 1); // 1 ppb
    CHECK(slow.local_time(999'999'999) == 999'999'999);
    CHECK(slow.local_time(-seconds(1)) == -seconds(1) - 1);
}

TEST_CASE("servo corrections shift only times at or after their instant") {
    LocalClock clock;
    clock.apply_correction(microseconds(250), seconds(10));
    CHECK(clock.local_time(seconds(9)) == seconds(9));
    CHECK(clock.local_time(seconds(10)) == seconds(10) - microseconds(250));
    CHECK(clock.local_time(seconds(11)) == seconds(11) - microseconds(250));

    clock.apply_correction(microseconds(100), seconds(20));
    CHECK(clock.local_time(seconds(21)) == seconds(21) - microseconds(350)); // net -(c1+c2)
    CHECK(clock.correction_log().size() == 2);
}

TEST_CASE("a correction equal to the current offset zeroes it") {
    LocalClock master;
    LocalClock slave(microseconds(80), 0);
    DurationNs offset = true_offset(master, slave, seconds(1));
    CHECK(offset == microseconds(80));
    slave.apply_correction(offset, seconds(1));
    CHECK(true_offset(master, slave, seconds(1)) == 0);
}

TEST_CASE("true_offset is anti-symmetric") {
    LocalClock a(microseconds(30), 2'000);
    LocalClock b(-microseconds(5), 0);
    CHECK(true_offset(a, b, seconds(3)) == -true_offset(b, a, seconds(3)));
    LocalClock c;
    CHECK(true_offset(c, c, seconds(9)) == 0);
}

namespace {

NetworkGraph transit_graph() {
    TopologySpec spec;
    spec.nodes = {"M", "S", "x"};
    spec.edges = {{"e0", "M", "S", microseconds(100), microseconds(100)},
                  {"r0", "M", "x", microseconds(40), microseconds(40)},
                  {"r1", "x", "S", microseconds(60), microseconds(60)}};
    spec.master = "M";
    spec.slaves = {"S"};
    return build_graph(spec);
}

} // namespace

TEST_CASE("transit adds directional base delays, adversary delays, and nothing else") {
    NetworkGraph g = transit_graph();
    JitterStream quiet;
    Message sync;
    sync.kind = MessageKind::sync;

    Path direct{"M", "S", {{"e0", true}}};
    AttackerState no_attack;
    PacketEnvelope clean = plan_transit(g, direct, false, "M", sync, seconds(1), no_attack, quiet);
    CHECK(clean.arrival_true_time == seconds(1) + microseconds(100));
    REQUIRE(clean.per_hop_delays.size() == 1);
    CHECK(clean.per_hop_delays[0] == microseconds(100));

    AttackSpec spec;
    spec.edge_id = "e0";
    spec.direction = LinkDirection::forward;
    spec.message_filter = {MessageKind::sync};
    spec.profile = {AttackProfile::Kind::static_delay, microseconds(500), 0, 0, seconds(10)};
    AttackerState attacker({spec});
    PacketEnvelope hit = plan_transit(g, direct, false, "M", sync, seconds(1), attacker, quiet);
    CHECK(hit.arrival_true_time == seconds(1) + microseconds(600));

    Message meas;
    meas.kind = MessageKind::meas;
    Path redundant{"M", "S", {{"r0", true}, {"r1", true}}};
    PacketEnvelope multi =
        plan_transit(g, redundant, false, "M", meas, seconds(2), attacker, quiet);
    CHECK(multi.arrival_true_time == seconds(2) + microseconds(100)); // 40 + 60
    CHECK(multi.per_hop_delays == std::vector<DurationNs>{microseconds(40), microseconds(60)});

    // Reverse traversal uses the other directional delay and sending end.
    PacketEnvelope back = plan_transit(g, direct, true, "S", sync, seconds(3), attacker, quiet);
    CHECK(back.arrival_true_time == seconds(3) + microseconds(100)); // attack is forward-only

    CHECK_THROWS_AS(plan_transit(g, direct, false, "S", sync, seconds(4), no_attack, quiet),
                    SimError);
}

TEST_CASE("uniform jitter is bounded and reproducible") {
    JitterModel model{JitterModel::Kind::uniform, microseconds(5)};
    JitterStream a(model, 77);
    JitterStream b(model, 77);
    for (int i = 0; i < 2000; ++i) {
        DurationNs sample = a.sample();
        CHECK(sample >= -microseconds(5));
        CHECK(sample <= microseconds(5));
        CHECK(sample == b.sample());
    }
    JitterStream silent(JitterModel{}, 1);
    CHECK(silent.sample() == 0);
}
