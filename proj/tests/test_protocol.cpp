#include <doctest.h>

#include "ptpsec/protocol.hpp"

using namespace ptpsec;

namespace {

SyncRoundRecord quad(TimeNs t1, TimeNs t2, TimeNs t3, TimeNs t4) {
    SyncRoundRecord rec;
    rec.t1 = t1;
    rec.t2 = t2;
    rec.t3 = t3;
    rec.t4 = t4;
    return rec;
}

} // namespace

TEST_CASE("compute_offset reproduces the canonical rounds") {
    // Symmetric 100 us, zero offset.
    CHECK(compute_offset(quad(0, microseconds(100), microseconds(200), microseconds(300))) == 0);
    // Fresh 500 us Sync delay on a 100 us link.
    CHECK(compute_offset(quad(0, microseconds(600), microseconds(1000), microseconds(1100))) ==
          microseconds(250));
    // Fresh 500 us Delay_Req delay.
    CHECK(compute_offset(quad(0, microseconds(100), microseconds(200), microseconds(800))) ==
          -microseconds(250));

    CHECK_THROWS_AS(compute_offset(SyncRoundRecord{}), SimError);
}

TEST_CASE("expected_offset_under_attack matches the attacked-offset identity") {
    CHECK(expected_offset_under_attack(microseconds(7), microseconds(300), microseconds(300)) ==
          microseconds(7));
    CHECK(expected_offset_under_attack(0, microseconds(500), 0) == microseconds(250));
    CHECK(expected_offset_under_attack(0, 0, microseconds(500)) == -microseconds(250));
}

TEST_CASE("rtt_measurements combines same-clock spans") {
    SyncRoundRecord rec;
    rec.t1 = 0;
    rec.t2 = microseconds(600);
    rec.tm1 = microseconds(610);
    rec.tm2 = microseconds(710);
    rec.t3 = microseconds(1000);
    rec.t4 = microseconds(1100);
    rec.tm3 = microseconds(1110);
    rec.tm4 = microseconds(1210);

    RttPair rtt = rtt_measurements(rec);
    CHECK(rtt.forward == microseconds(700));
    CHECK(rtt.reverse == microseconds(200));

    // A uniform shift of every slave timestamp leaves both RTTs alone.
    SyncRoundRecord shifted = rec;
    DurationNs c = microseconds(123456);
    *shifted.t2 += c;
    *shifted.t3 += c;
    *shifted.tm1 += c;
    *shifted.tm4 += c;
    RttPair again = rtt_measurements(shifted);
    CHECK(again.forward == rtt.forward);
    CHECK(again.reverse == rtt.reverse);

    SyncRoundRecord partial = quad(0, 1, 2, 3);
    CHECK_THROWS_AS(rtt_measurements(partial), SimError);
}

TEST_CASE("asymmetry_estimate and rectified_offset") {
    CHECK(asymmetry_estimate(microseconds(700), microseconds(200)) == microseconds(500));
    CHECK(asymmetry_estimate(microseconds(200), microseconds(200)) == 0);
    CHECK(asymmetry_estimate(microseconds(200), microseconds(700)) == -microseconds(500));

    CHECK(rectified_offset(microseconds(250), microseconds(500)) == 0);
    CHECK(rectified_offset(microseconds(42), 0) == microseconds(42));
    CHECK(rectified_offset(-microseconds(250), -microseconds(500)) == 0);
}

TEST_CASE("messages_per_cycle is 4 + 4n") {
    CHECK(messages_per_cycle(0) == 4);
    CHECK(messages_per_cycle(1) == 8);
    CHECK(messages_per_cycle(3) == 16);
    CHECK_THROWS_AS(messages_per_cycle(-1), SimError);
}

TEST_CASE("measured_paths respects mode and policy") {
    ProtocolConfig cfg;
    cfg.mode = SyncMode::ptpsec;
    cfg.redundant_paths = 3;
    CHECK(measured_paths(cfg, 7) == std::vector<int>{1, 2, 3});

    cfg.policy = PathPolicy::round_robin;
    CHECK(measured_paths(cfg, 0) == std::vector<int>{1});
    CHECK(measured_paths(cfg, 1) == std::vector<int>{2});
    CHECK(measured_paths(cfg, 2) == std::vector<int>{3});
    CHECK(measured_paths(cfg, 3) == std::vector<int>{1});

    ProtocolConfig plain;
    plain.mode = SyncMode::ptp;
    plain.redundant_paths = 0;
    CHECK(measured_paths(plain, 0).empty());
}

namespace {

ProtocolConfig secured_config() {
    ProtocolConfig cfg;
    cfg.mode = SyncMode::ptpsec;
    cfg.redundant_paths = 1;
    cfg.residence = microseconds(10);
    cfg.detect_threshold = 1; // 1 ns
    cfg.attacker_bound = 0;
    return cfg;
}

// Drives one full secured round through both sessions with the fig-6
// fresh-attack numbers and returns the slave's result.
RoundResult drive_attacked_round() {
    MasterSession master(secured_config());
    SlaveSession slave(secured_config());

    auto sync = master.start_round(0);
    REQUIRE(sync.size() == 1);
    CHECK(sync[0].msg.kind == MessageKind::sync);
    CHECK(sync[0].msg.path_index == 0);

    auto fup = master.on_egress(sync[0].msg, 0); // t1 = 0
    REQUIRE(fup.size() == 1);
    CHECK(fup[0].msg.kind == MessageKind::follow_up);
    CHECK(fup[0].msg.origin_timestamp == 0);

    // Sync is delayed by 500 us on the 100 us link: t2 = 600 us.
    auto slave_batch = slave.handle_message(sync[0].msg, microseconds(600));
    REQUIRE(slave_batch.size() == 2);
    CHECK(slave_batch[0].msg.kind == MessageKind::meas);
    CHECK(slave_batch[0].msg.path_index == 1);
    CHECK(slave_batch[0].hold == microseconds(10));
    CHECK(slave_batch[1].msg.kind == MessageKind::delay_req);
    CHECK(slave.handle_message(fup[0].msg, microseconds(601)).empty());

    auto meas_fup = slave.on_egress(slave_batch[0].msg, microseconds(610)); // t_m1
    REQUIRE(meas_fup.size() == 1);
    CHECK(meas_fup[0].msg.kind == MessageKind::meas_fup);
    CHECK(slave.on_egress(slave_batch[1].msg, microseconds(610)).empty()); // t3

    // Master side: Meas and Meas_Fup land before Delay_Req completes the
    // inputs; the response batch is withheld until everything arrived.
    CHECK(master.handle_message(slave_batch[0].msg, microseconds(710)).empty()); // t_m2
    CHECK(master.handle_message(meas_fup[0].msg, microseconds(711)).empty());
    auto response = master.handle_message(slave_batch[1].msg, microseconds(710)); // t4
    REQUIRE(response.size() == 2);
    CHECK(response[0].msg.kind == MessageKind::meas);
    CHECK(response[1].msg.kind == MessageKind::delay_resp);
    CHECK(response[1].msg.origin_timestamp == microseconds(710));

    auto down_fup = master.on_egress(response[0].msg, microseconds(720)); // t_m3
    REQUIRE(down_fup.size() == 1);
    CHECK(down_fup[0].msg.meas_ingress_echo == microseconds(710));

    CHECK(slave.handle_message(response[0].msg, microseconds(820)).empty()); // t_m4
    CHECK(slave.handle_message(down_fup[0].msg, microseconds(821)).empty());
    CHECK(slave.handle_message(response[1].msg, microseconds(821)).empty());

    auto completed = slave.take_completed();
    REQUIRE(completed.size() == 1);
    return completed.front();
}

} // namespace

TEST_CASE("a full secured round under a fresh Sync attack") {
    RoundResult round = drive_attacked_round();
    CHECK(round.seq == 0);
    CHECK(round.theta_rep == microseconds(250));
    REQUIRE(round.measurements.size() == 1);
    CHECK(round.measurements[0].rtt_forward == microseconds(700));
    CHECK(round.measurements[0].rtt_reverse == microseconds(200));
    CHECK(round.measurements[0].alpha == microseconds(500));
    CHECK(round.consensus_alpha == microseconds(500));
    CHECK(round.theta_rect == 0);
    CHECK(round.correction == 0);
    REQUIRE(round.verdict.has_value());
    CHECK(round.verdict->attacked);
    CHECK(round.verdict->triggering == std::set<int>{1});
}

TEST_CASE("duplicate and out-of-order messages are rejected without state damage") {
    ProtocolConfig cfg = secured_config();
    MasterSession master(cfg);
    SlaveSession slave(cfg);

    auto sync = master.start_round(0);
    auto fup = master.on_egress(sync[0].msg, 0);
    slave.handle_message(sync[0].msg, microseconds(100));
    slave.handle_message(fup[0].msg, microseconds(101));

    try {
        slave.handle_message(fup[0].msg, microseconds(102));
        FAIL("expected DuplicateMessage");
    } catch (const SimError& e) {
        CHECK(e.code() == Errc::duplicate_message);
    }

    Message stray;
    stray.kind = MessageKind::meas;
    stray.seq = 9;
    stray.path_index = 1;
    try {
        master.handle_message(stray, microseconds(1));
        FAIL("expected UnknownSeq");
    } catch (const SimError& e) {
        CHECK(e.code() == Errc::unknown_seq);
    }
}

TEST_CASE("expired rounds report stale messages and count drops") {
    ProtocolConfig cfg = secured_config();
    MasterSession master(cfg);
    SlaveSession slave(cfg);

    auto sync = master.start_round(0);
    master.on_egress(sync[0].msg, 0);
    slave.handle_message(sync[0].msg, microseconds(100));

    CHECK(slave.expire_round(0));
    CHECK(slave.dropped_rounds() == 1);
    CHECK(master.expire_round(0));

    try {
        slave.handle_message(sync[0].msg, microseconds(200));
        FAIL("expected StaleRound");
    } catch (const SimError& e) {
        CHECK(e.code() == Errc::stale_round);
    }
}

TEST_CASE("conventional mode emits no measurement traffic") {
    ProtocolConfig cfg;
    cfg.mode = SyncMode::ptp;
    cfg.redundant_paths = 0;
    cfg.residence = microseconds(10);
    MasterSession master(cfg);
    SlaveSession slave(cfg);

    auto sync = master.start_round(0);
    auto fup = master.on_egress(sync[0].msg, 0);
    auto batch = slave.handle_message(sync[0].msg, microseconds(100));
    REQUIRE(batch.size() == 1);
    CHECK(batch[0].msg.kind == MessageKind::delay_req);
    slave.handle_message(fup[0].msg, microseconds(101));
    CHECK(slave.on_egress(batch[0].msg, microseconds(110)).empty());

    auto response = master.handle_message(batch[0].msg, microseconds(210));
    REQUIRE(response.size() == 1);
    CHECK(response[0].msg.kind == MessageKind::delay_resp);

    slave.handle_message(response[0].msg, microseconds(230));
    auto completed = slave.take_completed();
    REQUIRE(completed.size() == 1);
    CHECK(completed[0].measurements.empty());
    CHECK_FALSE(completed[0].verdict.has_value());
    CHECK(completed[0].theta_rect == completed[0].theta_rep); // servo invariant
    CHECK(slave.servo().theta_rect == slave.servo().theta_rep);
}

TEST_CASE("a Follow_Up that overtakes its delayed Sync still opens the round") {
    ProtocolConfig cfg = secured_config();
    MasterSession master(cfg);
    SlaveSession slave(cfg);

    auto sync = master.start_round(0);
    auto fup = master.on_egress(sync[0].msg, 0);

    CHECK(slave.handle_message(fup[0].msg, microseconds(100)).empty());
    auto batch = slave.handle_message(sync[0].msg, microseconds(600));
    CHECK(batch.size() == 2); // Meas + Delay_Req still triggered by Sync
}

TEST_CASE("secured config requires a redundant path") {
    ProtocolConfig cfg;
    cfg.mode = SyncMode::ptpsec;
    cfg.redundant_paths = 0;
    CHECK_THROWS_AS(MasterSession{cfg}, SimError);
}
