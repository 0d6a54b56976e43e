// Two-step synchronization state machines (conventional and secured
// modes), timestamp bookkeeping, and the round arithmetic: reported
// offset, cyclic RTT pairs, path-asymmetry estimates, and the rectified
// offset used for mitigation.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "ptpsec/detection.hpp"
#include "ptpsec/errors.hpp"
#include "ptpsec/messages.hpp"
#include "ptpsec/time_units.hpp"

namespace ptpsec {

// The eight timestamps of one secured round over one redundant path
// (the conventional quad t1..t4 plus the measurement quad t_m1..t_m4).
// t1/t4/t_m2/t_m3 are master-clock readings, t2/t3/t_m1/t_m4 slave-clock
// readings; timestamps from different clocks are never ordered against
// each other.
struct SyncRoundRecord {
    std::uint64_t seq{0};
    int path_index{1}; // redundant path P_i used for the measurement quad

    std::optional<TimeNs> t1;  // Sync egress (master)
    std::optional<TimeNs> t2;  // Sync ingress (slave)
    std::optional<TimeNs> t3;  // Delay_Req egress (slave)
    std::optional<TimeNs> t4;  // Delay_Req ingress (master)
    std::optional<TimeNs> tm1; // Meas egress (slave)
    std::optional<TimeNs> tm2; // Meas ingress (master)
    std::optional<TimeNs> tm3; // Meas egress (master)
    std::optional<TimeNs> tm4; // Meas ingress (slave)

    bool has_sync_quad() const { return t1 && t2 && t3 && t4; }
    bool complete() const { return has_sync_quad() && tm1 && tm2 && tm3 && tm4; }
};

// Reported offset theta_rep = ((t2 - t1) - (t4 - t3)) / 2. Integer
// division truncates toward zero on odd nanosecond sums. Throws
// IncompleteRound without the sync quad.
DurationNs compute_offset(const SyncRoundRecord& rec);

// Oracle relating an adversary configuration to the reported offset:
// theta_true + (eps1 - eps2) / 2, where eps1 delays Sync and eps2
// delays Delay_Req.
DurationNs expected_offset_under_attack(DurationNs theta_true, DurationNs eps1, DurationNs eps2);

struct RttPair {
    DurationNs forward{0}; // cycle Sync over P_0, Meas back over P_i
    DurationNs reverse{0}; // cycle Delay_Req over P_0, Meas back over P_i
};

// RTT_fwd = (t_m2 - t1) - (t_m1 - t2), RTT_rev = (t_m4 - t3) - (t_m3 - t4).
// Both combine only same-clock differences, so they are independent of
// the slave's offset. Throws IncompleteRound unless all eight
// timestamps are present.
RttPair rtt_measurements(const SyncRoundRecord& rec);

// alpha = RTT_fwd - RTT_rev; equals alpha_P0 - alpha_Pi in ground truth.
DurationNs asymmetry_estimate(DurationNs rtt_forward, DurationNs rtt_reverse);

// theta_rect = theta_rep - alpha / 2 (truncating division).
DurationNs rectified_offset(DurationNs theta_rep, DurationNs alpha);

// Messages per completed secured cycle with n redundant paths measured:
// 4 + 4n (4 for the conventional exchange, 4 per redundant path).
int messages_per_cycle(int redundant_paths);

enum class SyncMode { ptp, ptpsec };
enum class PathPolicy { all_paths, round_robin };

struct ProtocolConfig {
    SyncMode mode{SyncMode::ptpsec};
    DurationNs sync_interval{seconds(1)};
    // Fixed processing time between receiving an event message and
    // emitting the responses it triggers. Cancels exactly in both RTT
    // expressions.
    DurationNs residence{microseconds(10)};
    PathPolicy policy{PathPolicy::all_paths};
    int redundant_paths{0}; // n
    DurationNs detect_threshold{microseconds(1)};
    int attacker_bound{0};
};

// Redundant paths measured in round `seq` under the configured policy.
std::vector<int> measured_paths(const ProtocolConfig& cfg, std::uint64_t seq);

// A message the session wants sent: egress happens `hold` after the
// triggering instant (0 for immediate follow-ups, residence for
// responses to event messages). The route is msg.path_index.
struct Emission {
    Message msg;
    DurationNs hold{0};
};

struct ServoState {
    DurationNs theta_rep{0};
    DurationNs alpha{0};
    DurationNs theta_rect{0};
    SyncMode mode{SyncMode::ptpsec};
};

struct PathMeasurement {
    int path_index{0};
    DurationNs rtt_forward{0};
    DurationNs rtt_reverse{0};
    DurationNs alpha{0};
};

// Everything one completed round reports to the servo, the detector,
// and the output writer.
struct RoundResult {
    std::uint64_t seq{0};
    DurationNs theta_rep{0};
    std::vector<PathMeasurement> measurements;
    std::optional<detection::Verdict> verdict;             // secured mode only
    std::optional<detection::Localization> localization;   // secured mode only
    DurationNs consensus_alpha{0};
    DurationNs theta_rect{0};
    // Step correction the servo applies: theta_rect in secured mode,
    // theta_rep in conventional mode.
    DurationNs correction{0};
};

// Master-side state machine. The runner drives it with start_round /
// handle_message / on_egress and routes the returned emissions.
class MasterSession {
public:
    explicit MasterSession(ProtocolConfig cfg);

    // Opens round `seq` and returns the Sync emission.
    std::vector<Emission> start_round(std::uint64_t seq);

    // Reports the captured egress timestamp of an event message the
    // master sent; returns the follow-up emissions it triggers.
    std::vector<Emission> on_egress(const Message& msg, TimeNs egress_ts);

    // Handles an arriving message (ingress_ts from the master clock).
    // The response batch to a Delay_Req is withheld until the round's
    // measurement messages from every measured path have arrived, so the
    // returned Meas_Fups can echo the captured t_m2 values.
    std::vector<Emission> handle_message(const Message& msg, TimeNs ingress_ts);

    // Discards round state; returns true when the round was incomplete.
    bool expire_round(std::uint64_t seq);

    const ProtocolConfig& config() const { return cfg_; }

private:
    struct PerPath {
        std::optional<TimeNs> tm2;  // Meas ingress (captured here)
        std::optional<TimeNs> tm1;  // conveyed by the slave's Meas_Fup
        std::optional<TimeNs> tm3;  // Meas egress (captured here)
    };
    struct Round {
        std::optional<TimeNs> t1, t4;
        std::vector<int> measured;
        std::map<int, PerPath> paths;
        bool responded{false};
    };

    Round& round_for(std::uint64_t seq, MessageKind kind);
    std::vector<Emission> maybe_respond(std::uint64_t seq, Round& round);

    ProtocolConfig cfg_;
    std::map<std::uint64_t, Round> rounds_;
    std::uint64_t stale_floor_{0};
};

// Slave-side state machine; completed rounds queue up as RoundResults.
class SlaveSession {
public:
    explicit SlaveSession(ProtocolConfig cfg);

    std::vector<Emission> handle_message(const Message& msg, TimeNs ingress_ts);
    std::vector<Emission> on_egress(const Message& msg, TimeNs egress_ts);

    // Discards round state after the reception timeout; returns true
    // (and counts a dropped round) when the round never completed.
    bool expire_round(std::uint64_t seq);

    std::vector<RoundResult> take_completed();

    const ServoState& servo() const { return servo_; }
    std::uint64_t dropped_rounds() const { return dropped_; }
    const ProtocolConfig& config() const { return cfg_; }

private:
    struct PerPath {
        std::optional<TimeNs> tm1;      // Meas egress (captured here)
        std::optional<TimeNs> tm4;      // Meas ingress (captured here)
        std::optional<TimeNs> tm3;      // conveyed by the master's Meas_Fup
        std::optional<TimeNs> tm2_echo; // echoed by the master's Meas_Fup
    };
    struct Round {
        std::optional<TimeNs> t1, t2, t3, t4;
        std::vector<int> measured;
        std::map<int, PerPath> paths;
        bool done{false};
    };

    Round& open_or_get(std::uint64_t seq);
    Round& existing(std::uint64_t seq, MessageKind kind);
    void try_finish(std::uint64_t seq, Round& round);

    ProtocolConfig cfg_;
    std::map<std::uint64_t, Round> rounds_;
    std::vector<RoundResult> completed_;
    ServoState servo_;
    std::uint64_t stale_floor_{0};
    std::uint64_t dropped_{0};
};

} // namespace ptpsec
