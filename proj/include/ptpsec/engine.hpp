// Deterministic discrete-event kernel: simulated time, per-node local
// clocks, and packet transit over paths with per-edge directional
// delays, link jitter, and the adversary hook.
#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "ptpsec/adversary.hpp"
#include "ptpsec/messages.hpp"
#include "ptpsec/time_units.hpp"
#include "ptpsec/topology.hpp"

namespace ptpsec {

enum class EventKind { packet_arrival, timer_expiry, attack_phase_boundary };

// Single-threaded event loop. Events fire in (due, insertion order);
// simultaneous events are FIFO.
class Simulator {
public:
    TimeNs now() const { return now_; }

    // Throws SchedulingInPast when due < now().
    void schedule(TimeNs due, EventKind kind, std::function<void()> action);

    // Processes every event with due <= t_end (inclusive boundary) and
    // leaves the simulation clock at t_end.
    void run_until(TimeNs t_end);

    std::uint64_t events_processed() const { return processed_; }

private:
    struct Event {
        TimeNs due;
        std::uint64_t seq;
        EventKind kind;
        std::function<void()> action;
    };
    struct After {
        bool operator()(const Event& a, const Event& b) const {
            if (a.due != b.due)
                return a.due > b.due;
            return a.seq > b.seq;
        }
    };

    std::priority_queue<Event, std::vector<Event>, After> queue_;
    TimeNs now_{0};
    std::uint64_t next_seq_{0};
    std::uint64_t processed_{0};
};

// Piecewise-affine simulated oscillator. All arithmetic is integer;
// the drift term truncates toward zero (drift is stored in parts per
// billion so whole-ppm configs stay exact).
class LocalClock {
public:
    LocalClock() = default;
    LocalClock(DurationNs offset_at_epoch, std::int64_t drift_ppb)
        : offset_at_epoch_(offset_at_epoch), drift_ppb_(drift_ppb) {}

    // local_time(t) = t + offset + trunc(drift_ppb * t / 1e9)
    //               + sum of corrections applied at or before t.
    TimeNs local_time(TimeNs true_time) const;

    // Shifts local_time by -correction for all times >= at (step servo).
    // Corrections must be applied in nondecreasing `at` order.
    void apply_correction(DurationNs correction, TimeNs at);

    const std::vector<std::pair<TimeNs, DurationNs>>& correction_log() const { return log_; }

private:
    DurationNs offset_at_epoch_{0};
    std::int64_t drift_ppb_{0};
    std::vector<std::pair<TimeNs, DurationNs>> log_; // (at, correction)
    std::vector<DurationNs> shift_prefix_;           // running sum of -correction
};

// Ideal hardware timestamping: the captured value is exactly the node
// clock read at the true event time (noise lives on links, not in the
// timestamp path).
inline TimeNs capture_timestamp(const LocalClock& clock, TimeNs true_time) {
    return clock.local_time(true_time);
}

// Ground-truth offset between two clocks: second minus first. With the
// slave as second argument this is the slave's lead over the master.
DurationNs true_offset(const LocalClock& a, const LocalClock& b, TimeNs at);

struct JitterModel {
    enum class Kind { none, uniform };
    Kind kind{Kind::none};
    DurationNs half_width{0};
};

// Deterministic jitter stream; the uniform variant draws integer
// nanoseconds from [-half_width, +half_width]. The reduction is done by
// hand so the byte-identical-rerun contract holds across standard
// libraries.
class JitterStream {
public:
    JitterStream() = default;
    JitterStream(JitterModel model, std::uint64_t seed) : model_(model), engine_(seed) {}

    DurationNs sample();

private:
    JitterModel model_{};
    std::mt19937_64 engine_{0};
};

// One message in transit over a route.
struct PacketEnvelope {
    Message message;
    Path route;
    bool reverse{false}; // true: traverses the route terminus -> origin
    TimeNs egress_true_time{0};
    std::vector<DurationNs> per_hop_delays;
    TimeNs arrival_true_time{0};
};

// Computes the transit of `message` over `route`: per hop, directional
// base delay + jitter sample + adversary delay for that edge, direction
// and kind, evaluated at the instant the packet enters the edge. The
// caller schedules the arrival event. Throws InvalidRoute when `from`
// is not the sending end of the route.
PacketEnvelope plan_transit(const NetworkGraph& graph, const Path& route, bool reverse,
                            const NodeId& from, const Message& message, TimeNs egress_true_time,
                            const AttackerState& attacker, JitterStream& jitter);

} // namespace ptpsec
