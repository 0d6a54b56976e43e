#include "ptpsec/engine.hpp"

#include <algorithm>

#include "ptpsec/errors.hpp"

namespace ptpsec {

void Simulator::schedule(TimeNs due, EventKind kind, std::function<void()> action) {
    if (due < now_)
        throw SimError(Errc::scheduling_in_past,
                       "event due " + std::to_string(due) + " < now " + std::to_string(now_));
    queue_.push(Event{due, next_seq_++, kind, std::move(action)});
}

void Simulator::run_until(TimeNs t_end) {
    if (t_end < now_)
        throw SimError(Errc::scheduling_in_past, "run_until into the past");
    while (!queue_.empty() && queue_.top().due <= t_end) {
        Event ev = queue_.top();
        queue_.pop();
        now_ = ev.due;
        ++processed_;
        ev.action();
    }
    now_ = t_end;
}

TimeNs LocalClock::local_time(TimeNs true_time) const {
    __int128 drift_term = static_cast<__int128>(drift_ppb_) * true_time / kNsPerSecond;
    TimeNs local = true_time + offset_at_epoch_ + static_cast<TimeNs>(drift_term);

    // Corrections applied at or before true_time shift the reading.
    // The log is sorted by construction; find the last applicable entry.
    auto it = std::upper_bound(log_.begin(), log_.end(), true_time,
                               [](TimeNs t, const std::pair<TimeNs, DurationNs>& entry) {
                                   return t < entry.first;
                               });
    if (it != log_.begin())
        local += shift_prefix_[static_cast<std::size_t>(it - log_.begin()) - 1];
    return local;
}

void LocalClock::apply_correction(DurationNs correction, TimeNs at) {
    if (!log_.empty() && at < log_.back().first)
        throw SimError(Errc::scheduling_in_past, "servo correction applied out of order");
    DurationNs running = shift_prefix_.empty() ? 0 : shift_prefix_.back();
    log_.emplace_back(at, correction);
    shift_prefix_.push_back(running - correction);
}

DurationNs true_offset(const LocalClock& a, const LocalClock& b, TimeNs at) {
    return b.local_time(at) - a.local_time(at);
}

DurationNs JitterStream::sample() {
    if (model_.kind == JitterModel::Kind::none || model_.half_width <= 0)
        return 0;
    std::uint64_t span = static_cast<std::uint64_t>(2 * model_.half_width + 1);
    return static_cast<DurationNs>(engine_() % span) - model_.half_width;
}

PacketEnvelope plan_transit(const NetworkGraph& graph, const Path& route, bool reverse,
                            const NodeId& from, const Message& message, TimeNs egress_true_time,
                            const AttackerState& attacker, JitterStream& jitter) {
    validate_path(graph, route);
    const NodeId& sending_end = reverse ? route.terminus : route.origin;
    if (from != sending_end)
        throw SimError(Errc::invalid_route,
                       "'" + from + "' is not the sending end of the route");

    PacketEnvelope env;
    env.message = message;
    env.route = route;
    env.reverse = reverse;
    env.egress_true_time = egress_true_time;

    TimeNs at = egress_true_time;
    const auto& steps = route.steps;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const PathStep& step = reverse ? steps[steps.size() - 1 - i] : steps[i];
        const Edge& edge = graph.edge(step.edge_id);
        // Traversal direction in the edge's declared orientation.
        bool fwd = reverse ? !step.forward : step.forward;
        DurationNs base = fwd ? edge.delay_ab : edge.delay_ba;
        DurationNs hop = std::max<DurationNs>(0, base + jitter.sample());
        hop += attacker.added_delay(edge.id, fwd ? LinkDirection::forward : LinkDirection::reverse,
                                    message.kind, at);
        env.per_hop_delays.push_back(hop);
        at += hop;
    }
    env.arrival_true_time = at;
    return env;
}

} // namespace ptpsec
