#include "ptpsec/adversary.hpp"

#include <algorithm>

#include "ptpsec/errors.hpp"

namespace ptpsec {

std::string_view to_string(LinkDirection dir) noexcept {
    return dir == LinkDirection::forward ? "forward" : "reverse";
}

LinkDirection link_direction_from_string(std::string_view name) {
    if (name == "forward") return LinkDirection::forward;
    if (name == "reverse") return LinkDirection::reverse;
    throw SimError(Errc::parse_error, "unknown link direction '" + std::string(name) + "'");
}

DurationNs AttackProfile::value_at(TimeNs at) const {
    if (at < start || at > end)
        return 0;
    if (kind == Kind::static_delay)
        return epsilon;
    // Ramp: delta_per_second * elapsed, truncated toward zero, capped at
    // the final level.
    __int128 ramped = static_cast<__int128>(delta_per_second) * (at - start) / kNsPerSecond;
    if (ramped > epsilon)
        return epsilon;
    return static_cast<DurationNs>(ramped);
}

namespace {

void validate_profile(const AttackSpec& spec) {
    const AttackProfile& p = spec.profile;
    if (p.start >= p.end)
        throw SimError(Errc::validation_error,
                       "attack on '" + spec.edge_id + "': window start must precede end");
    if (p.epsilon < 0)
        throw SimError(Errc::validation_error,
                       "attack on '" + spec.edge_id + "': epsilon must be >= 0");
    if (spec.message_filter.empty())
        throw SimError(Errc::validation_error,
                       "attack on '" + spec.edge_id + "': empty message filter");
    if (p.kind == AttackProfile::Kind::incremental) {
        if (p.delta_per_second <= 0)
            throw SimError(Errc::validation_error,
                           "attack on '" + spec.edge_id + "': incremental ramp needs delta > 0");
        // The ramp must reach its final level inside the window.
        __int128 reach_ns =
            (static_cast<__int128>(p.epsilon) * kNsPerSecond + p.delta_per_second - 1) /
            p.delta_per_second;
        if (static_cast<__int128>(p.start) + reach_ns > p.end)
            throw SimError(Errc::validation_error, "attack on '" + spec.edge_id +
                                                       "': ramp does not reach epsilon "
                                                       "before the window ends");
    } else if (p.delta_per_second != 0) {
        throw SimError(Errc::validation_error,
                       "attack on '" + spec.edge_id + "': static profile with nonzero delta");
    }
}

bool windows_overlap(const AttackProfile& a, const AttackProfile& b) {
    return a.start <= b.end && b.start <= a.end;
}

} // namespace

AttackerState::AttackerState(std::vector<AttackSpec> specs) : specs_(std::move(specs)) {
    for (const auto& spec : specs_)
        validate_profile(spec);

    for (std::size_t i = 0; i < specs_.size(); ++i) {
        for (std::size_t j = i + 1; j < specs_.size(); ++j) {
            const auto& a = specs_[i];
            const auto& b = specs_[j];
            if (a.edge_id != b.edge_id || a.direction != b.direction)
                continue;
            if (!windows_overlap(a.profile, b.profile))
                continue;
            for (MessageKind kind : a.message_filter) {
                if (b.matches_kind(kind))
                    throw SimError(Errc::conflicting_specs,
                                   "two attacks target " + std::string(to_string(kind)) + " on '" +
                                       a.edge_id + "' (" + std::string(to_string(a.direction)) +
                                       ") with overlapping windows");
            }
        }
    }
}

DurationNs AttackerState::added_delay(const std::string& edge_id, LinkDirection direction,
                                      MessageKind kind, TimeNs at) const {
    DurationNs total = 0;
    for (const auto& spec : specs_) {
        if (spec.edge_id == edge_id && spec.direction == direction && spec.matches_kind(kind))
            total += spec.profile.value_at(at);
    }
    return total;
}

void AttackerState::validate_against(const NetworkGraph& graph) const {
    for (const auto& spec : specs_) {
        if (!graph.has_edge(spec.edge_id))
            throw SimError(Errc::unknown_edge, "attack targets unknown edge '" + spec.edge_id + "'");
    }
}

TimeNs AttackerState::earliest_start() const {
    TimeNs t = specs_.front().profile.start;
    for (const auto& s : specs_)
        t = std::min(t, s.profile.start);
    return t;
}

TimeNs AttackerState::latest_end() const {
    TimeNs t = specs_.front().profile.end;
    for (const auto& s : specs_)
        t = std::max(t, s.profile.end);
    return t;
}

void validate_attacker(const AttackerState& state, const NetworkGraph& graph) {
    state.validate_against(graph);
}

} // namespace ptpsec
