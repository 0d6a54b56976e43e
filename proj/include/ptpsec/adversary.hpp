// Man-in-the-middle delay injection: per-edge, per-direction,
// per-message-kind delays with static and incremental profiles. The
// attacker is a transit hook on links, never a node, and never touches
// message contents.
#pragma once

#include <set>
#include <string>
#include <vector>

#include "ptpsec/messages.hpp"
#include "ptpsec/time_units.hpp"
#include "ptpsec/topology.hpp"

namespace ptpsec {

// Direction over an edge in its declared orientation: forward is
// node_a -> node_b.
enum class LinkDirection { forward, reverse };

std::string_view to_string(LinkDirection dir) noexcept;
LinkDirection link_direction_from_string(std::string_view name);

struct AttackProfile {
    enum class Kind { static_delay, incremental };

    Kind kind{Kind::static_delay};
    DurationNs epsilon{0};          // level; final level for incremental
    DurationNs delta_per_second{0}; // ramp rate, ns per second (incremental only)
    TimeNs start{0};
    TimeNs end{0};

    // Added delay at time `at`; 0 outside [start, end]. The incremental
    // ramp is evaluated continuously at transit time and saturates at
    // epsilon.
    DurationNs value_at(TimeNs at) const;
};

struct AttackSpec {
    std::string edge_id;
    LinkDirection direction{LinkDirection::forward};
    std::set<MessageKind> message_filter; // must be non-empty
    AttackProfile profile;

    bool matches_kind(MessageKind kind) const { return message_filter.count(kind) != 0; }
};

class AttackerState {
public:
    AttackerState() = default;

    // Validates profile shape (window ordering, ramp completion) and
    // rejects two specs colliding on the same (edge, direction, kind)
    // with overlapping windows.
    explicit AttackerState(std::vector<AttackSpec> specs);

    // Total adversarial delay for one packet crossing `edge_id` in
    // `direction` at time `at`; matching specs sum.
    DurationNs added_delay(const std::string& edge_id, LinkDirection direction, MessageKind kind,
                           TimeNs at) const;

    // Confirms every targeted edge exists in the graph.
    void validate_against(const NetworkGraph& graph) const;

    const std::vector<AttackSpec>& specs() const { return specs_; }
    bool empty() const { return specs_.empty(); }

    // Earliest start / latest end over all specs; meaningful only when
    // !empty().
    TimeNs earliest_start() const;
    TimeNs latest_end() const;

private:
    std::vector<AttackSpec> specs_;
};

// Spec-facing alias: construction validation + graph cross-check.
void validate_attacker(const AttackerState& state, const NetworkGraph& graph);

} // namespace ptpsec
