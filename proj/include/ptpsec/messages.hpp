// Protocol message vocabulary shared by the adversary, the transit
// engine, and the protocol state machines.
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "ptpsec/time_units.hpp"

namespace ptpsec {

enum class MessageKind {
    sync,
    follow_up,
    delay_req,
    delay_resp,
    meas,
    meas_fup,
};

// Event messages are hardware-timestamped at egress and ingress; the
// rest are general messages that only carry payloads.
constexpr bool is_event_message(MessageKind kind) {
    return kind == MessageKind::sync || kind == MessageKind::delay_req ||
           kind == MessageKind::meas;
}

std::string_view to_string(MessageKind kind) noexcept;
MessageKind message_kind_from_string(std::string_view name);

struct Message {
    MessageKind kind{MessageKind::sync};
    std::uint64_t seq{0};
    // Which path the message travels: 0 is the synchronization path P_0,
    // i >= 1 a redundant path P_i.
    int path_index{0};

    // Conveyed timestamp for general messages: Follow_Up carries t1,
    // Meas_Fup carries t_m1 (slave->master) or t_m3 (master->slave),
    // Delay_Resp carries t4. Event messages carry none (two-step mode).
    std::optional<TimeNs> origin_timestamp;

    // Master->slave Meas_Fup additionally echoes the master's Meas
    // ingress timestamp t_m2 for the same path, so the slave can close
    // the forward RTT equation.
    std::optional<TimeNs> meas_ingress_echo;
};

} // namespace ptpsec
