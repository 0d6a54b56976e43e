#include "ptpsec/messages.hpp"

#include "ptpsec/errors.hpp"

namespace ptpsec {

std::string_view to_string(MessageKind kind) noexcept {
    switch (kind) {
    case MessageKind::sync: return "Sync";
    case MessageKind::follow_up: return "Follow_Up";
    case MessageKind::delay_req: return "Delay_Req";
    case MessageKind::delay_resp: return "Delay_Resp";
    case MessageKind::meas: return "Meas";
    case MessageKind::meas_fup: return "Meas_Fup";
    }
    return "?";
}

MessageKind message_kind_from_string(std::string_view name) {
    if (name == "Sync") return MessageKind::sync;
    if (name == "Follow_Up") return MessageKind::follow_up;
    if (name == "Delay_Req") return MessageKind::delay_req;
    if (name == "Delay_Resp") return MessageKind::delay_resp;
    if (name == "Meas") return MessageKind::meas;
    if (name == "Meas_Fup") return MessageKind::meas_fup;
    throw SimError(Errc::parse_error, "unknown message kind '" + std::string(name) + "'");
}

} // namespace ptpsec
