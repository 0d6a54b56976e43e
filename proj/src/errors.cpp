#include "ptpsec/errors.hpp"

namespace ptpsec {

const char* errc_name(Errc code) noexcept {
    switch (code) {
    case Errc::duplicate_node: return "DuplicateNode";
    case Errc::duplicate_edge: return "DuplicateEdge";
    case Errc::unknown_endpoint: return "UnknownEndpoint";
    case Errc::unknown_node: return "UnknownNode";
    case Errc::unknown_edge: return "UnknownEdge";
    case Errc::disconnected: return "Disconnected";
    case Errc::no_master_slave_path: return "NoMasterSlavePath";
    case Errc::no_redundant_path: return "NoRedundantPath";
    case Errc::invalid_route: return "InvalidRoute";
    case Errc::conflicting_specs: return "ConflictingSpecs";
    case Errc::scheduling_in_past: return "SchedulingInPast";
    case Errc::incomplete_round: return "IncompleteRound";
    case Errc::unknown_seq: return "UnknownSeq";
    case Errc::duplicate_message: return "DuplicateMessage";
    case Errc::stale_round: return "StaleRound";
    case Errc::empty_estimates: return "EmptyEstimates";
    case Errc::bound_violation: return "BoundViolation";
    case Errc::never_detected: return "NeverDetected";
    case Errc::parse_error: return "ParseError";
    case Errc::validation_error: return "ValidationError";
    case Errc::io_error: return "IoError";
    }
    return "UnknownError";
}

} // namespace ptpsec
