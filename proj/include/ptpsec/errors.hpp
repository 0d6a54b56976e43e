#pragma once

#include <stdexcept>
#include <string>

namespace ptpsec {

// Stable error codes for every failure the library reports. Tests and
// the CLI match on the code, not on message text.
enum class Errc {
    duplicate_node,
    duplicate_edge,
    unknown_endpoint,
    unknown_node,
    unknown_edge,
    disconnected,
    no_master_slave_path,
    no_redundant_path,
    invalid_route,
    conflicting_specs,
    scheduling_in_past,
    incomplete_round,
    unknown_seq,
    duplicate_message,
    stale_round,
    empty_estimates,
    bound_violation,
    never_detected,
    parse_error,
    validation_error,
    io_error,
};

const char* errc_name(Errc code) noexcept;

class SimError : public std::runtime_error {
public:
    SimError(Errc code, const std::string& message)
        : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace ptpsec
