// Scenario ingestion, experiment orchestration (single- and multi-slave
// runs), and result emission: per-round CSV series plus a summary JSON.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ptpsec/adversary.hpp"
#include "ptpsec/detection.hpp"
#include "ptpsec/engine.hpp"
#include "ptpsec/protocol.hpp"
#include "ptpsec/topology.hpp"

namespace ptpsec {

struct ClockSpec {
    DurationNs offset{0};      // offset at the simulation epoch
    std::int64_t drift_ppb{0}; // parts per billion (ppm in the file)
};

struct RunConfig {
    DurationNs duration{0};
    std::uint64_t seed{0};
    JitterModel jitter{};
    DurationNs threshold{microseconds(1)};
    std::optional<int> attacker_bound; // default: floor(n/2) per slave
    bool assert_detection{false};
};

struct OutputSpec {
    std::string csv;     // empty: derived from the scenario file stem
    std::string summary; // empty: derived from the scenario file stem
};

struct Scenario {
    std::string origin; // file path or "<string>"
    TopologySpec topology;
    std::map<std::string, ClockSpec> clocks;
    SyncMode mode{SyncMode::ptpsec};
    DurationNs sync_interval{seconds(1)};
    DurationNs residence{microseconds(10)};
    PathPolicy policy{PathPolicy::all_paths};
    std::vector<AttackSpec> attacks;
    RunConfig run;
    OutputSpec outputs;

    std::string name() const; // file stem, or "scenario" for strings
};

Scenario parse_scenario_json(const std::string& text, const std::string& origin = "<string>");
Scenario parse_scenario(const std::filesystem::path& file);

// Canonical re-emission: parse(scenario_to_json(s)) round-trips to the
// same canonical bytes.
std::string scenario_to_json(const Scenario& s);

// Cross-checks every reference: graph validity, attacker placement,
// clock nodes, attack windows inside the run, redundant-path and bound
// requirements per slave. parse_scenario runs this before returning.
void validate_scenario(const Scenario& s);

struct RoundRow {
    std::uint64_t round{0};
    TimeNs initiated_at{0};
    DurationNs theta_rep{0};
    // Ground-truth master-minus-slave offset sampled right after the
    // round's servo correction: positive means the slave lags.
    DurationNs theta_act{0};
    DurationNs theta_rect{0};
    std::vector<std::optional<DurationNs>> alphas; // per redundant path 1..n
    bool attacked{false};
};

struct DetectionSummary {
    bool detected{false};
    std::optional<std::uint64_t> first_attacked_round;
    std::optional<int> start_latency_rounds;
    std::optional<int> end_latency_rounds;
};

struct SlaveRunResult {
    std::string slave;
    DisjointPathSet paths;
    int redundant_paths{0};
    std::vector<RoundRow> rows;
    std::uint64_t rounds_completed{0};
    std::uint64_t rounds_dropped{0};
    std::uint64_t late_messages{0};
    std::uint64_t packets_total{0};
    std::optional<int> packets_per_cycle; // when identical across completed rounds
    DurationNs final_theta_act{0};
    DurationNs max_abs_theta_act{0};
    DetectionSummary detection;
};

struct RunOutput {
    SyncMode mode{SyncMode::ptpsec};
    std::uint64_t seed{0};
    std::uint64_t rounds_initiated{0};
    std::vector<SlaveRunResult> slaves; // scenario order

    const SlaveRunResult& slave(const std::string& name) const;
};

// Deterministic for a fixed scenario + seed. Computes the disjoint path
// set per slave before protocol start; throws NoRedundantPath when the
// secured mode has fewer than two master-slave paths for some slave.
RunOutput run_scenario(const Scenario& s);

// Fixed-header CSV; durations as decimal microseconds with three
// fractional digits, unmeasured paths as empty cells.
std::string render_csv(const SlaveRunResult& result);
std::string render_summary_json(const Scenario& s, const RunOutput& out);

// Writes one CSV per slave (multi-slave runs insert the slave name
// before the extension) plus the summary JSON. Byte-stable for a fixed
// seed.
void emit_outputs(const RunOutput& out, const Scenario& s, const std::filesystem::path& out_dir);

// Compact path notation used in summaries and the CLI: per step,
// edge id plus '+' (declared orientation) or '-' (against it).
std::string path_notation(const Path& path);

std::string format_us(DurationNs ns);
std::string format_seconds(TimeNs ns);

std::string_view to_string(SyncMode mode) noexcept;
SyncMode sync_mode_from_string(std::string_view name);
std::string_view to_string(PathPolicy policy) noexcept;
PathPolicy path_policy_from_string(std::string_view name);

} // namespace ptpsec
