// Attack verdicts from per-round asymmetry estimates, consensus
// asymmetry with attacked-path localization, and detection-latency
// metrics.
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <vector>

#include "ptpsec/time_units.hpp"

namespace ptpsec::detection {

// The n per-round estimates alpha^(1)..alpha^(n), one per redundant
// path, plus the decision threshold.
struct EstimateSet {
    std::uint64_t seq{0};
    std::vector<DurationNs> estimates; // index 0 holds alpha^(1)
    DurationNs threshold{0};
};

struct Verdict {
    bool attacked{false};
    std::set<int> triggering; // 1-based redundant-path indices
};

// One consistent explanation of an estimate set: the consensus value of
// alpha_P0 and the resulting per-path attack assignment (path 0 is the
// synchronization path).
struct Hypothesis {
    DurationNs consensus_alpha{0};
    std::vector<DurationNs> implied_path_alphas; // implied alpha_Pi, i = 1..n
    std::set<int> attacked_paths;                // 0 = sync path
};

struct Localization {
    DurationNs consensus_alpha{0};
    std::vector<DurationNs> implied_path_alphas;
    std::set<int> attacked_paths;
    bool ambiguous{false};
    std::optional<Hypothesis> alternative; // second hypothesis on ties
};

// Attacked iff any |alpha^(i)| > threshold; collects the indices that
// fire.
Verdict detect(const EstimateSet& set);

// Clusters the estimates (single-linkage, gap = threshold); the largest
// cluster is taken as the genuine group and its mean as the consensus
// alpha_P0. Each path's implied asymmetry is consensus - alpha^(i).
// `attacker_bound` limits how many redundant paths may be attacked and
// must not exceed floor(n/2). When two maximal clusters tie, the result
// is ambiguous: the hypothesis with larger |consensus| is reported
// first (the synchronization path is presumed attacked when the data
// cannot decide) and the other is attached as `alternative`.
Localization consensus_asymmetry(const EstimateSet& set, int attacker_bound);

// One row of the verdict series a run produces.
struct RoundVerdict {
    std::uint64_t round{0};
    TimeNs initiated_at{0};
    bool attacked{false};
};

// Rounds from the first round initiated at or after attack_start up to
// and including the first attacked verdict (so a same-round detection
// counts as 1). Throws NeverDetected when no verdict fires.
int detection_latency(const std::vector<RoundVerdict>& series, TimeNs attack_start);

// Symmetric metric at attack end: rounds from the first round initiated
// strictly after attack_end (windows are end-inclusive) up to and
// including the first all-clear verdict. Throws NeverDetected when the
// series never clears.
int clear_latency(const std::vector<RoundVerdict>& series, TimeNs attack_end);

} // namespace ptpsec::detection
