#include "ptpsec/detection.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

#include "ptpsec/errors.hpp"

namespace ptpsec::detection {

Verdict detect(const EstimateSet& set) {
    if (set.estimates.empty())
        throw SimError(Errc::empty_estimates, "detect() needs at least one estimate");
    Verdict v;
    for (std::size_t i = 0; i < set.estimates.size(); ++i) {
        if (std::llabs(set.estimates[i]) > set.threshold)
            v.triggering.insert(static_cast<int>(i) + 1);
    }
    v.attacked = !v.triggering.empty();
    return v;
}

namespace {

struct Cluster {
    std::vector<std::size_t> members; // 0-based estimate indices
    DurationNs mean{0};
};

Hypothesis hypothesis_from(const Cluster& cluster, const EstimateSet& set) {
    Hypothesis h;
    h.consensus_alpha = cluster.mean;
    h.implied_path_alphas.resize(set.estimates.size());
    for (std::size_t i = 0; i < set.estimates.size(); ++i) {
        DurationNs implied = h.consensus_alpha - set.estimates[i];
        h.implied_path_alphas[i] = implied;
        if (std::llabs(implied) > set.threshold)
            h.attacked_paths.insert(static_cast<int>(i) + 1);
    }
    if (std::llabs(h.consensus_alpha) > set.threshold)
        h.attacked_paths.insert(0);
    return h;
}

int attacked_redundant_count(const Hypothesis& h) {
    return static_cast<int>(h.attacked_paths.size()) -
           (h.attacked_paths.count(0) != 0 ? 1 : 0);
}

} // namespace

Localization consensus_asymmetry(const EstimateSet& set, int attacker_bound) {
    const std::size_t n = set.estimates.size();
    if (n == 0)
        throw SimError(Errc::empty_estimates, "consensus over an empty estimate set");
    if (attacker_bound < 0 || attacker_bound > static_cast<int>(n / 2))
        throw SimError(Errc::bound_violation, "attacker bound " + std::to_string(attacker_bound) +
                                                  " exceeds floor(n/2) with n = " +
                                                  std::to_string(n));

    // Single-linkage clustering in one dimension: sort, then split where
    // neighbouring estimates are more than `threshold` apart.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (set.estimates[a] != set.estimates[b])
            return set.estimates[a] < set.estimates[b];
        return a < b;
    });

    std::vector<Cluster> clusters;
    for (std::size_t k = 0; k < n; ++k) {
        bool fresh = clusters.empty() ||
                     set.estimates[order[k]] - set.estimates[clusters.back().members.back()] >
                         set.threshold;
        if (fresh)
            clusters.emplace_back();
        clusters.back().members.push_back(order[k]);
    }
    for (auto& c : clusters) {
        __int128 sum = 0;
        for (std::size_t idx : c.members)
            sum += set.estimates[idx];
        c.mean = static_cast<DurationNs>(sum / static_cast<__int128>(c.members.size()));
    }

    std::size_t largest = 0;
    for (const auto& c : clusters)
        largest = std::max(largest, c.members.size());

    std::vector<const Cluster*> candidates;
    for (const auto& c : clusters)
        if (c.members.size() == largest)
            candidates.push_back(&c);

    // Ties: the hypothesis treating the synchronization path as attacked
    // (larger |consensus|) is reported first.
    std::sort(candidates.begin(), candidates.end(), [](const Cluster* a, const Cluster* b) {
        if (std::llabs(a->mean) != std::llabs(b->mean))
            return std::llabs(a->mean) > std::llabs(b->mean);
        return a->mean > b->mean;
    });

    Hypothesis primary = hypothesis_from(*candidates.front(), set);

    Localization loc;
    loc.consensus_alpha = primary.consensus_alpha;
    loc.implied_path_alphas = primary.implied_path_alphas;
    loc.attacked_paths = primary.attacked_paths;
    loc.ambiguous = candidates.size() > 1;
    if (candidates.size() > 1)
        loc.alternative = hypothesis_from(*candidates[1], set);

    // A majority cluster is required for a trustworthy call; likewise the
    // implied attack assignment must respect the assumed attacker bound.
    if (largest < (n + 1) / 2 || attacked_redundant_count(primary) > attacker_bound)
        loc.ambiguous = true;

    return loc;
}

namespace {

std::size_t first_round_at_or_after(const std::vector<RoundVerdict>& series, TimeNs t,
                                    bool strictly_after) {
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (strictly_after ? series[i].initiated_at > t : series[i].initiated_at >= t)
            return i;
    }
    throw SimError(Errc::never_detected, "verdict series ends before the attack boundary");
}

} // namespace

int detection_latency(const std::vector<RoundVerdict>& series, TimeNs attack_start) {
    std::size_t base = first_round_at_or_after(series, attack_start, false);
    for (std::size_t i = base; i < series.size(); ++i) {
        if (series[i].attacked)
            return static_cast<int>(i - base) + 1;
    }
    throw SimError(Errc::never_detected, "no attacked verdict after attack start");
}

int clear_latency(const std::vector<RoundVerdict>& series, TimeNs attack_end) {
    std::size_t base = first_round_at_or_after(series, attack_end, true);
    for (std::size_t i = base; i < series.size(); ++i) {
        if (!series[i].attacked)
            return static_cast<int>(i - base) + 1;
    }
    throw SimError(Errc::never_detected, "series never returns to all-clear");
}

} // namespace ptpsec::detection
