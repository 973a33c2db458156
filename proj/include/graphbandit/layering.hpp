// Online layering construction attached to any policy run: each selection is
// placed in the lowest layer in which the selected arm has not yet been
// observed, and the selection marks that layer observed for the arm and all
// its neighbors. Purely observational; never feeds back into decisions.
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graphbandit/graph.hpp"

namespace graphbandit {

struct Placement {
    int arm;
    std::int64_t time;
    int layer;  // 1-based
};

class LayeringTracker {
public:
    explicit LayeringTracker(int k)
        : k_(k),
          observed_(static_cast<std::size_t>(k)),
          first_unobserved_(static_cast<std::size_t>(k), 0),
          lambda_(static_cast<std::size_t>(k), 0) {}

    // Places the selection and returns its layer. Re-entry below previously
    // observed layers is legal: the rule is "lowest unobserved", not
    // "highest so far".
    int record_selection(const FeedbackGraph& g, int arm, std::int64_t t) {
        if (g.k != k_) throw std::invalid_argument("layering: graph size mismatch");
        if (arm < 0 || arm >= k_)
            throw std::invalid_argument("layering: arm " + std::to_string(arm) + " out of range");
        if (t <= last_time_)
            throw std::invalid_argument("layering: selection times must strictly increase");
        last_time_ = t;

        auto& bits = observed_[static_cast<std::size_t>(arm)];
        std::size_t& cursor = first_unobserved_[static_cast<std::size_t>(arm)];
        while (cursor < bits.size() && bits[cursor]) ++cursor;
        const int layer = static_cast<int>(cursor) + 1;

        placements_.push_back({arm, t, layer});
        if (layer > lambda_[static_cast<std::size_t>(arm)])
            lambda_[static_cast<std::size_t>(arm)] = layer;

        mark_observed(arm, layer);
        for (int b : g.neighbors(arm)) mark_observed(b, layer);
        return layer;
    }

    const std::vector<Placement>& placements() const { return placements_; }
    const std::vector<int>& lambda() const { return lambda_; }
    int arm_count() const { return k_; }

    // occupancy (selections placed in a layer) -> number of layers with it
    std::map<int, std::int64_t> occupancy_histogram() const {
        std::map<int, std::int64_t> per_layer;
        for (const auto& p : placements_) ++per_layer[p.layer];
        std::map<int, std::int64_t> hist;
        for (const auto& [layer, count] : per_layer) ++hist[static_cast<int>(count)];
        return hist;
    }

private:
    void mark_observed(int arm, int layer) {
        auto& bits = observed_[static_cast<std::size_t>(arm)];
        if (bits.size() < static_cast<std::size_t>(layer)) bits.resize(static_cast<std::size_t>(layer), false);
        bits[static_cast<std::size_t>(layer) - 1] = true;
    }

    int k_;
    std::int64_t last_time_ = 0;
    std::vector<std::vector<bool>> observed_;
    std::vector<std::size_t> first_unobserved_;
    std::vector<int> lambda_;
    std::vector<Placement> placements_;
};

// Every pair of arms placed-by-selection in the same layer must be
// independent; returns the offending pairs (contractually none).
inline std::vector<std::pair<int, int>> verify_layer_independence(
    std::span<const Placement> placements, const FeedbackGraph& g) {
    std::map<int, std::vector<int>> arms_by_layer;
    for (const auto& p : placements) arms_by_layer[p.layer].push_back(p.arm);
    std::vector<std::pair<int, int>> violations;
    for (const auto& [layer, arms] : arms_by_layer) {
        for (std::size_t i = 0; i < arms.size(); ++i)
            for (std::size_t j = i + 1; j < arms.size(); ++j)
                if (g.adjacent(arms[i], arms[j]))
                    violations.emplace_back(arms[i], arms[j]);
    }
    return violations;
}

inline std::vector<std::pair<int, int>> verify_layer_independence(const LayeringTracker& tracker,
                                                                  const FeedbackGraph& g) {
    return verify_layer_independence(std::span<const Placement>(tracker.placements()), g);
}

// Per-arm observation times, recorded by the harness alongside the run.
using ObservationLog = std::vector<std::vector<std::int64_t>>;

struct PlacementViolation {
    int arm;
    std::int64_t time;
    int layer;
    std::int64_t observed_before;
};

// An arm placed in layer L must have been observed at least L-1 times
// strictly before the placement; returns the violations (contractually none).
inline std::vector<PlacementViolation> verify_placement_counts(
    std::span<const Placement> placements, const ObservationLog& log) {
    std::vector<PlacementViolation> violations;
    for (const auto& p : placements) {
        if (p.arm < 0 || static_cast<std::size_t>(p.arm) >= log.size())
            throw std::invalid_argument("layering: observation log misses arm " +
                                        std::to_string(p.arm));
        const auto& times = log[static_cast<std::size_t>(p.arm)];
        const auto before = static_cast<std::int64_t>(
            std::lower_bound(times.begin(), times.end(), p.time) - times.begin());
        if (before < p.layer - 1) violations.push_back({p.arm, p.time, p.layer, before});
    }
    return violations;
}

inline std::vector<PlacementViolation> verify_placement_counts(const LayeringTracker& tracker,
                                                               const ObservationLog& log) {
    return verify_placement_counts(std::span<const Placement>(tracker.placements()), log);
}

// 4 * log2(T) * L * maxIS(sum 1/gap) + 1; the layered-regret bound with the
// per-arm layer budget L/gap^2.
inline double lemma2_bound(double L, std::span<const double> gaps, const FeedbackGraph& g,
                           std::int64_t T) {
    if (!(L > 0.0)) throw std::invalid_argument("layering: L must be positive");
    if (T < 1) throw std::invalid_argument("layering: T must be >= 1");
    const double w = max_gap_weighted_independent_sum(g, gaps);
    return 4.0 * std::log2(static_cast<double>(T)) * L * w + 1.0;
}

}  // namespace graphbandit
