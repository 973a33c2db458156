// The four learners behind one select/update contract: AAE over independent
// sets, its min-observations variant, UCB-N, and TS-N. Tie-breaking is
// lowest index everywhere so runs replay exactly.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "graphbandit/graph.hpp"
#include "graphbandit/numerics.hpp"
#include "graphbandit/rng.hpp"

namespace graphbandit {

// Per-arm running counts. successes/failures are only driven by the TS-N
// binarized updates; they stay zero for the other policies.
struct ArmStats {
    std::vector<std::int64_t> observations;
    std::vector<double> reward_sum;
    std::vector<std::int64_t> successes;
    std::vector<std::int64_t> failures;

    explicit ArmStats(int k)
        : observations(static_cast<std::size_t>(k), 0),
          reward_sum(static_cast<std::size_t>(k), 0.0),
          successes(static_cast<std::size_t>(k), 0),
          failures(static_cast<std::size_t>(k), 0) {}

    int arm_count() const { return static_cast<int>(observations.size()); }

    // Only meaningful when observations[a] > 0; callers gate on the radius
    // being finite first.
    double empirical_mean(int a) const {
        return reward_sum[static_cast<std::size_t>(a)] /
               static_cast<double>(observations[static_cast<std::size_t>(a)]);
    }
};

// Half-width sqrt(ln(2*horizon*k/delta) / (2N)); +inf for unobserved arms.
// Anytime policies pass the current time t as the horizon.
inline double confidence_radius(std::int64_t n_observations, int k, std::int64_t horizon,
                                double delta) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("policy: delta must lie in (0,1)");
    if (horizon < 1) throw std::invalid_argument("policy: horizon must be >= 1");
    if (n_observations == 0) return std::numeric_limits<double>::infinity();
    const double log_term =
        std::log(2.0 * static_cast<double>(horizon) * static_cast<double>(k) / delta);
    return std::sqrt(log_term / (2.0 * static_cast<double>(n_observations)));
}

// Drop every arm whose upper confidence bound falls below the best lower
// bound among the active arms. Unobserved arms neither eliminate nor get
// eliminated (infinite radius on both sides).
inline std::vector<int> eliminate(const std::vector<int>& active, const ArmStats& stats,
                                  int k, std::int64_t horizon, double delta) {
    if (active.empty()) throw std::invalid_argument("policy: active set must be nonempty");
    double best_lower = -std::numeric_limits<double>::infinity();
    for (int a : active) {
        const std::int64_t n = stats.observations[static_cast<std::size_t>(a)];
        if (n == 0) continue;
        best_lower =
            std::max(best_lower, stats.empirical_mean(a) - confidence_radius(n, k, horizon, delta));
    }
    std::vector<int> survivors;
    survivors.reserve(active.size());
    for (int a : active) {
        const std::int64_t n = stats.observations[static_cast<std::size_t>(a)];
        if (n == 0) {
            survivors.push_back(a);
            continue;
        }
        const double upper = stats.empirical_mean(a) + confidence_radius(n, k, horizon, delta);
        if (!(upper < best_lower)) survivors.push_back(a);
    }
    return survivors;
}

struct Observation {
    int arm;
    double reward;
};

enum class PolicyKind { aae_is, aae_minobs, ucb_n, ts_n };

inline std::string_view policy_kind_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::aae_is: return "aae_is";
        case PolicyKind::aae_minobs: return "aae_minobs";
        case PolicyKind::ucb_n: return "ucb_n";
        case PolicyKind::ts_n: return "ts_n";
    }
    return "?";
}

class Policy {
public:
    Policy(const FeedbackGraph& graph, std::int64_t horizon, double delta, bool anytime)
        : graph_(graph), stats_(graph.k), horizon_(horizon), delta_(delta), anytime_(anytime) {
        if (horizon_ < 1) throw std::invalid_argument("policy: horizon must be >= 1");
        if (!(delta_ > 0.0 && delta_ < 1.0))
            throw std::invalid_argument("policy: delta must lie in (0,1)");
        expected_observed_.resize(static_cast<std::size_t>(graph_.k));
        for (int a = 0; a < graph_.k; ++a) {
            auto& e = expected_observed_[static_cast<std::size_t>(a)];
            e = graph_.neighbors(a);
            e.insert(std::lower_bound(e.begin(), e.end(), a), a);
        }
    }
    virtual ~Policy() = default;

    virtual PolicyKind kind() const = 0;
    virtual int select(std::int64_t t, Rng& rng) = 0;

    // observed must cover exactly {selected} union N(selected).
    void update(std::int64_t t, int selected, std::span<const Observation> observed, Rng& rng) {
        check_observed(selected, observed);
        for (const auto& o : observed)
            if (!(o.reward >= 0.0 && o.reward <= 1.0))
                throw std::invalid_argument("policy: reward outside [0,1]");
        for (const auto& o : observed) {
            stats_.observations[static_cast<std::size_t>(o.arm)] += 1;
            stats_.reward_sum[static_cast<std::size_t>(o.arm)] += o.reward;
        }
        post_update(t, selected, observed, rng);
    }

    const ArmStats& stats() const { return stats_; }
    const FeedbackGraph& graph() const { return graph_; }
    std::int64_t horizon() const { return horizon_; }
    double delta() const { return delta_; }
    bool anytime() const { return anytime_; }

    // Non-eliminating policies keep every arm active.
    virtual std::vector<int> active_arms() const {
        std::vector<int> all(static_cast<std::size_t>(graph_.k));
        for (int a = 0; a < graph_.k; ++a) all[static_cast<std::size_t>(a)] = a;
        return all;
    }

protected:
    virtual void post_update(std::int64_t t, int selected,
                             std::span<const Observation> observed, Rng& rng) = 0;

    // Horizon parameter fed to the confidence radius at time t.
    std::int64_t radius_horizon(std::int64_t t) const { return anytime_ ? t : horizon_; }

    FeedbackGraph graph_;
    ArmStats stats_;
    std::int64_t horizon_;
    double delta_;
    bool anytime_;

private:
    void check_observed(int selected, std::span<const Observation> observed) const {
        if (selected < 0 || selected >= graph_.k)
            throw std::invalid_argument("policy: selected arm out of range");
        const auto& expected = expected_observed_[static_cast<std::size_t>(selected)];
        bool ok = observed.size() == expected.size();
        if (ok) {
            for (std::size_t i = 0; i < expected.size(); ++i)
                if (observed[i].arm != expected[i]) {
                    ok = false;
                    break;
                }
            if (!ok) {  // set coverage is the contract, not ordering
                std::vector<int> arms(observed.size());
                for (std::size_t i = 0; i < observed.size(); ++i) arms[i] = observed[i].arm;
                std::sort(arms.begin(), arms.end());
                ok = std::equal(arms.begin(), arms.end(), expected.begin());
            }
        }
        if (!ok)
            throw std::invalid_argument(
                "policy: observed set does not match {selected} union N(selected) for arm " +
                std::to_string(selected));
    }

    std::vector<std::vector<int>> expected_observed_;
};

// Active Arm Elimination over greedy maximal independent sets: each round
// plays one maximal independent set of the active subgraph, then runs the
// elimination rule. If the horizon ends mid-round the round is truncated.
class AaeIsPolicy final : public Policy {
public:
    AaeIsPolicy(const FeedbackGraph& graph, std::int64_t horizon, double delta, bool anytime)
        : Policy(graph, horizon, delta, anytime) {
        active_.resize(static_cast<std::size_t>(graph.k));
        for (int a = 0; a < graph.k; ++a) active_[static_cast<std::size_t>(a)] = a;
    }

    PolicyKind kind() const override { return PolicyKind::aae_is; }

    int select(std::int64_t, Rng&) override {
        if (queue_.empty()) {
            auto set = greedy_maximal_independent_set(graph_, active_);
            queue_.assign(set.begin(), set.end());
            ++round_;
        }
        const int arm = queue_.front();
        queue_.pop_front();
        return arm;
    }

    std::vector<int> active_arms() const override { return active_; }
    std::int64_t round() const { return round_; }

protected:
    void post_update(std::int64_t t, int, std::span<const Observation>, Rng&) override {
        if (queue_.empty())  // round boundary
            active_ = eliminate(active_, stats_, graph_.k, radius_horizon(t), delta_);
    }

private:
    std::vector<int> active_;
    std::deque<int> queue_;
    std::int64_t round_ = 0;
};

// The round-robin-free variant: always select the active arm observed the
// fewest times, eliminating after every step.
class AaeMinObsPolicy final : public Policy {
public:
    AaeMinObsPolicy(const FeedbackGraph& graph, std::int64_t horizon, double delta, bool anytime)
        : Policy(graph, horizon, delta, anytime) {
        active_.resize(static_cast<std::size_t>(graph.k));
        for (int a = 0; a < graph.k; ++a) active_[static_cast<std::size_t>(a)] = a;
    }

    PolicyKind kind() const override { return PolicyKind::aae_minobs; }

    int select(std::int64_t, Rng&) override {
        int best = active_.front();
        for (int a : active_)
            if (stats_.observations[static_cast<std::size_t>(a)] <
                stats_.observations[static_cast<std::size_t>(best)])
                best = a;
        return best;
    }

    std::vector<int> active_arms() const override { return active_; }

protected:
    void post_update(std::int64_t t, int, std::span<const Observation>, Rng&) override {
        active_ = eliminate(active_, stats_, graph_.k, radius_horizon(t), delta_);
    }

private:
    std::vector<int> active_;
};

// UCB-N: highest upper confidence index, neighbors update for free.
class UcbNPolicy final : public Policy {
public:
    using Policy::Policy;

    PolicyKind kind() const override { return PolicyKind::ucb_n; }

    int select(std::int64_t t, Rng&) override {
        int best = 0;
        double best_index = upper_index(0, t);
        for (int a = 1; a < graph_.k; ++a) {
            const double idx = upper_index(a, t);
            if (idx > best_index) {
                best_index = idx;
                best = a;
            }
        }
        return best;
    }

    double upper_index(int a, std::int64_t t) const {
        const std::int64_t n = stats_.observations[static_cast<std::size_t>(a)];
        if (n == 0) return std::numeric_limits<double>::infinity();
        return stats_.empirical_mean(a) +
               confidence_radius(n, graph_.k, radius_horizon(t), delta_);
    }

protected:
    void post_update(std::int64_t, int, std::span<const Observation>, Rng&) override {}
};

// TS-N: Beta(S+1, F+1) posterior samples, binarized updates for the selected
// arm and its neighbors. Binarization draws from the policy stream so the
// environment trace stays shared across policies.
class TsNPolicy final : public Policy {
public:
    using Policy::Policy;

    PolicyKind kind() const override { return PolicyKind::ts_n; }

    int select(std::int64_t, Rng& rng) override {
        int best = 0;
        double best_sample = -1.0;
        for (int a = 0; a < graph_.k; ++a) {
            const double theta = beta_sample(
                {static_cast<double>(stats_.successes[static_cast<std::size_t>(a)] + 1),
                 static_cast<double>(stats_.failures[static_cast<std::size_t>(a)] + 1)},
                rng);
            if (theta > best_sample) {
                best_sample = theta;
                best = a;
            }
        }
        return best;
    }

protected:
    void post_update(std::int64_t, int, std::span<const Observation> observed,
                     Rng& rng) override {
        for (const auto& o : observed) {
            if (rng.uniform() < o.reward)
                stats_.successes[static_cast<std::size_t>(o.arm)] += 1;
            else
                stats_.failures[static_cast<std::size_t>(o.arm)] += 1;
        }
    }
};

// Spec strings: aae_is, aae_minobs, ucb_n, ucb_n_anytime, ts_n.
struct PolicySpec {
    PolicyKind kind = PolicyKind::ucb_n;
    double delta = 0.0;  // 0 means "default to 1/T at construction"
    bool anytime = false;

    std::string label() const {
        std::string s{policy_kind_name(kind)};
        if (anytime) s += "_anytime";
        return s;
    }
};

inline PolicySpec parse_policy_spec(std::string_view name) {
    PolicySpec spec;
    std::string_view base = name;
    if (base.size() > 8 && base.substr(base.size() - 8) == "_anytime") {
        spec.anytime = true;
        base = base.substr(0, base.size() - 8);
    }
    if (base == "aae_is") spec.kind = PolicyKind::aae_is;
    else if (base == "aae_minobs") spec.kind = PolicyKind::aae_minobs;
    else if (base == "ucb_n") spec.kind = PolicyKind::ucb_n;
    else if (base == "ts_n") spec.kind = PolicyKind::ts_n;
    else
        throw std::invalid_argument("policy: unknown spec string '" + std::string(name) + "'");
    if (spec.kind == PolicyKind::ts_n && spec.anytime)
        throw std::invalid_argument("policy: ts_n has no anytime variant (no horizon term)");
    return spec;
}

inline std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const FeedbackGraph& graph,
                                           std::int64_t horizon) {
    const double delta = spec.delta > 0.0 ? spec.delta : 1.0 / static_cast<double>(horizon);
    switch (spec.kind) {
        case PolicyKind::aae_is:
            return std::make_unique<AaeIsPolicy>(graph, horizon, delta, spec.anytime);
        case PolicyKind::aae_minobs:
            return std::make_unique<AaeMinObsPolicy>(graph, horizon, delta, spec.anytime);
        case PolicyKind::ucb_n:
            return std::make_unique<UcbNPolicy>(graph, horizon, delta, spec.anytime);
        case PolicyKind::ts_n:
            return std::make_unique<TsNPolicy>(graph, horizon, delta, spec.anytime);
    }
    throw std::logic_error("policy: unreachable kind");
}

}  // namespace graphbandit
