// Stochastic reward source: i.i.d. reward vectors over time, supported on
// [0,1], possibly correlated across arms within a step.
#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "graphbandit/numerics.hpp"
#include "graphbandit/rng.hpp"

namespace graphbandit {

enum class Coupling { bernoulli_independent, bernoulli_comonotone, beta_independent };

inline Coupling parse_coupling(std::string_view s) {
    if (s == "bernoulli_independent") return Coupling::bernoulli_independent;
    if (s == "bernoulli_comonotone") return Coupling::bernoulli_comonotone;
    if (s == "beta_independent") return Coupling::beta_independent;
    throw std::invalid_argument("model: unknown coupling '" + std::string(s) + "'");
}

inline std::string_view coupling_name(Coupling c) {
    switch (c) {
        case Coupling::bernoulli_independent: return "bernoulli_independent";
        case Coupling::bernoulli_comonotone: return "bernoulli_comonotone";
        case Coupling::beta_independent: return "beta_independent";
    }
    return "?";
}

struct RewardModel {
    std::vector<double> means;
    Coupling coupling = Coupling::bernoulli_independent;
    double precision = 4.0;  // Beta shape scale s: arm a draws Beta(s*mu, s*(1-mu))

    int arm_count() const { return static_cast<int>(means.size()); }

    void validate() const {
        if (means.empty()) throw std::invalid_argument("model: means must be nonempty");
        for (std::size_t a = 0; a < means.size(); ++a) {
            if (!(means[a] >= 0.0 && means[a] <= 1.0))
                throw std::invalid_argument("model: means[" + std::to_string(a) +
                                            "] outside [0,1]");
            if (coupling == Coupling::beta_independent &&
                !(means[a] > 0.0 && means[a] < 1.0))
                throw std::invalid_argument(
                    "model: means[" + std::to_string(a) +
                    "] must lie strictly inside (0,1) for beta_independent");
        }
        if (coupling == Coupling::beta_independent && !(precision > 0.0))
            throw std::invalid_argument("model: precision must be positive");
    }
};

struct GapProfile {
    std::vector<double> gaps;
    int optimal = 0;                  // lowest index attaining the max mean
    std::optional<double> delta_min;  // smallest strictly positive gap
    bool multiple_optimal = false;

    double max_gap() const {
        double m = 0.0;
        for (double g : gaps) m = std::max(m, g);
        return m;
    }
};

inline GapProfile gap_profile(const RewardModel& model) {
    model.validate();
    GapProfile p;
    const auto& mu = model.means;
    p.optimal = static_cast<int>(std::max_element(mu.begin(), mu.end()) - mu.begin());
    const double best = mu[static_cast<std::size_t>(p.optimal)];
    p.gaps.resize(mu.size());
    for (std::size_t a = 0; a < mu.size(); ++a) {
        p.gaps[a] = best - mu[a];
        if (static_cast<int>(a) != p.optimal && p.gaps[a] == 0.0) p.multiple_optimal = true;
        if (p.gaps[a] > 0.0 && (!p.delta_min || p.gaps[a] < *p.delta_min))
            p.delta_min = p.gaps[a];
    }
    return p;
}

inline double instant_regret(const GapProfile& profile, int arm) {
    if (arm < 0 || arm >= static_cast<int>(profile.gaps.size()))
        throw std::invalid_argument("profile: arm " + std::to_string(arm) + " out of range");
    return profile.gaps[static_cast<std::size_t>(arm)];
}

// One reward vector r with E[r(a)] = mu(a), independent across calls.
// bernoulli_comonotone shares a single uniform, making rewards maximally
// correlated; the learners never exploit the coupling.
inline void sample_rewards(const RewardModel& model, Rng& rng, std::vector<double>& out) {
    const std::size_t k = model.means.size();
    out.resize(k);
    switch (model.coupling) {
        case Coupling::bernoulli_independent:
            for (std::size_t a = 0; a < k; ++a)
                out[a] = rng.uniform() <= model.means[a] ? 1.0 : 0.0;
            break;
        case Coupling::bernoulli_comonotone: {
            const double u = rng.uniform();
            for (std::size_t a = 0; a < k; ++a)
                out[a] = u <= model.means[a] ? 1.0 : 0.0;
            break;
        }
        case Coupling::beta_independent:
            for (std::size_t a = 0; a < k; ++a)
                out[a] = beta_sample({model.precision * model.means[a],
                                      model.precision * (1.0 - model.means[a])},
                                     rng);
            break;
    }
}

inline std::vector<double> sample_rewards(const RewardModel& model, Rng& rng) {
    std::vector<double> out;
    sample_rewards(model, rng, out);
    return out;
}

// JSON schema: {"means":[...], "coupling":"bernoulli_comonotone", "precision":4.0}
inline void to_json(nlohmann::json& j, const RewardModel& m) {
    j = nlohmann::json{{"means", m.means}, {"coupling", coupling_name(m.coupling)}};
    if (m.coupling == Coupling::beta_independent) j["precision"] = m.precision;
}

inline void from_json(const nlohmann::json& j, RewardModel& m) {
    m.means = j.at("means").get<std::vector<double>>();
    m.coupling = parse_coupling(j.at("coupling").get<std::string>());
    m.precision = j.value("precision", 4.0);
    m.validate();
}

}  // namespace graphbandit
