#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "graphbandit/environment.hpp"
#include "graphbandit/policies.hpp"

using namespace graphbandit;

namespace {

std::vector<Observation> observe(const FeedbackGraph& g, int selected,
                                 const std::vector<double>& rewards) {
    std::vector<Observation> obs;
    const auto& nbrs = g.neighbors(selected);
    std::size_t i = 0;
    for (; i < nbrs.size() && nbrs[i] < selected; ++i)
        obs.push_back({nbrs[i], rewards[static_cast<std::size_t>(nbrs[i])]});
    obs.push_back({selected, rewards[static_cast<std::size_t>(selected)]});
    for (; i < nbrs.size(); ++i)
        obs.push_back({nbrs[i], rewards[static_cast<std::size_t>(nbrs[i])]});
    return obs;
}

// Drives one policy for T steps against a model; returns selected arms.
std::vector<int> drive(Policy& policy, const RewardModel& model, std::int64_t T,
                       std::uint64_t env_seed, std::uint64_t pol_seed) {
    const auto& g = policy.graph();
    Rng env(env_seed), pol(pol_seed);
    std::vector<int> selections;
    std::vector<double> rewards;
    for (std::int64_t t = 1; t <= T; ++t) {
        int a = policy.select(t, pol);
        sample_rewards(model, env, rewards);
        auto obs = observe(g, a, rewards);
        policy.update(t, a, obs, pol);
        selections.push_back(a);
    }
    return selections;
}

// From-scratch classic UCB over Bernoulli streams; no graph code involved.
struct ClassicUcb {
    int k;
    std::int64_t horizon;
    double delta;
    std::vector<std::int64_t> n;
    std::vector<double> sum;

    ClassicUcb(int k_, std::int64_t T, double d)
        : k(k_), horizon(T), delta(d), n(static_cast<std::size_t>(k_), 0),
          sum(static_cast<std::size_t>(k_), 0.0) {}

    int select() const {
        int best = 0;
        double best_idx = -std::numeric_limits<double>::infinity();
        for (int a = 0; a < k; ++a) {
            double idx;
            if (n[static_cast<std::size_t>(a)] == 0) {
                idx = std::numeric_limits<double>::infinity();
            } else {
                idx = sum[static_cast<std::size_t>(a)] /
                          static_cast<double>(n[static_cast<std::size_t>(a)]) +
                      std::sqrt(std::log(2.0 * k * static_cast<double>(horizon) / delta) /
                                (2.0 * static_cast<double>(n[static_cast<std::size_t>(a)])));
            }
            if (idx > best_idx) {
                best_idx = idx;
                best = a;
            }
        }
        return best;
    }

    void update(int a, double r) {
        n[static_cast<std::size_t>(a)] += 1;
        sum[static_cast<std::size_t>(a)] += r;
    }
};

}  // namespace

TEST_CASE("confidence radius: unobserved, pinned value, quarter-sample scaling") {
    CHECK(confidence_radius(0, 4, 100, 0.1) == std::numeric_limits<double>::infinity());

    // direct evaluation of sqrt(ln(2*T*k/delta)/(2N))
    const double direct = std::sqrt(std::log(2.0 * 1000 * 10 / 0.001) / (2.0 * 50));
    CHECK(confidence_radius(50, 10, 1000, 0.001) == doctest::Approx(direct).epsilon(1e-15));
    CHECK(confidence_radius(50, 10, 1000, 0.001) == doctest::Approx(0.40995).epsilon(1e-3));

    CHECK(confidence_radius(200, 10, 1000, 0.001) /
              confidence_radius(50, 10, 1000, 0.001) ==
          doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(confidence_radius(5, 2, 100, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(confidence_radius(5, 2, 0, 0.1), std::invalid_argument);
}

TEST_CASE("eliminate: separated means drop the loser") {
    ArmStats stats(2);
    stats.observations = {10000, 10000};
    stats.reward_sum = {0.9 * 10000, 0.1 * 10000};
    const double radius = confidence_radius(10000, 2, 10000, 0.01);
    CHECK(radius == doctest::Approx(0.0276).epsilon(0.01));
    REQUIRE(0.1 + radius < 0.9 - radius);
    CHECK(eliminate({0, 1}, stats, 2, 10000, 0.01) == std::vector<int>{0});
}

TEST_CASE("eliminate: unobserved arms survive and never eliminate others") {
    ArmStats stats(3);
    stats.observations = {10000, 10000, 0};
    stats.reward_sum = {0.9 * 10000, 0.1 * 10000, 0.0};
    auto out = eliminate({0, 1, 2}, stats, 3, 10000, 0.01);
    CHECK(std::find(out.begin(), out.end(), 2) != out.end());

    ArmStats fresh(2);
    CHECK(eliminate({0, 1}, fresh, 2, 100, 0.1) == std::vector<int>{0, 1});
}

TEST_CASE("eliminate: overlapping intervals keep both arms") {
    ArmStats stats(2);
    stats.observations = {10, 10};
    stats.reward_sum = {6.0, 5.0};
    const double radius = confidence_radius(10, 2, 100, 0.01);
    CHECK(radius == doctest::Approx(std::sqrt(std::log(2.0 * 100 * 2 / 0.01) / 20.0)));
    CHECK(eliminate({0, 1}, stats, 2, 100, 0.01) == std::vector<int>{0, 1});
}

TEST_CASE("ucb_n selects arm 0 first and honors the argmax contract") {
    auto g = generate(GraphKind::gnp, 6, 0.4, 5);
    UcbNPolicy ucb(g, 1000, 0.01, false);
    Rng pol(1);
    CHECK(ucb.select(1, pol) == 0);

    RewardModel model{{0.6, 0.5, 0.4, 0.55, 0.3, 0.2}, Coupling::bernoulli_independent};
    Rng env(9), pol2(2);
    std::vector<double> rewards;
    for (std::int64_t t = 1; t <= 2000; ++t) {
        int a = ucb.select(t, pol2);
        double best_idx = -std::numeric_limits<double>::infinity();
        for (int b = 0; b < g.k; ++b) best_idx = std::max(best_idx, ucb.upper_index(b, t));
        CHECK(ucb.upper_index(a, t) == best_idx);
        sample_rewards(model, env, rewards);
        ucb.update(t, a, observe(g, a, rewards), pol2);
    }
}

TEST_CASE("ucb_n on the empty graph replays classic UCB decision-for-decision") {
    const int k = 5;
    const std::int64_t T = 3000;
    const double delta = 1.0 / static_cast<double>(T);
    auto g = generate(GraphKind::empty, k);
    RewardModel model{{0.8, 0.7, 0.6, 0.5, 0.4}, Coupling::bernoulli_independent};

    for (std::uint64_t seed : {1ull, 2ull}) {
        UcbNPolicy ucb(g, T, delta, false);
        Rng env_a(seed), pol(0);
        ClassicUcb ref(k, T, delta);
        Rng env_b(seed);
        std::vector<double> ra, rb;
        for (std::int64_t t = 1; t <= T; ++t) {
            int a = ucb.select(t, pol);
            int b = ref.select();
            REQUIRE(a == b);
            sample_rewards(model, env_a, ra);
            sample_rewards(model, env_b, rb);
            ucb.update(t, a, observe(g, a, ra), pol);
            ref.update(b, rb[static_cast<std::size_t>(b)]);
        }
    }
}

TEST_CASE("update bookkeeping on a path graph") {
    auto g = build_graph(3, {{0, 1}, {1, 2}});
    UcbNPolicy ucb(g, 100, 0.01, false);
    Rng pol(0);
    std::vector<Observation> obs{{0, 0.3}, {1, 1.0}, {2, 0.0}};
    ucb.update(1, 1, obs, pol);
    CHECK(ucb.stats().observations == std::vector<std::int64_t>{1, 1, 1});
    CHECK(ucb.stats().reward_sum == std::vector<double>{0.3, 1.0, 0.0});
}

TEST_CASE("update rejects observed sets that do not match the neighborhood") {
    auto g = build_graph(3, {{0, 1}});
    UcbNPolicy ucb(g, 100, 0.01, false);
    Rng pol(0);
    std::vector<Observation> missing{{1, 0.5}};
    CHECK_THROWS_AS(ucb.update(1, 1, missing, pol), std::invalid_argument);
    std::vector<Observation> extra{{0, 0.5}, {1, 0.5}, {2, 0.5}};
    CHECK_THROWS_AS(ucb.update(1, 1, extra, pol), std::invalid_argument);
    std::vector<Observation> wrong{{1, 0.5}, {2, 0.5}};
    CHECK_THROWS_AS(ucb.update(1, 1, wrong, pol), std::invalid_argument);

    // a bad reward must not partially apply the update
    std::vector<Observation> bad_reward{{0, 0.5}, {1, 1.5}};
    CHECK_THROWS_AS(ucb.update(1, 1, bad_reward, pol), std::invalid_argument);
    CHECK(ucb.stats().observations == std::vector<std::int64_t>{0, 0, 0});

    // coverage matters, ordering does not
    std::vector<Observation> reversed{{1, 0.25}, {0, 0.75}};
    CHECK_NOTHROW(ucb.update(1, 1, reversed, pol));
    CHECK(ucb.stats().observations == std::vector<std::int64_t>{1, 1, 0});
    CHECK(ucb.stats().reward_sum == std::vector<double>{0.75, 0.25, 0.0});
}

TEST_CASE("ts_n: deterministic binarization at the endpoints, S+F=N always") {
    auto g = generate(GraphKind::empty, 2);
    TsNPolicy ts(g, 100, 0.01, false);
    Rng pol(0);
    for (int i = 0; i < 50; ++i) {
        std::vector<Observation> one{{0, 1.0}};
        ts.update(1, 0, one, pol);
        std::vector<Observation> zero{{1, 0.0}};
        ts.update(1, 1, zero, pol);
    }
    CHECK(ts.stats().successes[0] == 50);
    CHECK(ts.stats().failures[0] == 0);
    CHECK(ts.stats().successes[1] == 0);
    CHECK(ts.stats().failures[1] == 50);

    auto g2 = generate(GraphKind::gnp, 5, 0.5, 3);
    TsNPolicy ts2(g2, 500, 0.01, false);
    RewardModel model{{0.2, 0.4, 0.6, 0.8, 0.5}, Coupling::beta_independent, 4.0};
    drive(ts2, model, 500, 11, 12);
    for (int a = 0; a < 5; ++a)
        CHECK(ts2.stats().successes[static_cast<std::size_t>(a)] +
                  ts2.stats().failures[static_cast<std::size_t>(a)] ==
              ts2.stats().observations[static_cast<std::size_t>(a)]);
}

TEST_CASE("ts_n select consumes one Beta(S+1,F+1) draw per arm in index order") {
    auto g = generate(GraphKind::empty, 4);
    TsNPolicy ts(g, 100, 0.01, false);
    Rng pol(42), shadow(42);
    int chosen = ts.select(1, pol);
    int expect = 0;
    double best = -1.0;
    for (int a = 0; a < 4; ++a) {
        double theta = beta_sample({1, 1}, shadow);  // fresh posterior is uniform
        if (theta > best) {
            best = theta;
            expect = a;
        }
    }
    CHECK(chosen == expect);
}

TEST_CASE("aae_is: first round on a star plays the greedy independent set") {
    auto g = generate(GraphKind::star, 3);
    AaeIsPolicy aae(g, 100, 0.01, false);
    Rng pol(0);
    CHECK(aae.select(1, pol) == 0);  // greedy MIS of the star is {center}
    CHECK(aae.round() == 1);
}

TEST_CASE("aae_is: per-round selections form an independent set") {
    auto g = generate(GraphKind::gnp, 10, 0.3, 17);
    AaeIsPolicy aae(g, 2000, 0.05, false);
    RewardModel model{{0.9, 0.6, 0.6, 0.6, 0.6, 0.6, 0.6, 0.6, 0.6, 0.6},
                      Coupling::bernoulli_independent};
    Rng env(4), pol(5);
    std::vector<double> rewards;
    std::int64_t round = 0;
    std::vector<int> this_round;
    for (std::int64_t t = 1; t <= 2000; ++t) {
        int a = aae.select(t, pol);
        if (aae.round() != round) {
            round = aae.round();
            this_round.clear();
        }
        for (int b : this_round) CHECK_FALSE(g.adjacent(a, b));
        this_round.push_back(a);
        sample_rewards(model, env, rewards);
        aae.update(t, a, observe(g, a, rewards), pol);
    }
    // separated means must eventually eliminate something
    CHECK(aae.active_arms().size() < 10);
    auto act = aae.active_arms();
    CHECK(std::find(act.begin(), act.end(), 0) != act.end());
}

TEST_CASE("aae_is keeps selecting a singleton active set") {
    auto g = generate(GraphKind::empty, 2);
    AaeIsPolicy aae(g, 5000, 0.1, false);
    RewardModel model{{0.95, 0.05}, Coupling::bernoulli_independent};
    auto sel = drive(aae, model, 5000, 3, 4);
    CHECK(aae.active_arms() == std::vector<int>{0});
    CHECK(sel.back() == 0);
    // tail is all optimal selections once the suboptimal arm is gone
    CHECK(std::count(sel.end() - 100, sel.end(), 0) == 100);
}

TEST_CASE("aae_minobs selects the least-observed active arm, lowest index first") {
    auto g = build_graph(3, {{0, 1}});
    AaeMinObsPolicy aae(g, 1000, 0.05, false);
    Rng pol(0);
    CHECK(aae.select(1, pol) == 0);
    std::vector<double> r{0.5, 0.5, 0.5};
    aae.update(1, 0, observe(g, 0, r), pol);  // arms 0,1 observed once
    CHECK(aae.select(2, pol) == 2);
    aae.update(2, 2, observe(g, 2, r), pol);  // all at one observation
    CHECK(aae.select(3, pol) == 0);
}

TEST_CASE("on the complete graph every policy has N_a = t for all arms") {
    auto g = generate(GraphKind::complete, 4);
    RewardModel model{{0.7, 0.5, 0.4, 0.3}, Coupling::bernoulli_comonotone};
    std::vector<std::unique_ptr<Policy>> policies;
    policies.push_back(make_policy(parse_policy_spec("aae_is"), g, 50));
    policies.push_back(make_policy(parse_policy_spec("aae_minobs"), g, 50));
    policies.push_back(make_policy(parse_policy_spec("ucb_n"), g, 50));
    policies.push_back(make_policy(parse_policy_spec("ts_n"), g, 50));
    for (auto& p : policies) {
        Rng env(7), pol(8);
        std::vector<double> rewards;
        for (std::int64_t t = 1; t <= 50; ++t) {
            int a = p->select(t, pol);
            sample_rewards(model, env, rewards);
            p->update(t, a, observe(g, a, rewards), pol);
            for (int b = 0; b < 4; ++b)
                CHECK(p->stats().observations[static_cast<std::size_t>(b)] == t);
        }
    }
}

TEST_CASE("anytime radius uses the current time") {
    auto g = generate(GraphKind::empty, 2);
    UcbNPolicy anytime(g, 1000, 0.01, true);
    UcbNPolicy fixed(g, 1000, 0.01, false);
    Rng pol(0);
    std::vector<double> r{1.0, 0.0};
    anytime.update(1, 0, {{{0, 1.0}}}, pol);
    fixed.update(1, 0, {{{0, 1.0}}}, pol);
    // at t=10 the anytime index uses ln(2*k*10/delta), the fixed one ln(2*k*1000/delta)
    CHECK(anytime.upper_index(0, 10) ==
          doctest::Approx(1.0 + std::sqrt(std::log(2.0 * 2 * 10 / 0.01) / 2.0)));
    CHECK(fixed.upper_index(0, 10) ==
          doctest::Approx(1.0 + std::sqrt(std::log(2.0 * 2 * 1000 / 0.01) / 2.0)));
}

TEST_CASE("policy spec strings") {
    CHECK(parse_policy_spec("aae_is").kind == PolicyKind::aae_is);
    CHECK(parse_policy_spec("aae_minobs").kind == PolicyKind::aae_minobs);
    CHECK(parse_policy_spec("ucb_n").kind == PolicyKind::ucb_n);
    CHECK(parse_policy_spec("ts_n").kind == PolicyKind::ts_n);
    auto anytime = parse_policy_spec("ucb_n_anytime");
    CHECK(anytime.kind == PolicyKind::ucb_n);
    CHECK(anytime.anytime);
    CHECK(anytime.label() == "ucb_n_anytime");
    CHECK_THROWS_AS(parse_policy_spec("egreedy"), std::invalid_argument);
    CHECK_THROWS_AS(parse_policy_spec("ts_n_anytime"), std::invalid_argument);
}

TEST_CASE("make_policy defaults delta to 1/T") {
    auto g = generate(GraphKind::empty, 2);
    auto p = make_policy(parse_policy_spec("ucb_n"), g, 1000);
    CHECK(p->delta() == doctest::Approx(0.001));
    PolicySpec custom = parse_policy_spec("ucb_n");
    custom.delta = 0.07;
    CHECK(make_policy(custom, g, 1000)->delta() == doctest::Approx(0.07));
}
