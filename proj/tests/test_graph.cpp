#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "graphbandit/graph.hpp"

using namespace graphbandit;

namespace {

bool is_independent(const FeedbackGraph& g, const std::vector<int>& set) {
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = i + 1; j < set.size(); ++j)
            if (g.adjacent(set[i], set[j])) return false;
    return true;
}

bool is_maximal_within(const FeedbackGraph& g, const std::vector<int>& set,
                       const std::vector<int>& candidates) {
    for (int c : candidates) {
        if (std::find(set.begin(), set.end(), c) != set.end()) continue;
        bool blocked = false;
        for (int s : set)
            if (g.adjacent(c, s)) blocked = true;
        if (!blocked) return false;
    }
    return true;
}

std::vector<int> subset_to_vec(std::uint32_t mask, int k) {
    std::vector<int> v;
    for (int a = 0; a < k; ++a)
        if (mask & (1u << a)) v.push_back(a);
    return v;
}

// Oracle: enumerate all 2^k subsets; maximum size, ties to the
// lexicographically smallest vertex sequence.
std::vector<int> brute_force_mis(const FeedbackGraph& g) {
    std::vector<int> best;
    for (std::uint32_t mask = 0; mask < (1u << g.k); ++mask) {
        auto set = subset_to_vec(mask, g.k);
        if (!is_independent(g, set)) continue;
        if (set.size() > best.size() ||
            (set.size() == best.size() && std::lexicographical_compare(set.begin(), set.end(),
                                                                       best.begin(), best.end())))
            best = set;
    }
    return best;
}

double brute_force_weighted_sum(const FeedbackGraph& g, const std::vector<double>& gaps) {
    double best = 0.0;
    for (std::uint32_t mask = 0; mask < (1u << g.k); ++mask) {
        auto set = subset_to_vec(mask, g.k);
        if (!is_independent(g, set)) continue;
        double v = 0.0;
        for (int a : set)
            if (gaps[static_cast<std::size_t>(a)] > 0.0) v += 1.0 / gaps[static_cast<std::size_t>(a)];
        best = std::max(best, v);
    }
    return best;
}

}  // namespace

TEST_CASE("build_graph constructs symmetric deduplicated adjacency") {
    auto g = build_graph(3, {{0, 1}, {1, 2}});
    CHECK(g.k == 3);
    CHECK(g.neighbors(0) == std::vector<int>{1});
    CHECK(g.neighbors(1) == std::vector<int>{0, 2});
    CHECK(g.neighbors(2) == std::vector<int>{1});

    auto empty = build_graph(3, {});
    for (int a = 0; a < 3; ++a) CHECK(empty.neighbors(a).empty());

    auto dup = build_graph(2, {{0, 1}, {1, 0}, {0, 1}});
    CHECK(dup.edge_count() == 1);
}

TEST_CASE("build_graph rejects self-loops and out-of-range endpoints") {
    CHECK_THROWS_WITH_AS(build_graph(2, {{0, 0}}), doctest::Contains("self-loop"),
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(build_graph(2, {{0, 7}}), doctest::Contains("7"),
                         std::invalid_argument);
    CHECK_THROWS_AS(build_graph(0, {}), std::invalid_argument);
}

TEST_CASE("generators produce the expected shapes") {
    auto star = generate(GraphKind::star, 4);
    CHECK(star.edges() == std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {0, 3}});

    CHECK(generate(GraphKind::complete, 3).edge_count() == 3);
    CHECK(generate(GraphKind::empty, 5).edge_count() == 0);

    auto cyc = generate(GraphKind::cycle, 5);
    CHECK(cyc.edge_count() == 5);
    for (int a = 0; a < 5; ++a) CHECK(cyc.degree(a) == 2);
    CHECK(generate(GraphKind::cycle, 2).edge_count() == 1);

    CHECK(generate(GraphKind::gnp, 10, 0.0, 7).edge_count() == 0);
    CHECK(generate(GraphKind::gnp, 10, 1.0, 7).edge_count() == 45);
}

TEST_CASE("generate is a pure function of its arguments") {
    auto a = generate(GraphKind::gnp, 20, 0.3, 42);
    auto b = generate(GraphKind::gnp, 20, 0.3, 42);
    CHECK(a.edges() == b.edges());
    auto c = generate(GraphKind::gnp, 20, 0.3, 43);
    CHECK(a.edges() != c.edges());
}

TEST_CASE("spec strings parse") {
    CHECK(generate_from_spec("star:5").edge_count() == 4);
    auto g = generate_from_spec("gnp:20:0.3:42");
    CHECK(g.k == 20);
    CHECK(g.edges() == generate(GraphKind::gnp, 20, 0.3, 42).edges());
    CHECK_THROWS_AS(generate_from_spec("frob:5"), std::invalid_argument);
    CHECK_THROWS_AS(generate_from_spec("star:x"), std::invalid_argument);
    CHECK_THROWS_AS(generate_from_spec("gnp:5:0.5"), std::invalid_argument);
}

TEST_CASE("greedy maximal independent set: pinned examples") {
    auto star5 = generate(GraphKind::star, 5);
    CHECK(greedy_maximal_independent_set(star5) == std::vector<int>{0});

    auto empty4 = generate(GraphKind::empty, 4);
    CHECK(greedy_maximal_independent_set(empty4) == std::vector<int>{0, 1, 2, 3});

    auto k4 = generate(GraphKind::complete, 4);
    std::vector<int> cand{2, 3};
    CHECK(greedy_maximal_independent_set(k4, cand) == std::vector<int>{2});

    CHECK(greedy_maximal_independent_set(k4, std::span<const int>{}).empty());
}

TEST_CASE("greedy result is independent and maximal on random graphs") {
    std::mt19937_64 rd(1234);
    for (int trial = 0; trial < 40; ++trial) {
        int k = 2 + static_cast<int>(rd() % 15);
        double p = static_cast<double>(rd() % 100) / 100.0;
        auto g = generate(GraphKind::gnp, k, p, rd());
        std::vector<int> cand;
        for (int a = 0; a < k; ++a)
            if (rd() % 4 != 0) cand.push_back(a);
        auto set = greedy_maximal_independent_set(g, cand);
        CHECK(is_independent(g, set));
        CHECK(is_maximal_within(g, set, cand));
    }
}

TEST_CASE("maximum independent set: pinned examples") {
    CHECK(maximum_independent_set(generate(GraphKind::star, 5)) ==
          std::vector<int>{1, 2, 3, 4});
    CHECK(maximum_independent_set(generate(GraphKind::complete, 6)) == std::vector<int>{0});

    auto c5 = generate(GraphKind::cycle, 5);
    CHECK(maximum_independent_set(c5).size() == brute_force_mis(c5).size());
    CHECK(brute_force_mis(c5).size() == 2);
}

TEST_CASE("maximum independent set enforces the exact-search budget") {
    auto g = generate(GraphKind::empty, 31);
    CHECK_THROWS_WITH_AS(maximum_independent_set(g), doctest::Contains("greedy"),
                         std::invalid_argument);
    std::vector<double> gaps(31, 0.5);
    CHECK_THROWS_AS(max_gap_weighted_independent_sum(g, gaps), std::invalid_argument);
}

TEST_CASE("exact solvers match brute force on random graphs up to k=12") {
    std::mt19937_64 rd(99);
    std::uniform_real_distribution<double> gapdist(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        int k = 2 + static_cast<int>(rd() % 11);
        double p = static_cast<double>(rd() % 101) / 100.0;
        auto g = generate(GraphKind::gnp, k, p, rd());

        CHECK(maximum_independent_set(g) == brute_force_mis(g));

        std::vector<double> gaps(static_cast<std::size_t>(k));
        for (auto& gap : gaps) gap = (rd() % 5 == 0) ? 0.0 : gapdist(rd);
        CHECK(max_gap_weighted_independent_sum(g, gaps) ==
              doctest::Approx(brute_force_weighted_sum(g, gaps)).epsilon(1e-12));
    }
}

TEST_CASE("gap-weighted independent sum: pinned examples") {
    auto empty3 = generate(GraphKind::empty, 3);
    std::vector<double> gaps{0.0, 0.5, 0.25};
    CHECK(max_gap_weighted_independent_sum(empty3, gaps) == doctest::Approx(6.0));

    auto k3 = generate(GraphKind::complete, 3);
    CHECK(max_gap_weighted_independent_sum(k3, gaps) == doctest::Approx(4.0));

    auto star3 = generate(GraphKind::star, 3);
    std::vector<double> gaps2{0.1, 0.0, 0.2};
    CHECK(max_gap_weighted_independent_sum(star3, gaps2) == doctest::Approx(10.0));

    CHECK_THROWS_AS(max_gap_weighted_independent_sum(k3, std::vector<double>{0.1, -0.2, 0.3}),
                    std::invalid_argument);
}

TEST_CASE("greedy clique cover: pinned examples and dominance over MIS") {
    CHECK(greedy_clique_cover_size(generate(GraphKind::complete, 5)) == 1);
    CHECK(greedy_clique_cover_size(generate(GraphKind::empty, 5)) == 5);
    CHECK(greedy_clique_cover_size(generate(GraphKind::star, 4)) == 3);

    std::mt19937_64 rd(7);
    for (int trial = 0; trial < 25; ++trial) {
        int k = 2 + static_cast<int>(rd() % 14);
        auto g = generate(GraphKind::gnp, k, static_cast<double>(rd() % 101) / 100.0, rd());
        CHECK(greedy_clique_cover_size(g) >=
              static_cast<int>(maximum_independent_set(g).size()));
    }
}

TEST_CASE("graph JSON round trip uses the canonical edge order") {
    auto g = build_graph(4, {{2, 3}, {0, 3}, {0, 1}});
    nlohmann::json j = g;
    CHECK(j["k"] == 4);
    CHECK(j["edges"] == nlohmann::json::array({{0, 1}, {0, 3}, {2, 3}}));
    auto back = j.get<FeedbackGraph>();
    CHECK(back.edges() == g.edges());

    nlohmann::json bad = {{"k", 2}, {"edges", {{0, 0}}}};
    CHECK_THROWS_AS(bad.get<FeedbackGraph>(), std::invalid_argument);
}

TEST_CASE("candidate validation in greedy MIS") {
    auto g = generate(GraphKind::empty, 3);
    std::vector<int> cand{0, 5};
    CHECK_THROWS_AS(greedy_maximal_independent_set(g, cand), std::invalid_argument);
}
