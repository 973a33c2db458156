// Undirected feedback graph over arms plus the independent-set combinatorics
// the learners and the bound evaluators are built on.
#pragma once

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "graphbandit/rng.hpp"

namespace graphbandit {

// Symmetric, irreflexive adjacency over arms [0, k). Neighbor lists sorted.
struct FeedbackGraph {
    int k = 0;
    std::vector<std::vector<int>> adj;

    const std::vector<int>& neighbors(int a) const { return adj[static_cast<std::size_t>(a)]; }

    bool adjacent(int a, int b) const {
        const auto& n = neighbors(a);
        return std::binary_search(n.begin(), n.end(), b);
    }

    int degree(int a) const { return static_cast<int>(neighbors(a).size()); }

    // Canonical edge list: a < b, sorted lexicographically.
    std::vector<std::pair<int, int>> edges() const {
        std::vector<std::pair<int, int>> out;
        for (int a = 0; a < k; ++a)
            for (int b : neighbors(a))
                if (a < b) out.emplace_back(a, b);
        return out;
    }

    std::size_t edge_count() const {
        std::size_t twice = 0;
        for (const auto& n : adj) twice += n.size();
        return twice / 2;
    }
};

inline FeedbackGraph build_graph(int k, std::span<const std::pair<int, int>> edge_list) {
    if (k < 1) throw std::invalid_argument("graph: k must be >= 1, got " + std::to_string(k));
    FeedbackGraph g;
    g.k = k;
    g.adj.assign(static_cast<std::size_t>(k), {});
    for (const auto& [a, b] : edge_list) {
        if (a < 0 || a >= k)
            throw std::invalid_argument("graph: edge endpoint " + std::to_string(a) +
                                        " out of range [0," + std::to_string(k) + ")");
        if (b < 0 || b >= k)
            throw std::invalid_argument("graph: edge endpoint " + std::to_string(b) +
                                        " out of range [0," + std::to_string(k) + ")");
        if (a == b)
            throw std::invalid_argument("graph: self-loop at arm " + std::to_string(a));
        g.adj[static_cast<std::size_t>(a)].push_back(b);
        g.adj[static_cast<std::size_t>(b)].push_back(a);
    }
    for (auto& n : g.adj) {
        std::sort(n.begin(), n.end());
        n.erase(std::unique(n.begin(), n.end()), n.end());
    }
    return g;
}

inline FeedbackGraph build_graph(int k, std::initializer_list<std::pair<int, int>> edge_list) {
    return build_graph(k, std::span<const std::pair<int, int>>(edge_list.begin(), edge_list.size()));
}

enum class GraphKind { empty, complete, star, cycle, gnp };

inline GraphKind parse_graph_kind(std::string_view s) {
    if (s == "empty") return GraphKind::empty;
    if (s == "complete") return GraphKind::complete;
    if (s == "star") return GraphKind::star;
    if (s == "cycle") return GraphKind::cycle;
    if (s == "gnp") return GraphKind::gnp;
    throw std::invalid_argument("graph: unknown generator kind '" + std::string(s) + "'");
}

inline std::string_view graph_kind_name(GraphKind kind) {
    switch (kind) {
        case GraphKind::empty: return "empty";
        case GraphKind::complete: return "complete";
        case GraphKind::star: return "star";
        case GraphKind::cycle: return "cycle";
        case GraphKind::gnp: return "gnp";
    }
    return "?";
}

// Deterministic in (kind, k, p, seed). Star center is arm 0. gnp decides each
// edge by a counter-based hash of (seed, a, b), not by stream consumption.
inline FeedbackGraph generate(GraphKind kind, int k, double p = 0.0, std::uint64_t seed = 0) {
    if (k < 1) throw std::invalid_argument("graph: k must be >= 1, got " + std::to_string(k));
    std::vector<std::pair<int, int>> edges;
    switch (kind) {
        case GraphKind::empty:
            break;
        case GraphKind::complete:
            for (int a = 0; a < k; ++a)
                for (int b = a + 1; b < k; ++b) edges.emplace_back(a, b);
            break;
        case GraphKind::star:
            if (k < 2) throw std::invalid_argument("graph: star requires k >= 2");
            for (int b = 1; b < k; ++b) edges.emplace_back(0, b);
            break;
        case GraphKind::cycle:
            if (k == 2) {
                edges.emplace_back(0, 1);
            } else if (k >= 3) {
                for (int a = 0; a < k; ++a) edges.emplace_back(a, (a + 1) % k);
            }
            break;
        case GraphKind::gnp:
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument("graph: gnp probability must lie in [0,1]");
            for (int a = 0; a < k; ++a)
                for (int b = a + 1; b < k; ++b)
                    if (unit_hash(seed, static_cast<std::uint64_t>(a),
                                  static_cast<std::uint64_t>(b)) < p)
                        edges.emplace_back(a, b);
            break;
    }
    return build_graph(k, std::span<const std::pair<int, int>>(edges));
}

// CLI/config spec strings: "star:5", "gnp:20:0.3:42", "empty:4".
inline FeedbackGraph generate_from_spec(std::string_view spec) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t next = spec.find(':', pos);
        if (next == std::string_view::npos) next = spec.size();
        parts.push_back(spec.substr(pos, next - pos));
        pos = next + 1;
    }
    if (parts.empty()) throw std::invalid_argument("graph: empty spec string");
    GraphKind kind = parse_graph_kind(parts[0]);

    auto parse_int = [&](std::string_view s, const char* what) -> std::int64_t {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || ptr != s.data() + s.size())
            throw std::invalid_argument(std::string("graph: bad ") + what + " in spec '" +
                                        std::string(spec) + "'");
        return v;
    };

    if (kind == GraphKind::gnp) {
        if (parts.size() != 4)
            throw std::invalid_argument("graph: gnp spec is gnp:<k>:<p>:<seed>, got '" +
                                        std::string(spec) + "'");
        int k = static_cast<int>(parse_int(parts[1], "k"));
        double p = std::stod(std::string(parts[2]));
        std::uint64_t seed = static_cast<std::uint64_t>(parse_int(parts[3], "seed"));
        return generate(kind, k, p, seed);
    }
    if (parts.size() != 2)
        throw std::invalid_argument("graph: spec is <kind>:<k>, got '" + std::string(spec) + "'");
    return generate(kind, static_cast<int>(parse_int(parts[1], "k")));
}

// Ascending-index greedy: scan candidates, add an arm if no already-added
// neighbor. Result is independent and maximal within the candidate set.
inline std::vector<int> greedy_maximal_independent_set(const FeedbackGraph& g,
                                                       std::span<const int> candidates) {
    std::vector<int> sorted(candidates.begin(), candidates.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<char> taken(static_cast<std::size_t>(g.k), 0);
    std::vector<int> out;
    for (int a : sorted) {
        if (a < 0 || a >= g.k)
            throw std::invalid_argument("graph: candidate " + std::to_string(a) +
                                        " out of range [0," + std::to_string(g.k) + ")");
        bool blocked = false;
        for (int b : g.neighbors(a)) {
            if (taken[static_cast<std::size_t>(b)]) {
                blocked = true;
                break;
            }
        }
        if (!blocked) {
            taken[static_cast<std::size_t>(a)] = 1;
            out.push_back(a);
        }
    }
    return out;
}

inline std::vector<int> greedy_maximal_independent_set(const FeedbackGraph& g) {
    std::vector<int> all(static_cast<std::size_t>(g.k));
    for (int a = 0; a < g.k; ++a) all[static_cast<std::size_t>(a)] = a;
    return greedy_maximal_independent_set(g, all);
}

namespace detail {

constexpr int kExactIndependentSetMaxArms = 30;

inline std::vector<std::uint64_t> neighbor_masks(const FeedbackGraph& g) {
    std::vector<std::uint64_t> m(static_cast<std::size_t>(g.k), 0);
    for (int a = 0; a < g.k; ++a)
        for (int b : g.neighbors(a)) m[static_cast<std::size_t>(a)] |= 1ULL << b;
    return m;
}

inline void require_exact_budget(const FeedbackGraph& g, const char* op) {
    if (g.k > kExactIndependentSetMaxArms)
        throw std::invalid_argument(std::string("graph: ") + op + " is exact and capped at k <= " +
                                    std::to_string(kExactIndependentSetMaxArms) +
                                    "; use greedy_maximal_independent_set for larger graphs");
}

// Include-first DFS in ascending index order visits vertex sets in
// lexicographic order, so the first maximum-size set found is the
// lexicographically smallest one. The first full descent is exactly the
// ascending greedy solution, which seeds the pruning bound.
struct MisSearch {
    const std::vector<std::uint64_t>& nbr;
    int best_size = 0;
    std::uint64_t best_set = 0;

    void run(std::uint64_t chosen, int chosen_size, std::uint64_t cand) {
        if (chosen_size + std::popcount(cand) <= best_size) return;
        if (cand == 0) {
            best_size = chosen_size;
            best_set = chosen;
            return;
        }
        int v = std::countr_zero(cand);
        std::uint64_t bit = 1ULL << v;
        run(chosen | bit, chosen_size + 1, cand & ~(nbr[static_cast<std::size_t>(v)] | bit));
        run(chosen, chosen_size, cand & ~bit);
    }
};

struct WeightedMisSearch {
    const std::vector<std::uint64_t>& nbr;
    const std::vector<double>& weight;
    double best = 0.0;

    void run(double value, std::uint64_t cand) {
        double rest = 0.0;
        for (std::uint64_t m = cand; m != 0; m &= m - 1)
            rest += weight[static_cast<std::size_t>(std::countr_zero(m))];
        if (value + rest <= best) return;
        if (cand == 0) {
            best = value;
            return;
        }
        int v = std::countr_zero(cand);
        std::uint64_t bit = 1ULL << v;
        run(value + weight[static_cast<std::size_t>(v)],
            cand & ~(nbr[static_cast<std::size_t>(v)] | bit));
        run(value, cand & ~bit);
    }
};

}  // namespace detail

// Exact maximum independent set by branch and bound; ties resolved to the
// lexicographically smallest set. Enforced budget k <= 30.
inline std::vector<int> maximum_independent_set(const FeedbackGraph& g) {
    detail::require_exact_budget(g, "maximum_independent_set");
    auto nbr = detail::neighbor_masks(g);
    detail::MisSearch search{nbr};
    std::uint64_t all = (g.k == 64) ? ~0ULL : ((1ULL << g.k) - 1);
    search.run(0, 0, all);
    std::vector<int> out;
    for (std::uint64_t m = search.best_set; m != 0; m &= m - 1)
        out.push_back(std::countr_zero(m));
    return out;
}

// max over independent sets I of sum_{a in I, gaps[a] > 0} 1/gaps[a].
// Zero-gap (optimal) arms contribute nothing; the regret decomposition only
// charges suboptimal selections.
inline double max_gap_weighted_independent_sum(const FeedbackGraph& g,
                                               std::span<const double> gaps) {
    detail::require_exact_budget(g, "max_gap_weighted_independent_sum");
    if (static_cast<int>(gaps.size()) != g.k)
        throw std::invalid_argument("graph: gaps size " + std::to_string(gaps.size()) +
                                    " does not match k=" + std::to_string(g.k));
    std::vector<double> weight(static_cast<std::size_t>(g.k), 0.0);
    for (int a = 0; a < g.k; ++a) {
        double gap = gaps[static_cast<std::size_t>(a)];
        if (gap < 0.0)
            throw std::invalid_argument("graph: negative gap at arm " + std::to_string(a));
        if (gap > 0.0) weight[static_cast<std::size_t>(a)] = 1.0 / gap;
    }
    auto nbr = detail::neighbor_masks(g);
    detail::WeightedMisSearch search{nbr, weight};
    std::uint64_t all = (g.k == 64) ? ~0ULL : ((1ULL << g.k) - 1);
    search.run(0.0, all);
    return search.best;
}

// Greedy clique partition grown from the lowest-index uncovered vertex.
// Upper-bounds the minimum clique cover; reported next to the independence
// number for comparison.
inline int greedy_clique_cover_size(const FeedbackGraph& g) {
    std::vector<char> covered(static_cast<std::size_t>(g.k), 0);
    int cliques = 0;
    for (int v = 0; v < g.k; ++v) {
        if (covered[static_cast<std::size_t>(v)]) continue;
        std::vector<int> clique{v};
        covered[static_cast<std::size_t>(v)] = 1;
        for (int u = v + 1; u < g.k; ++u) {
            if (covered[static_cast<std::size_t>(u)]) continue;
            bool fits = true;
            for (int c : clique) {
                if (!g.adjacent(u, c)) {
                    fits = false;
                    break;
                }
            }
            if (fits) {
                clique.push_back(u);
                covered[static_cast<std::size_t>(u)] = 1;
            }
        }
        ++cliques;
    }
    return cliques;
}

// JSON schema: {"k": int, "edges": [[a,b], ...]} with a < b, sorted.
inline void to_json(nlohmann::json& j, const FeedbackGraph& g) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
    j = nlohmann::json{{"k", g.k}, {"edges", std::move(edges)}};
}

inline void from_json(const nlohmann::json& j, FeedbackGraph& g) {
    int k = j.at("k").get<int>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2)
            throw std::invalid_argument("graph: each edge must be a pair [a,b]");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    g = build_graph(k, std::span<const std::pair<int, int>>(edges));
}

}  // namespace graphbandit
