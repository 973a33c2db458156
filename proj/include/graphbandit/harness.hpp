// Reproducible experiment runner: load a declarative config, run seeded
// replications of (policy x environment x graph), record pseudo-regret
// trajectories plus layering diagnostics, emit CSV/JSON.
//
// Stream layout: the environment stream is seeded by (base_seed, "env",
// replication) and is shared by every policy, so all policies face identical
// reward realizations; each policy binarizes/samples from its own stream
// seeded by (base_seed, "policy", label, replication).
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "graphbandit/environment.hpp"
#include "graphbandit/graph.hpp"
#include "graphbandit/layering.hpp"
#include "graphbandit/policies.hpp"
#include "graphbandit/rng.hpp"

namespace graphbandit {

// Configuration problems carry the offending field path in the message and
// map to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PolicyConfig {
    PolicySpec spec;
    std::string label;
};

struct ExperimentConfig {
    FeedbackGraph graph;
    std::string graph_spec;  // original spec string when given, else "inline"
    RewardModel model;
    std::vector<PolicyConfig> policies;
    std::int64_t horizon = 0;
    int replications = 1;
    std::uint64_t base_seed = 0;
    std::vector<std::int64_t> checkpoints;
    bool layering = false;
    std::string output_dir = "out";
    double c_ts = 1.0;

    void validate() const;
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
};

inline std::vector<std::int64_t> log2_checkpoints(std::int64_t horizon) {
    std::vector<std::int64_t> cps;
    for (std::int64_t t = 1; t <= horizon; t *= 2) cps.push_back(t);
    if (cps.back() != horizon) cps.push_back(horizon);
    return cps;
}

inline void ExperimentConfig::validate() const {
    if (graph.k < 1) throw ConfigError("graph: arm count must be >= 1");
    if (model.arm_count() != graph.k)
        throw ConfigError("model.means: size " + std::to_string(model.arm_count()) +
                          " does not match graph k=" + std::to_string(graph.k));
    try {
        model.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (horizon < 1) throw ConfigError("horizon: must be >= 1");
    if (replications < 1) throw ConfigError("replications: must be >= 1");
    if (policies.empty()) throw ConfigError("policies: must list at least one policy");
    for (std::size_t i = 0; i < policies.size(); ++i)
        for (std::size_t j = i + 1; j < policies.size(); ++j)
            if (policies[i].label == policies[j].label)
                throw ConfigError("policies[" + std::to_string(j) + "]: duplicate label '" +
                                  policies[j].label + "' (labels seed the policy streams)");
    if (checkpoints.empty()) throw ConfigError("checkpoints: must be nonempty");
    std::int64_t prev = 0;
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        if (checkpoints[i] <= prev)
            throw ConfigError("checkpoints[" + std::to_string(i) +
                              "]: times must be strictly increasing and >= 1");
        if (checkpoints[i] > horizon)
            throw ConfigError("checkpoints[" + std::to_string(i) + "]: " +
                              std::to_string(checkpoints[i]) + " exceeds horizon " +
                              std::to_string(horizon));
        prev = checkpoints[i];
    }
}

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        const auto& jg = j.at("graph");
        if (jg.is_string()) {
            cfg.graph_spec = jg.get<std::string>();
            cfg.graph = generate_from_spec(cfg.graph_spec);
        } else {
            cfg.graph_spec = "inline";
            cfg.graph = jg.get<FeedbackGraph>();
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("graph: ") + e.what());
    }

    try {
        cfg.model = j.at("model").get<RewardModel>();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("model: ") + e.what());
    }

    if (!j.contains("policies")) throw ConfigError("policies: missing");
    const auto& jp = j.at("policies");
    if (!jp.is_array()) throw ConfigError("policies: must be an array");
    for (std::size_t i = 0; i < jp.size(); ++i) {
        const auto& entry = jp[i];
        try {
            PolicyConfig pc;
            if (entry.is_string()) {
                pc.spec = parse_policy_spec(entry.get<std::string>());
            } else {
                pc.spec = parse_policy_spec(entry.at("name").get<std::string>());
                if (entry.contains("delta")) {
                    pc.spec.delta = entry.at("delta").get<double>();
                    if (!(pc.spec.delta > 0.0 && pc.spec.delta < 1.0))
                        throw std::invalid_argument("delta must lie in (0,1)");
                }
                if (entry.contains("anytime")) pc.spec.anytime = entry.at("anytime").get<bool>();
                if (pc.spec.kind == PolicyKind::ts_n && pc.spec.anytime)
                    throw std::invalid_argument("ts_n has no anytime variant");
            }
            pc.label = pc.spec.label();
            cfg.policies.push_back(std::move(pc));
        } catch (const std::exception& e) {
            throw ConfigError("policies[" + std::to_string(i) + "]: " + e.what());
        }
    }

    try {
        cfg.horizon = j.at("horizon").get<std::int64_t>();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("horizon: ") + e.what());
    }
    cfg.replications = j.value("replications", 1);
    cfg.base_seed = j.value("base_seed", std::uint64_t{0});
    cfg.layering = j.value("layering", false);
    cfg.output_dir = j.value("output_dir", std::string("out"));
    cfg.c_ts = j.value("c_ts", 1.0);
    if (!(cfg.c_ts >= 0.0)) throw ConfigError("c_ts: must be nonnegative");

    if (!j.contains("checkpoints") ||
        (j.at("checkpoints").is_string() && j.at("checkpoints").get<std::string>() == "log2")) {
        if (cfg.horizon >= 1) cfg.checkpoints = log2_checkpoints(cfg.horizon);
    } else if (j.at("checkpoints").is_array()) {
        cfg.checkpoints = j.at("checkpoints").get<std::vector<std::int64_t>>();
    } else {
        throw ConfigError("checkpoints: must be \"log2\" or an array of times");
    }

    cfg.validate();
    return cfg;
}

inline ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("config: '" + path + "' is not valid JSON: " + e.what());
    }
    return from_json(j);
}

struct RunRecord {
    std::string policy;
    int replication;
    std::int64_t t;
    double cum_pseudo_regret;
    double cum_reward;
};

struct PullCount {
    std::string policy;
    int replication;
    int arm;
    std::int64_t count;
};

struct LayeringReport {
    std::string policy;
    int replication;
    std::vector<int> lambda;
    std::map<int, std::int64_t> occupancy_histogram;
    std::size_t independence_violations = 0;
    std::size_t placement_violations = 0;
};

struct ExperimentResult {
    std::vector<RunRecord> records;
    std::vector<PullCount> pulls;
    std::vector<LayeringReport> layering;
    // FNV hash of every sampled reward vector, indexed unit-major
    // (policy index * replications + replication).
    std::vector<std::uint64_t> env_trace_hash;
    GapProfile profile;
};

namespace detail {

inline void hash_rewards(std::uint64_t& h, std::span<const double> rewards) {
    for (double r : rewards) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(r));
        std::memcpy(&bits, &r, sizeof(bits));
        h ^= bits;
        h *= 0x100000001b3ULL;
    }
}

struct UnitOutput {
    std::vector<RunRecord> records;
    std::vector<PullCount> pulls;
    std::optional<LayeringReport> layering;
    std::uint64_t trace_hash = 0xcbf29ce484222325ULL;
};

inline UnitOutput run_unit(const ExperimentConfig& cfg, const GapProfile& profile,
                           std::size_t policy_index, int replication) {
    const auto& pc = cfg.policies[policy_index];
    const auto& g = cfg.graph;
    auto policy = make_policy(pc.spec, g, cfg.horizon);
    Rng env_rng(derive_seed(cfg.base_seed, "env", static_cast<std::uint64_t>(replication)));
    Rng pol_rng(derive_seed(cfg.base_seed, "policy", pc.label,
                            static_cast<std::uint64_t>(replication)));

    std::optional<LayeringTracker> tracker;
    ObservationLog obs_log;
    if (cfg.layering) {
        tracker.emplace(g.k);
        obs_log.resize(static_cast<std::size_t>(g.k));
    }

    UnitOutput out;
    std::vector<double> rewards;
    std::vector<Observation> observed;
    std::vector<std::int64_t> pulls(static_cast<std::size_t>(g.k), 0);
    double cum_pseudo_regret = 0.0;
    double cum_reward = 0.0;
    std::size_t next_cp = 0;

    for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
        const int a = policy->select(t, pol_rng);
        sample_rewards(cfg.model, env_rng, rewards);
        hash_rewards(out.trace_hash, rewards);

        observed.clear();
        const auto& nbrs = g.neighbors(a);
        std::size_t i = 0;
        for (; i < nbrs.size() && nbrs[i] < a; ++i)
            observed.push_back({nbrs[i], rewards[static_cast<std::size_t>(nbrs[i])]});
        observed.push_back({a, rewards[static_cast<std::size_t>(a)]});
        for (; i < nbrs.size(); ++i)
            observed.push_back({nbrs[i], rewards[static_cast<std::size_t>(nbrs[i])]});

        if (tracker) {
            tracker->record_selection(g, a, t);
            for (const auto& o : observed) obs_log[static_cast<std::size_t>(o.arm)].push_back(t);
        }

        policy->update(t, a, observed, pol_rng);
        cum_pseudo_regret += profile.gaps[static_cast<std::size_t>(a)];
        cum_reward += rewards[static_cast<std::size_t>(a)];
        pulls[static_cast<std::size_t>(a)] += 1;

        if (next_cp < cfg.checkpoints.size() && t == cfg.checkpoints[next_cp]) {
            out.records.push_back({pc.label, replication, t, cum_pseudo_regret, cum_reward});
            ++next_cp;
        }
    }

    for (int a = 0; a < g.k; ++a)
        out.pulls.push_back({pc.label, replication, a, pulls[static_cast<std::size_t>(a)]});

    if (tracker) {
        LayeringReport report;
        report.policy = pc.label;
        report.replication = replication;
        report.lambda = tracker->lambda();
        report.occupancy_histogram = tracker->occupancy_histogram();
        report.independence_violations = verify_layer_independence(*tracker, g).size();
        report.placement_violations = verify_placement_counts(*tracker, obs_log).size();
        out.layering = std::move(report);
    }
    return out;
}

}  // namespace detail

// Units (policy x replication) are independent; any jobs count produces the
// same output because results are merged in unit order.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1) {
    cfg.validate();
    ExperimentResult result;
    result.profile = gap_profile(cfg.model);

    const std::size_t n_units = cfg.policies.size() * static_cast<std::size_t>(cfg.replications);
    std::vector<detail::UnitOutput> outputs(n_units);

    const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n_units)));
    if (workers == 1) {
        for (std::size_t u = 0; u < n_units; ++u)
            outputs[u] = detail::run_unit(cfg, result.profile,
                                          u / static_cast<std::size_t>(cfg.replications),
                                          static_cast<int>(u % static_cast<std::size_t>(
                                                               cfg.replications)));
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (;;) {
                        const std::size_t u = next.fetch_add(1);
                        if (u >= n_units) break;
                        outputs[u] = detail::run_unit(
                            cfg, result.profile, u / static_cast<std::size_t>(cfg.replications),
                            static_cast<int>(u % static_cast<std::size_t>(cfg.replications)));
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    result.env_trace_hash.reserve(n_units);
    for (auto& out : outputs) {
        result.records.insert(result.records.end(), out.records.begin(), out.records.end());
        result.pulls.insert(result.pulls.end(), out.pulls.begin(), out.pulls.end());
        if (out.layering) result.layering.push_back(std::move(*out.layering));
        result.env_trace_hash.push_back(out.trace_hash);
    }
    return result;
}

struct SummaryRow {
    std::string policy;
    std::int64_t t;
    double mean;
    double stddev;  // population deviation: zero for a single replication
    double min;
    double max;
};

inline std::vector<SummaryRow> summarize(std::span<const RunRecord> records) {
    std::vector<std::pair<std::string, std::int64_t>> keys;
    std::map<std::pair<std::string, std::int64_t>, std::vector<double>> groups;
    for (const auto& r : records) {
        auto key = std::make_pair(r.policy, r.t);
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) keys.push_back(key);
        it->second.push_back(r.cum_pseudo_regret);
    }
    // keys in first-appearance order: policy-major, then checkpoint time
    std::vector<SummaryRow> rows;
    rows.reserve(keys.size());
    for (const auto& key : keys) {
        const auto& xs = groups[key];
        const double n = static_cast<double>(xs.size());
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= n;
        double var = 0.0;
        for (double x : xs) var += (x - mean) * (x - mean);
        var /= n;
        rows.push_back({key.first, key.second, mean, std::sqrt(var),
                        *std::min_element(xs.begin(), xs.end()),
                        *std::max_element(xs.begin(), xs.end())});
    }
    return rows;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace detail

inline void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& result,
                          const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    {
        std::ofstream f(fs::path(out_dir) / "regret.csv", std::ios::binary);
        f << "policy,replication,t,cum_pseudo_regret,cum_reward\n";
        for (const auto& r : result.records)
            f << r.policy << ',' << r.replication << ',' << r.t << ','
              << detail::format_double(r.cum_pseudo_regret) << ','
              << detail::format_double(r.cum_reward) << '\n';
    }
    {
        std::ofstream f(fs::path(out_dir) / "pulls.csv", std::ios::binary);
        f << "policy,replication,arm,count\n";
        for (const auto& p : result.pulls)
            f << p.policy << ',' << p.replication << ',' << p.arm << ',' << p.count << '\n';
    }
    {
        std::ofstream f(fs::path(out_dir) / "summary.csv", std::ios::binary);
        f << "policy,t,mean,std,min,max\n";
        for (const auto& s : summarize(result.records))
            f << s.policy << ',' << s.t << ',' << detail::format_double(s.mean) << ','
              << detail::format_double(s.stddev) << ',' << detail::format_double(s.min) << ','
              << detail::format_double(s.max) << '\n';
    }
    if (cfg.layering) {
        nlohmann::json runs = nlohmann::json::array();
        for (const auto& rep : result.layering) {
            nlohmann::json jh = nlohmann::json::object();
            for (const auto& [occupancy, layers] : rep.occupancy_histogram)
                jh[std::to_string(occupancy)] = layers;
            runs.push_back({{"policy", rep.policy},
                            {"replication", rep.replication},
                            {"lambda", rep.lambda},
                            {"occupancy_histogram", std::move(jh)},
                            {"layer_independence_violations", rep.independence_violations},
                            {"placement_count_violations", rep.placement_violations}});
        }
        std::ofstream f(fs::path(out_dir) / "layering.json", std::ios::binary);
        f << nlohmann::json{{"runs", std::move(runs)}}.dump(2) << '\n';
    }
}

// --jobs fallback: GRAPHBANDIT_JOBS, else 1.
inline int resolve_jobs(int cli_value) {
    if (cli_value > 0) return cli_value;
    if (const char* env = std::getenv("GRAPHBANDIT_JOBS")) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
            // fall through to the default
        }
    }
    return 1;
}

}  // namespace graphbandit
