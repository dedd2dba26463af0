#pragma once
// SI cascading failures on a directed topology.
//
// Time is 1-indexed. A set of seed nodes fails at t = 1; at each later step
// every functional node j fails independently with probability
// 1 - (1 - q)^k, where k counts its failed in-neighbours that are "active":
// newly failed at the previous step under Markovian propagation, or failed at
// any earlier step otherwise. Failure is absorbing and the cascade ends at
// the first step that produces no new failure.
//
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "icinet/network.hpp"
#include "icinet/rng.hpp"

namespace icinet {

inline double node_failure_probability(double q, int n_active_failed_neighbors) {
    if (n_active_failed_neighbors <= 0) return 0.0;
    return 1.0 - std::pow(1.0 - q, n_active_failed_neighbors);
}

// One monotone failure time series, stored as first-failure times.
class CascadeScenario {
public:
    CascadeScenario() = default;

    // fail_time[j] in [1, T] is the step at which j fails, 0 if it never does.
    CascadeScenario(std::vector<int> fail_time, int steps) : fail_time_(std::move(fail_time)), steps_(steps) {
        require(steps_ >= 1, "scenario must last at least one step");
        newly_.assign(static_cast<std::size_t>(steps_), {});
        for (NodeId j = 0; j < n_nodes(); ++j) {
            const int t = fail_time_[static_cast<std::size_t>(j)];
            require(t >= 0 && t <= steps_, "failure time " + std::to_string(t) + " of node " + std::to_string(j) +
                                               " outside [1, " + std::to_string(steps_) + "]");
            if (t > 0) newly_[static_cast<std::size_t>(t - 1)].push_back(j);
        }
        require(!newly_.front().empty(), "scenario has no failure at t = 1");
    }

    int n_nodes() const { return static_cast<int>(fail_time_.size()); }
    int steps() const { return steps_; }
    int fail_time(NodeId j) const { return fail_time_[static_cast<std::size_t>(j)]; }
    const std::vector<int>& fail_times() const { return fail_time_; }

    // states[t][j] of the binary matrix: failed at or before step t.
    bool failed(int t, NodeId j) const {
        const int f = fail_time(j);
        return f > 0 && f <= t;
    }

    // Nodes whose first failure is at step t (1 <= t <= steps()).
    std::span<const NodeId> newly_failed(int t) const { return newly_[static_cast<std::size_t>(t - 1)]; }

    bool operator==(const CascadeScenario& o) const { return fail_time_ == o.fail_time_ && steps_ == o.steps_; }

private:
    std::vector<int> fail_time_;
    int steps_ = 0;
    std::vector<std::vector<NodeId>> newly_;
};

struct CascadeDataset {
    std::vector<CascadeScenario> scenarios;
    double q = 0.4;
    std::string meta_digest;
    int n_nodes = 0;

    bool empty() const { return scenarios.empty(); }
};

// One propagation step: nodes that fail at step t + 1 given the failure
// times up to t. `fail_time` is read only for entries <= t.
inline std::vector<NodeId> propagate_step(const Topology& topo, double q, bool markovian,
                                          std::span<const int> fail_time, int t, Rng& rng) {
    const int n = topo.n_nodes();
    std::vector<int> active_count(static_cast<std::size_t>(n), 0);
    for (NodeId k = 0; k < n; ++k) {
        const int f = fail_time[static_cast<std::size_t>(k)];
        const bool active = markovian ? f == t : (f > 0 && f <= t);
        if (!active) continue;
        for (NodeId j : topo.successors(k)) ++active_count[static_cast<std::size_t>(j)];
    }
    std::vector<NodeId> fresh;
    for (NodeId j = 0; j < n; ++j) {
        const int f = fail_time[static_cast<std::size_t>(j)];
        const int k = active_count[static_cast<std::size_t>(j)];
        if ((f > 0 && f <= t) || k == 0) continue;
        if (uniform01(rng) < node_failure_probability(q, k)) fresh.push_back(j);
    }
    return fresh;
}

inline std::vector<NodeId> sample_seed_nodes(int n_nodes, double initial_ratio, Rng& rng) {
    const int k = std::clamp(static_cast<int>(std::ceil(initial_ratio * n_nodes - 1e-12)), 1, n_nodes);
    std::vector<NodeId> ids(static_cast<std::size_t>(n_nodes));
    for (NodeId i = 0; i < n_nodes; ++i) ids[static_cast<std::size_t>(i)] = i;
    for (int a = 0; a < k; ++a) {
        const int b = a + uniform_index<int>(rng, n_nodes - a);
        std::swap(ids[static_cast<std::size_t>(a)], ids[static_cast<std::size_t>(b)]);
    }
    ids.resize(static_cast<std::size_t>(k));
    std::sort(ids.begin(), ids.end());
    return ids;
}

// Runs a cascade from the given seed set until no new failure occurs.
inline CascadeScenario simulate_from(const Topology& topo, double q, std::span<const NodeId> seeds, bool markovian,
                                     Rng& rng) {
    std::vector<int> fail_time(static_cast<std::size_t>(topo.n_nodes()), 0);
    for (NodeId s : seeds) fail_time[static_cast<std::size_t>(s)] = 1;
    int t = 1;
    for (;;) {
        const auto fresh = propagate_step(topo, q, markovian, fail_time, t, rng);
        if (fresh.empty()) break;
        ++t;
        for (NodeId j : fresh) fail_time[static_cast<std::size_t>(j)] = t;
    }
    return CascadeScenario(std::move(fail_time), t);
}

inline CascadeScenario simulate_cascade(const Topology& topo, double q, double initial_ratio, bool markovian,
                                        Rng& rng) {
    require(topo.n_nodes() > 0, "cannot simulate a cascade on an empty network");
    require(initial_ratio > 0.0 && initial_ratio < 1.0, "initial failure ratio must lie in (0,1)");
    require(q >= 0.0 && q <= 1.0, "propagation probability must lie in [0,1]");
    const auto seeds = sample_seed_nodes(topo.n_nodes(), initial_ratio, rng);
    return simulate_from(topo, q, seeds, markovian, rng);
}

struct CascadeParams {
    int n_scenarios = 40;
    int min_steps = 5;
    double q = 0.4;
    double initial_ratio = 0.2;
    bool markovian = true;
    std::uint64_t seed = 0;
    int max_rejections = 10000;
};

// Scenario k is drawn from its own stream derived from (seed, k) and resampled
// until it lasts at least min_steps steps.
inline CascadeDataset generate_dataset(const Topology& topo, const NetworkMeta& meta, const CascadeParams& p) {
    require(p.n_scenarios >= 0, "scenario count must be non-negative");
    require(p.min_steps >= 1, "min_steps must be at least 1");
    CascadeDataset ds;
    ds.q = p.q;
    ds.meta_digest = meta.digest();
    ds.n_nodes = meta.n_nodes();
    for (int k = 0; k < p.n_scenarios; ++k) {
        Rng rng = make_rng(substream(p.seed, static_cast<std::uint64_t>(k)));
        int rejected = 0;
        for (;;) {
            auto sc = simulate_cascade(topo, p.q, p.initial_ratio, p.markovian, rng);
            if (sc.steps() >= p.min_steps) {
                ds.scenarios.push_back(std::move(sc));
                break;
            }
            if (++rejected >= p.max_rejections)
                throw DataError("scenario " + std::to_string(k) + ": " + std::to_string(rejected) +
                                " consecutive cascades ended before " + std::to_string(p.min_steps) +
                                " steps (q = " + std::to_string(p.q) + "); parameters cannot sustain min_steps");
        }
    }
    return ds;
}

}  // namespace icinet
