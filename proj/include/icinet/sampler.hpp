#pragma once
// Metropolis-Hastings over graph topologies.
//
// Each iteration proposes one pair of the pair space, toggles it, validates
// the result against the connectivity constraints (infrastructure-dependent
// proposal only), and accepts with probability
//     min(1, P(C|A') P(A') Q(A|A') / (P(C|A) P(A) Q(A'|A))).
// A constraint violation undoes the toggle and counts as a rejection.
//
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "icinet/cascade.hpp"
#include "icinet/constraints.hpp"
#include "icinet/likelihood.hpp"
#include "icinet/network.hpp"
#include "icinet/prior.hpp"
#include "icinet/rng.hpp"
#include "icinet/synth.hpp"

namespace icinet {

enum class SamplerKind { TNT, Random };
enum class ProposalKind { InfrastructureDependent, Unconstrained };
enum class RecordMode { Standard, AcceptedOnly };
enum class ValidationKind { Incremental, Full, None };

struct SamplerConfig {
    int n_samples = 3000;  // total iterations (Standard) or accepted proposals (AcceptedOnly)
    int n_warmup = 2000;   // leading samples discarded
    SamplerKind sampler = SamplerKind::TNT;
    ProposalKind proposal = ProposalKind::InfrastructureDependent;
    RecordMode record_mode = RecordMode::Standard;
    LikelihoodKind likelihood = LikelihoodKind::EdgeList;
    ValidationKind validation = ValidationKind::Incremental;
    double q = 0.4;
    bool markovian = true;
    std::uint64_t seed = 0;
    int thinning = 1;
    // Recompute prior and likelihood from scratch every k accepted moves and
    // compare with the cached values; 0 disables the check.
    int cache_check_every = 0;
    // AcceptedOnly safety cap on raw iterations; 0 means 1000 * n_samples.
    std::int64_t max_iterations = 0;

    void validate() const {
        require(n_samples > 0, "n_samples must be positive");
        require(n_warmup >= 0 && n_warmup < n_samples, "n_warmup must lie in [0, n_samples)");
        require(q > 0.0 && q <= 1.0, "q must lie in (0,1]");
        require(thinning >= 1, "thinning must be at least 1");
        require(proposal == ProposalKind::InfrastructureDependent || validation == ValidationKind::None,
                "the unconstrained proposal carries no constraint system; use validation 'none'");
    }
};

struct LogScore {
    double log_prior = 0.0;
    double log_likelihood = 0.0;
};

struct ChainState {
    Topology topology;
    LogScore score;
};

struct Proposal {
    int pair_id = -1;
    double log_q_forward = 0.0;
    double log_q_backward = 0.0;
};

namespace detail {

inline double removal_side(int n_edges, int n_non_edges) {
    if (n_edges == 0) return 0.0;
    return n_non_edges == 0 ? 1.0 : 0.5;
}

inline double addition_side(int n_edges, int n_non_edges) {
    if (n_non_edges == 0) return 0.0;
    return n_edges == 0 ? 1.0 : 0.5;
}

}  // namespace detail

// Random: uniform over the pair space (symmetric). TNT: with probability 1/2
// a uniform current edge (removal), otherwise a uniform non-edge (addition);
// the backward probability is evaluated on the post-toggle edge counts.
inline Proposal propose(const Topology& topo, SamplerKind kind, Rng& rng) {
    const int n_pairs = topo.space().size();
    require(n_pairs > 0, "cannot propose from an empty pair space");
    if (kind == SamplerKind::Random) {
        const int id = uniform_index<int>(rng, n_pairs);
        const double lq = -std::log(static_cast<double>(n_pairs));
        return {id, lq, lq};
    }
    const int e = topo.edge_count();
    const int ne = topo.non_edge_count();
    const double p_remove = detail::removal_side(e, ne);
    const bool remove = p_remove == 1.0 || (p_remove > 0.0 && uniform01(rng) < p_remove);
    if (remove) {
        const int id = topo.edge_pair_at(uniform_index<int>(rng, e));
        return {id, std::log(p_remove / e), std::log(detail::addition_side(e - 1, ne + 1) / (ne + 1))};
    }
    const int id = topo.non_edge_pair_at(uniform_index<int>(rng, ne));
    return {id, std::log(detail::addition_side(e, ne) / ne), std::log(detail::removal_side(e + 1, ne - 1) / (e + 1))};
}

// log of min(1, gamma).
inline double acceptance_log_ratio(const LogScore& current, const LogScore& candidate, double log_q_forward,
                                   double log_q_backward) {
    if (candidate.log_likelihood == kNegInf) return kNegInf;
    if (current.log_likelihood == kNegInf) return 0.0;
    const double r = (candidate.log_likelihood + candidate.log_prior - current.log_likelihood - current.log_prior) +
                     (log_q_backward - log_q_forward);
    ensure(!std::isnan(r), "acceptance ratio is NaN (corrupted cached log values)");
    return r < 0.0 ? r : 0.0;
}

// Pair space the chain moves in.
inline std::shared_ptr<const FeasibleSet> pair_space_for(ProposalKind kind, const NetworkMeta& meta,
                                                         std::shared_ptr<const FeasibleSet> feasible) {
    if (kind == ProposalKind::Unconstrained) return std::make_shared<const FeasibleSet>(FeasibleSet::all_pairs(meta));
    return feasible;
}

// Initial topology: link every node failing at t to every node failing at
// t+1 (where the pair space allows), restore the connectivity constraints,
// then make sure every observed failure has at least one active failed
// in-neighbour, adding the lowest-id explaining edge if needed.
inline Topology init_topology(const CascadeDataset& data, const NetworkMeta& meta,
                              std::shared_ptr<const FeasibleSet> space, bool markovian, Rng& rng) {
    require(!data.empty(), "cannot initialise from an empty dataset");
    Topology topo(space);
    for (const auto& sc : data.scenarios) {
        require(sc.n_nodes() == meta.n_nodes(), "dataset node count does not match the network");
        for (int t = 1; t < sc.steps(); ++t)
            for (NodeId i : sc.newly_failed(t))
                for (NodeId j : sc.newly_failed(t + 1))
                    if (space->contains(i, j) && !topo.has_edge(i, j)) topo.toggle(i, j);
    }
    if (space->constrained()) repair_backbone(topo, meta, rng);

    for (const auto& sc : data.scenarios) {
        for (int t = 1; t < sc.steps(); ++t) {
            for (NodeId j : sc.newly_failed(t + 1)) {
                bool explained = false;
                NodeId candidate = -1;
                for (NodeId k : topo.predecessors(j)) explained = explained || detail::active_at(sc, k, t, markovian);
                if (explained) continue;
                for (NodeId k = 0; k < meta.n_nodes() && candidate < 0; ++k)
                    if (detail::active_at(sc, k, t, markovian) && space->contains(k, j)) candidate = k;
                if (candidate < 0)
                    throw DataError("failure of node " + std::to_string(j) + " at step " + std::to_string(t + 1) +
                                    " cannot be explained by any feasible edge (data inconsistent with constraints)");
                topo.toggle(candidate, j);
            }
        }
    }
    if (space->constrained())
        ensure(check_constraints_full(topo, meta).valid(), "initial topology violates the constraints");
    return topo;
}

struct TraceRow {
    std::int64_t iteration = 0;
    double average_degree = 0.0;
    double log_likelihood = 0.0;
    double log_prior = 0.0;
};

struct PosteriorSamples {
    int n_nodes = 0;
    std::vector<std::int64_t> edge_counts;  // row-major n_nodes x n_nodes
    std::int64_t n_recorded = 0;
    std::vector<TraceRow> trace;

    std::int64_t count(NodeId i, NodeId j) const {
        return edge_counts[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_nodes) + static_cast<std::size_t>(j)];
    }
};

struct ChainStats {
    std::int64_t iterations = 0;
    std::int64_t accepted = 0;
    std::int64_t constraint_rejections = 0;
    std::int64_t likelihood_rejections = 0;
    std::int64_t likelihood_evaluations = 0;
    bool truncated = false;  // AcceptedOnly hit the iteration cap
    double seconds = 0.0;
};

struct ChainResult {
    PosteriorSamples samples;
    ChainStats stats;
    Topology initial;
    Topology final_state;
};

struct ChainObserver {
    // Called after every iteration with the (possibly unchanged) current state.
    std::function<void(const Topology&, bool accepted)> on_iteration;
};

inline ChainResult run_chain(const NetworkMeta& meta, std::shared_ptr<const FeasibleSet> feasible,
                             const CascadeDataset& data, const HsbmPrior& prior, const SamplerConfig& config,
                             const ChainObserver& observer = {}) {
    config.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto space = pair_space_for(config.proposal, meta, std::move(feasible));
    require(!space->empty(), "pair space is empty");
    const PairPrior pair_prior(meta, *space, prior);
    for (const auto& sc : data.scenarios)
        require(sc.n_nodes() == meta.n_nodes(), "dataset node count does not match the network");

    Rng init_rng = make_rng(substream(config.seed, "init"));
    Rng rng = make_rng(substream(config.seed, "chain"));

    EdgeListLikelihood edgelist(meta.n_nodes(), config.q, config.markovian);
    auto likelihood = [&](const Topology& t) {
        return config.likelihood == LikelihoodKind::Naive ? log_likelihood_naive(t, data, config.q, config.markovian)
                                                          : edgelist(t, data);
    };

    ChainResult result;
    ChainState state{data.empty() ? Topology(space) : init_topology(data, meta, space, config.markovian, init_rng), {}};
    if (data.empty() && space->constrained()) repair_backbone(state.topology, meta, init_rng);
    state.score = {pair_prior.evaluate(state.topology), likelihood(state.topology)};
    require(state.score.log_likelihood != kNegInf, "initial topology has zero likelihood under q = " +
                                                       std::to_string(config.q));
    result.initial = state.topology;

    auto& samples = result.samples;
    const int n = meta.n_nodes();
    samples.n_nodes = n;
    samples.edge_counts.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
    auto record = [&](std::int64_t iteration) {
        const auto& topo = state.topology;
        for (int k = 0; k < topo.edge_count(); ++k) {
            const auto [i, j] = topo.space().pair(topo.edge_pair_at(k));
            ++samples.edge_counts[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
        }
        ++samples.n_recorded;
        samples.trace.push_back({iteration, static_cast<double>(topo.edge_count()) / n, state.score.log_likelihood,
                                 state.score.log_prior});
    };

    auto& stats = result.stats;
    ConnectivityValidator full_validator(meta);
    auto step = [&]() -> bool {
        auto& topo = state.topology;
        const Proposal prop = propose(topo, config.sampler, rng);
        const auto [i, j] = topo.space().pair(prop.pair_id);
        const ToggleKind kind = topo.toggle_pair(prop.pair_id);

        bool valid = true;
        switch (config.validation) {
            case ValidationKind::Incremental: valid = validate_incremental(topo, i, j, kind); break;
            case ValidationKind::Full: valid = full_validator(topo); break;
            case ValidationKind::None: break;
        }
        if (!valid) {
            topo.toggle_pair(prop.pair_id);
            ++stats.constraint_rejections;
            return false;
        }
        const LogScore candidate{state.score.log_prior + pair_prior.delta(prop.pair_id, kind), likelihood(topo)};
        ++stats.likelihood_evaluations;
        const double log_alpha = acceptance_log_ratio(state.score, candidate, prop.log_q_forward, prop.log_q_backward);
        if (log_alpha == 0.0 || std::log(uniform01(rng)) < log_alpha) {
            state.score = candidate;
            ++stats.accepted;
            if (config.cache_check_every > 0 && stats.accepted % config.cache_check_every == 0) {
                const double lp = pair_prior.evaluate(topo);
                const double ll = likelihood(topo);
                auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); };
                ensure(close(state.score.log_prior, lp) && close(state.score.log_likelihood, ll),
                       "cached log values drifted from recomputation");
            }
            return true;
        }
        topo.toggle_pair(prop.pair_id);
        ++stats.likelihood_rejections;
        return false;
    };

    if (config.record_mode == RecordMode::Standard) {
        for (std::int64_t it = 0; it < config.n_samples; ++it) {
            const bool accepted = step();
            ++stats.iterations;
            if (observer.on_iteration) observer.on_iteration(state.topology, accepted);
            if (it >= config.n_warmup && (it - config.n_warmup) % config.thinning == 0) record(it);
        }
    } else {
        const std::int64_t cap = config.max_iterations > 0 ? config.max_iterations
                                                           : std::int64_t{1000} * config.n_samples;
        std::int64_t n_accepted = 0;
        while (n_accepted < config.n_samples) {
            if (stats.iterations >= cap) {
                stats.truncated = true;
                break;
            }
            const bool accepted = step();
            ++stats.iterations;
            if (observer.on_iteration) observer.on_iteration(state.topology, accepted);
            if (!accepted) continue;
            ++n_accepted;
            const std::int64_t k = n_accepted - 1;  // 0-based index of the accepted sample
            if (k >= config.n_warmup && (k - config.n_warmup) % config.thinning == 0) record(stats.iterations - 1);
        }
    }
    result.final_state = state.topology;
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace icinet
