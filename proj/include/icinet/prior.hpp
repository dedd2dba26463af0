#pragma once
// Hierarchical stochastic block model prior over adjacency matrices.
//
// The edge probability of a pair depends only on the block and level labels
// of its endpoints, p_ij = g(b_i, b_j, l_i, l_j). The log prior of a topology
// is a sum over the pairs of its pair space of log p (edge) or log(1 - p)
// (non-edge); pairs outside the pair space are structurally absent and
// contribute nothing.
//
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "icinet/network.hpp"

namespace icinet {

struct PairClass {
    int from_block = 0;
    int to_block = 0;
    Level from_level = Level::Supply;
    Level to_level = Level::Demand;
    auto operator<=>(const PairClass&) const = default;
};

struct HsbmPrior {
    std::map<PairClass, double> table;
    double default_feasible = 0.5;  // flat prior unless the table says otherwise
    double off_class = 0.5;         // pairs outside the feasible set (unconstrained proposal only)

    double probability(const NetworkMeta& meta, NodeId i, NodeId j) const {
        if (meta.structure_of(i, j) < 0) return off_class;
        const PairClass c{meta.block_of(i), meta.block_of(j), meta.level_of(i), meta.level_of(j)};
        if (auto it = table.find(c); it != table.end()) return it->second;
        return default_feasible;
    }
};

// Per-pair log p and log(1 - p) over a pair space, checked at construction.
class PairPrior {
public:
    PairPrior() = default;

    PairPrior(const NetworkMeta& meta, const FeasibleSet& space, const HsbmPrior& prior) {
        log_on_.reserve(static_cast<std::size_t>(space.size()));
        log_off_.reserve(static_cast<std::size_t>(space.size()));
        for (const auto& [i, j] : space.pairs()) {
            const double p = prior.probability(meta, i, j);
            require(p > 0.0 && p < 1.0, "prior probability " + std::to_string(p) + " of pair (" + std::to_string(i) +
                                            "," + std::to_string(j) + ") must lie strictly inside (0,1)");
            log_on_.push_back(std::log(p));
            log_off_.push_back(std::log1p(-p));
        }
    }

    double log_on(int pair_id) const { return log_on_[static_cast<std::size_t>(pair_id)]; }
    double log_off(int pair_id) const { return log_off_[static_cast<std::size_t>(pair_id)]; }

    // Change in log prior caused by toggling pair_id with the given outcome.
    double delta(int pair_id, ToggleKind kind) const {
        const double d = log_on(pair_id) - log_off(pair_id);
        return kind == ToggleKind::Added ? d : -d;
    }

    double evaluate(const Topology& topo) const {
        double s = 0.0;
        for (int id = 0; id < topo.space().size(); ++id) s += topo.has_pair(id) ? log_on(id) : log_off(id);
        return s;
    }

private:
    std::vector<double> log_on_;
    std::vector<double> log_off_;
};

inline double hsbm_log_prior(const Topology& topo, const NetworkMeta& meta, const HsbmPrior& prior) {
    return PairPrior(meta, topo.space(), prior).evaluate(topo);
}

}  // namespace icinet
