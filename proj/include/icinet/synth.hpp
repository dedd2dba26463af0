#pragma once
// Random interdependent infrastructure networks that satisfy all nine
// topological constraints. Construction is backbone + densification:
//
//   1. backbone: give every node the minimum connectivity its role demands
//      (a supply predecessor and demand successor for each transmission node,
//      a successor for each supply node, a predecessor for each demand node,
//      one partner per interdependency side), then prune every edge whose
//      removal keeps the system valid, so the backbone is minimal;
//   2. densification: add each remaining feasible pair independently.
//
#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "icinet/constraints.hpp"
#include "icinet/network.hpp"
#include "icinet/rng.hpp"

namespace icinet {

struct BlockSpec {
    std::string name;
    int n_supply = 0;
    int n_transmission = 0;
    int n_demand = 0;
};

struct InterdepDecl {
    std::string source_block;
    Level source_level = Level::Demand;
    std::string target_block;
    Level target_level = Level::Supply;
};

struct GenConfig {
    std::vector<BlockSpec> blocks;
    std::vector<InterdepDecl> interdeps;
    double intra_density = 0.1;
    double interdep_density = 0.0;
    std::uint64_t seed = 0;

    // Water, power and gas, each with 2 supply, 3 transmission and 5 demand
    // facilities. Power feeds water pumping and gas extraction; water cooling
    // and gas fuel feed power generation.
    static GenConfig reference_system(std::uint64_t seed = 0) {
        GenConfig c;
        c.blocks = {{"water", 2, 3, 5}, {"power", 2, 3, 5}, {"gas", 2, 3, 5}};
        c.interdeps = {{"power", Level::Demand, "water", Level::Supply},
                       {"water", Level::Demand, "power", Level::Supply},
                       {"power", Level::Demand, "gas", Level::Supply},
                       {"gas", Level::Demand, "power", Level::Supply}};
        c.seed = seed;
        return c;
    }
};

// Labels for a configuration: nodes are numbered block by block, supply
// first, then transmission, then demand.
inline NetworkMeta make_meta(const GenConfig& config) {
    require(!config.blocks.empty(), "generator config needs at least one block");
    std::vector<std::string> names;
    std::vector<NodeInfo> nodes;
    for (std::size_t b = 0; b < config.blocks.size(); ++b) {
        const auto& spec = config.blocks[b];
        require(spec.n_supply >= 0 && spec.n_transmission >= 0 && spec.n_demand >= 0,
                "negative node count in block '" + spec.name + "'");
        names.push_back(spec.name);
        const std::pair<Level, int> levels[] = {
            {Level::Supply, spec.n_supply}, {Level::Transmission, spec.n_transmission}, {Level::Demand, spec.n_demand}};
        for (auto [level, count] : levels)
            for (int k = 0; k < count; ++k)
                nodes.push_back({spec.name + "_" + std::string(1, to_string(level)[0]) + std::to_string(k),
                                 static_cast<int>(b), level});
    }
    std::vector<InterdepSpec> deps;
    for (const auto& d : config.interdeps) {
        auto find = [&](const std::string& n) {
            for (std::size_t b = 0; b < names.size(); ++b)
                if (names[b] == n) return static_cast<int>(b);
            throw DataError("interdependency references unknown block '" + n + "'");
        };
        deps.push_back({find(d.source_block), d.source_level, find(d.target_block), d.target_level});
    }
    return NetworkMeta(std::move(names), std::move(nodes), std::move(deps));
}

namespace detail {

template <class Pool>
NodeId pick(Rng& rng, const Pool& pool) {
    return pool[uniform_index<std::size_t>(rng, pool.size())];
}

inline void add_if_absent(Topology& topo, NodeId i, NodeId j) {
    if (!topo.has_edge(i, j)) topo.toggle(i, j);
}

}  // namespace detail

// Adds edges until constraints (1)-(6) hold, touching only nodes whose
// required connectivity is missing. Assumes (7)-(9) already hold, i.e. the
// topology lives on the feasible set.
inline void repair_backbone(Topology& topo, const NetworkMeta& meta, Rng& rng) {
    for (int b = 0; b < meta.n_blocks(); ++b) {
        const auto sup = meta.members(b, Level::Supply);
        const auto tra = meta.members(b, Level::Transmission);
        const auto dem = meta.members(b, Level::Demand);
        for (NodeId t : tra)
            if (topo.in_degree_in(b, t) == 0) detail::add_if_absent(topo, detail::pick(rng, sup), t);
        for (NodeId t : tra)
            if (topo.out_degree_in(b, t) == 0) detail::add_if_absent(topo, t, detail::pick(rng, dem));
        std::vector<NodeId> below_supply(tra.begin(), tra.end());
        below_supply.insert(below_supply.end(), dem.begin(), dem.end());
        for (NodeId s : sup)
            if (topo.out_degree_in(b, s) == 0) detail::add_if_absent(topo, s, detail::pick(rng, below_supply));
        std::vector<NodeId> above_demand(sup.begin(), sup.end());
        above_demand.insert(above_demand.end(), tra.begin(), tra.end());
        for (NodeId d : dem)
            if (topo.in_degree_in(b, d) == 0) detail::add_if_absent(topo, detail::pick(rng, above_demand), d);
    }
    for (int k = 0; k < meta.n_interdeps(); ++k) {
        const int s = meta.n_blocks() + k;
        const auto& d = meta.interdep(k);
        const auto src = meta.members(d.source_block, d.source_level);
        const auto dst = meta.members(d.target_block, d.target_level);
        for (NodeId v : src)
            if (topo.out_degree_in(s, v) == 0) detail::add_if_absent(topo, v, detail::pick(rng, dst));
        for (NodeId v : dst)
            if (topo.in_degree_in(s, v) == 0) detail::add_if_absent(topo, detail::pick(rng, src), v);
    }
}

// Removes, in random order, every edge whose removal keeps (1)-(6).
inline void prune_redundant(Topology& topo, Rng& rng) {
    std::vector<int> ids;
    for (int k = 0; k < topo.edge_count(); ++k) ids.push_back(topo.edge_pair_at(k));
    std::sort(ids.begin(), ids.end());
    std::shuffle(ids.begin(), ids.end(), rng);
    for (int id : ids) {
        const int s = topo.space().structure(id);
        const auto [i, j] = topo.space().pair(id);
        if (s >= 0 && topo.out_degree_in(s, i) >= 2 && topo.in_degree_in(s, j) >= 2) topo.toggle_pair(id);
    }
}

struct GeneratedNetwork {
    NetworkMeta meta;
    std::shared_ptr<const FeasibleSet> feasible;
    Topology topology;
};

inline GeneratedNetwork generate_icin(const GenConfig& config) {
    require(config.intra_density >= 0.0 && config.intra_density <= 1.0, "intra_density must lie in [0,1]");
    require(config.interdep_density >= 0.0 && config.interdep_density <= 1.0, "interdep_density must lie in [0,1]");
    GeneratedNetwork out{make_meta(config), nullptr, {}};
    out.feasible = std::make_shared<const FeasibleSet>(build_feasible_set(out.meta));
    out.topology = Topology(out.feasible);

    Rng rng = make_rng(config.seed);
    repair_backbone(out.topology, out.meta, rng);
    prune_redundant(out.topology, rng);

    const int n_blocks = out.meta.n_blocks();
    for (int id = 0; id < out.feasible->size(); ++id) {
        const double p = out.feasible->structure(id) < n_blocks ? config.intra_density : config.interdep_density;
        // One draw per pair keeps the stream layout independent of the backbone.
        const double u = uniform01(rng);
        if (!out.topology.has_pair(id) && u < p) out.topology.toggle_pair(id);
    }
    ensure(check_constraints_full(out.topology, out.meta).valid(), "generator produced an invalid network");
    return out;
}

}  // namespace icinet
