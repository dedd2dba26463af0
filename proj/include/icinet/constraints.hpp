#pragma once
// Topological constraints of an interdependent infrastructure system.
//
//   (1) every supply node reaches a demand node of its block
//   (2) every demand node is reached from a supply node of its block
//   (3) every transmission node reaches a demand node of its block
//   (4) every transmission node is reached from a supply node of its block
//   (5) every supplier-side node of an interdependency has an edge in it
//   (6) every dependent-side node of an interdependency has an edge in it
//   (7) intra-block edges point from a higher level to a lower level
//   (8) cross-block edges are declared (supplier side -> dependent side) pairs
//   (9) no cycle inside any block or any interdependency
//
// check_constraints_full() evaluates all nine by graph search and is the
// reference oracle. validate_incremental() is the O(1) check used inside the
// sampler after a single toggle of a feasible pair.
//
#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "icinet/network.hpp"

namespace icinet {

struct ConstraintResult {
    bool pass = true;
    std::vector<NodeId> nodes;     // nodes violating a connectivity rule
    std::vector<NodePair> edges;   // edges violating a structural rule
};

struct ConstraintReport {
    std::array<ConstraintResult, 9> results;  // results[k] is constraint (k+1)

    bool valid() const {
        for (const auto& r : results)
            if (!r.pass) return false;
        return true;
    }
    const ConstraintResult& operator[](int constraint) const { return results[static_cast<std::size_t>(constraint - 1)]; }

    std::string summary() const {
        std::string s;
        for (std::size_t k = 0; k < results.size(); ++k) {
            if (results[k].pass) continue;
            s += "(" + std::to_string(k + 1) + ") fails";
            if (!results[k].nodes.empty()) s += " at " + std::to_string(results[k].nodes.size()) + " node(s)";
            if (!results[k].edges.empty()) s += " on " + std::to_string(results[k].edges.size()) + " edge(s)";
            s += "; ";
        }
        return s.empty() ? "all constraints hold" : s;
    }
};

namespace detail {

// Nodes reachable from `seeds` (forward or backward) using only edges whose
// endpoints both satisfy `inside`.
template <class Inside>
std::vector<char> reach(const Topology& topo, std::span<const NodeId> seeds, bool backward, Inside inside) {
    std::vector<char> seen(static_cast<std::size_t>(topo.n_nodes()), 0);
    std::vector<NodeId> stack(seeds.begin(), seeds.end());
    for (NodeId v : seeds) seen[static_cast<std::size_t>(v)] = 1;
    while (!stack.empty()) {
        const NodeId u = stack.back();
        stack.pop_back();
        for (NodeId w : backward ? topo.predecessors(u) : topo.successors(u)) {
            if (seen[static_cast<std::size_t>(w)] || !inside(w)) continue;
            seen[static_cast<std::size_t>(w)] = 1;
            stack.push_back(w);
        }
    }
    return seen;
}

// Kahn's algorithm over the edges accepted by `keep(u, w)`.
template <class Keep>
bool has_cycle(const Topology& topo, Keep keep) {
    const int n = topo.n_nodes();
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId w : topo.successors(u))
            if (keep(u, w)) ++indeg[static_cast<std::size_t>(w)];
    std::vector<NodeId> queue;
    for (NodeId u = 0; u < n; ++u)
        if (indeg[static_cast<std::size_t>(u)] == 0) queue.push_back(u);
    int removed = 0;
    while (!queue.empty()) {
        const NodeId u = queue.back();
        queue.pop_back();
        ++removed;
        for (NodeId w : topo.successors(u))
            if (keep(u, w) && --indeg[static_cast<std::size_t>(w)] == 0) queue.push_back(w);
    }
    return removed != n;
}

inline void fail_node(ConstraintResult& r, NodeId v) {
    r.pass = false;
    r.nodes.push_back(v);
}

inline void fail_edge(ConstraintResult& r, NodePair e) {
    r.pass = false;
    r.edges.push_back(e);
}

}  // namespace detail

// Brute-force evaluation of all nine constraints. Never short-circuits and
// never throws, so the report can serve as a test oracle.
inline ConstraintReport check_constraints_full(const Topology& topo, const NetworkMeta& meta) {
    ConstraintReport rep;
    auto& r = rep.results;

    for (int b = 0; b < meta.n_blocks(); ++b) {
        auto in_block = [&](NodeId v) { return meta.block_of(v) == b; };
        const auto sup = meta.members(b, Level::Supply);
        const auto tra = meta.members(b, Level::Transmission);
        const auto dem = meta.members(b, Level::Demand);

        // Forward reach from each supply and transmission node, backward reach
        // from each demand and transmission node.
        auto reaches_level = [&](NodeId v, Level target, bool backward) {
            const NodeId seed[1] = {v};
            const auto seen = detail::reach(topo, seed, backward, in_block);
            for (NodeId w : meta.members(b, target))
                if (w != v && seen[static_cast<std::size_t>(w)]) return true;
            return false;
        };
        for (NodeId v : sup)
            if (!reaches_level(v, Level::Demand, false)) detail::fail_node(r[0], v);
        for (NodeId v : dem)
            if (!reaches_level(v, Level::Supply, true)) detail::fail_node(r[1], v);
        for (NodeId v : tra)
            if (!reaches_level(v, Level::Demand, false)) detail::fail_node(r[2], v);
        for (NodeId v : tra)
            if (!reaches_level(v, Level::Supply, true)) detail::fail_node(r[3], v);

        if (detail::has_cycle(topo, [&](NodeId u, NodeId w) { return in_block(u) && in_block(w); })) {
            r[8].pass = false;
            for (NodeId v = 0; v < topo.n_nodes(); ++v)
                if (in_block(v)) r[8].nodes.push_back(v);
        }
    }

    for (int k = 0; k < meta.n_interdeps(); ++k) {
        const auto& d = meta.interdep(k);
        auto is_source = [&](NodeId v) { return meta.block_of(v) == d.source_block && meta.level_of(v) == d.source_level; };
        auto is_target = [&](NodeId v) { return meta.block_of(v) == d.target_block && meta.level_of(v) == d.target_level; };
        for (NodeId v : meta.members(d.source_block, d.source_level)) {
            bool ok = false;
            for (NodeId w : topo.successors(v)) ok = ok || is_target(w);
            if (!ok) detail::fail_node(r[4], v);
        }
        for (NodeId v : meta.members(d.target_block, d.target_level)) {
            bool ok = false;
            for (NodeId w : topo.predecessors(v)) ok = ok || is_source(w);
            if (!ok) detail::fail_node(r[5], v);
        }
        // The interdependency's graph: cross-block edges among its two sides.
        auto on_sides = [&](NodeId v) { return is_source(v) || is_target(v); };
        const bool cyclic = detail::has_cycle(topo, [&](NodeId u, NodeId w) {
            return on_sides(u) && on_sides(w) && meta.block_of(u) != meta.block_of(w);
        });
        if (cyclic) {
            r[8].pass = false;
            for (NodeId v = 0; v < topo.n_nodes(); ++v)
                if (on_sides(v)) r[8].nodes.push_back(v);
        }
    }

    for (NodeId i = 0; i < topo.n_nodes(); ++i) {
        for (NodeId j : topo.successors(i)) {
            if (meta.block_of(i) == meta.block_of(j)) {
                if (!intra_level_pair_allowed(meta.level_of(i), meta.level_of(j))) detail::fail_edge(r[6], {i, j});
            } else if (meta.structure_of(i, j) < 0) {
                detail::fail_edge(r[7], {i, j});
            }
        }
    }
    return rep;
}

// Full graph-search check of the connectivity constraints (1)-(6), used as
// the non-incremental validation path inside the sampler. Constraints
// (7)-(9) hold by construction for any topology on the feasible set.
// Multi-source searches make it linear in |V| + |E|; it stops at the first
// violation and reuses its scratch buffers between calls.
class ConnectivityValidator {
public:
    explicit ConnectivityValidator(const NetworkMeta& meta)
        : meta_(&meta), stamp_(static_cast<std::size_t>(meta.n_nodes()), 0) {
        stack_.reserve(static_cast<std::size_t>(meta.n_nodes()));
    }

    bool operator()(const Topology& topo) {
        const auto& meta = *meta_;
        for (int b = 0; b < meta.n_blocks(); ++b) {
            // Forward from every supply node: every transmission and demand node must be hit.
            sweep(topo, b, meta.members(b, Level::Supply), false);
            if (!all_seen(meta.members(b, Level::Transmission)) || !all_seen(meta.members(b, Level::Demand)))
                return false;
            // Backward from every demand node: every supply and transmission node must be hit.
            sweep(topo, b, meta.members(b, Level::Demand), true);
            if (!all_seen(meta.members(b, Level::Supply)) || !all_seen(meta.members(b, Level::Transmission)))
                return false;
        }
        for (int k = 0; k < meta.n_interdeps(); ++k) {
            const auto& d = meta.interdep(k);
            for (NodeId v : meta.members(d.source_block, d.source_level))
                if (!any_in(topo.successors(v), d.target_block, d.target_level)) return false;
            for (NodeId v : meta.members(d.target_block, d.target_level))
                if (!any_in(topo.predecessors(v), d.source_block, d.source_level)) return false;
        }
        return true;
    }

private:
    void sweep(const Topology& topo, int block, std::span<const NodeId> seeds, bool backward) {
        ++epoch_;
        stack_.clear();
        for (NodeId v : seeds) stack_.push_back(v);
        while (!stack_.empty()) {
            const NodeId u = stack_.back();
            stack_.pop_back();
            for (NodeId w : backward ? topo.predecessors(u) : topo.successors(u)) {
                auto& st = stamp_[static_cast<std::size_t>(w)];
                if (st == epoch_ || meta_->block_of(w) != block) continue;
                st = epoch_;
                stack_.push_back(w);
            }
        }
    }

    bool all_seen(std::span<const NodeId> nodes) const {
        for (NodeId v : nodes)
            if (stamp_[static_cast<std::size_t>(v)] != epoch_) return false;
        return true;
    }

    bool any_in(std::span<const NodeId> nodes, int block, Level level) const {
        for (NodeId w : nodes)
            if (meta_->block_of(w) == block && meta_->level_of(w) == level) return true;
        return false;
    }

    const NetworkMeta* meta_;
    std::vector<std::uint32_t> stamp_;
    std::vector<NodeId> stack_;
    std::uint32_t epoch_ = 0;
};

// Post-toggle check for a single feasible pair (i, j), given that the graph
// satisfied all nine constraints before the toggle. Adding a feasible edge can
// never break a constraint; removing one is valid iff i keeps a successor and
// j keeps a predecessor inside the structure (block or interdependency) that
// carried the edge.
inline bool validate_incremental(const Topology& after, NodeId i, NodeId j, ToggleKind kind) {
    if (kind == ToggleKind::Added) return true;
    const int id = after.space().index_of(i, j);
    ensure(id >= 0, "incremental validation of a pair outside the pair space");
    const int s = after.space().structure(id);
    if (s < 0) return true;
    return after.out_degree_in(s, i) > 0 && after.in_degree_in(s, j) > 0;
}

}  // namespace icinet
