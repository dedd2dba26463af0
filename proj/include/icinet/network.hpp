#pragma once
// Multilayer infrastructure network model.
//
// A system is a set of blocks (one per infrastructure: water, power, gas...)
// whose nodes carry a level label (supply, transmission, demand), plus a set of
// declared interdependencies between a (block, level) supplier side and a
// (block, level) dependent side. Edges are directed and only ever point from a
// higher level to a lower one inside a block, or from supplier to dependent
// across blocks.
//
// Every node pair that may carry an edge belongs to exactly one "structure":
// structure b < n_blocks() is the intra-block graph of block b, and structure
// n_blocks() + k is the edge set of interdependency k. Connectivity rules are
// evaluated per structure.
//
#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "icinet/error.hpp"
#include "icinet/rng.hpp"

namespace icinet {

using NodeId = std::int32_t;

// Declared so that Supply > Transmission > Demand.
enum class Level : std::uint8_t { Demand = 0, Transmission = 1, Supply = 2 };

inline constexpr std::array<Level, 3> kLevels{Level::Supply, Level::Transmission, Level::Demand};

inline std::string_view to_string(Level l) {
    switch (l) {
        case Level::Supply: return "supply";
        case Level::Transmission: return "transmission";
        case Level::Demand: return "demand";
    }
    return "?";
}

inline Level parse_level(std::string_view s) {
    if (s == "supply" || s == "s") return Level::Supply;
    if (s == "transmission" || s == "t") return Level::Transmission;
    if (s == "demand" || s == "d") return Level::Demand;
    throw DataError("unknown level '" + std::string(s) + "' (expected supply|transmission|demand)");
}

// Intra-block pairs allowed to carry an edge: (S,T), (T,D), (S,D).
inline constexpr bool intra_level_pair_allowed(Level from, Level to) {
    return from > to;
}

struct NodePair {
    NodeId from = 0;
    NodeId to = 0;
    auto operator<=>(const NodePair&) const = default;
};

struct NodeInfo {
    std::string name;
    int block = 0;
    Level level = Level::Supply;
};

struct InterdepSpec {
    int source_block = 0;
    Level source_level = Level::Demand;
    int target_block = 0;
    Level target_level = Level::Supply;
    bool operator==(const InterdepSpec&) const = default;
};

// ---------------------------------------------------------------------------
// NetworkMeta: node roster with block/level labels and interdependencies.
// Immutable after construction.
// ---------------------------------------------------------------------------
class NetworkMeta {
public:
    NetworkMeta() = default;

    // Node i of `nodes` gets id i. Throws DataError when the system cannot
    // possibly satisfy the connectivity rules.
    NetworkMeta(std::vector<std::string> block_names, std::vector<NodeInfo> nodes,
                std::vector<InterdepSpec> interdeps)
        : block_names_(std::move(block_names)), nodes_(std::move(nodes)), interdeps_(std::move(interdeps)) {
        const int nb = n_blocks();
        require(nb > 0, "network has no blocks");
        for (std::size_t a = 0; a < block_names_.size(); ++a)
            for (std::size_t b = a + 1; b < block_names_.size(); ++b)
                require(block_names_[a] != block_names_[b], "duplicate block name '" + block_names_[a] + "'");
        members_.assign(static_cast<std::size_t>(nb) * 3, {});
        for (NodeId i = 0; i < n_nodes(); ++i) {
            const auto& n = nodes_[static_cast<std::size_t>(i)];
            require(n.block >= 0 && n.block < nb, "node " + std::to_string(i) + " references unknown block");
            members_[slot(n.block, n.level)].push_back(i);
        }
        for (int b = 0; b < nb; ++b) {
            const bool any = !members(b, Level::Supply).empty() || !members(b, Level::Transmission).empty() ||
                             !members(b, Level::Demand).empty();
            if (!any) continue;
            require(!members(b, Level::Supply).empty() && !members(b, Level::Demand).empty(),
                    "block '" + block_names_[static_cast<std::size_t>(b)] +
                        "' needs at least one supply and one demand node");
        }
        for (std::size_t k = 0; k < interdeps_.size(); ++k) {
            const auto& d = interdeps_[k];
            require(d.source_block >= 0 && d.source_block < nb && d.target_block >= 0 && d.target_block < nb,
                    "interdependency " + std::to_string(k) + " references unknown block");
            require(d.source_block != d.target_block,
                    "interdependency " + std::to_string(k) + " must connect two different blocks");
            require(!members(d.source_block, d.source_level).empty() &&
                        !members(d.target_block, d.target_level).empty(),
                    "interdependency " + std::to_string(k) + " is declared over an empty level set");
            for (std::size_t m = 0; m < k; ++m)
                require(!(interdeps_[m] == d), "duplicate interdependency " + std::to_string(k));
        }
    }

    int n_nodes() const { return static_cast<int>(nodes_.size()); }
    int n_blocks() const { return static_cast<int>(block_names_.size()); }
    int n_interdeps() const { return static_cast<int>(interdeps_.size()); }
    int n_structures() const { return n_blocks() + n_interdeps(); }

    const NodeInfo& node(NodeId i) const { return nodes_[static_cast<std::size_t>(i)]; }
    int block_of(NodeId i) const { return node(i).block; }
    Level level_of(NodeId i) const { return node(i).level; }
    const std::vector<NodeInfo>& nodes() const { return nodes_; }
    const std::vector<std::string>& block_names() const { return block_names_; }
    const std::vector<InterdepSpec>& interdeps() const { return interdeps_; }
    const InterdepSpec& interdep(int k) const { return interdeps_[static_cast<std::size_t>(k)]; }

    // Sorted node ids of one (block, level) class.
    std::span<const NodeId> members(int block, Level level) const { return members_[slot(block, level)]; }

    int block_index(std::string_view name) const {
        for (int b = 0; b < n_blocks(); ++b)
            if (block_names_[static_cast<std::size_t>(b)] == name) return b;
        return -1;
    }

    // Structure id of the relation that would carry edge (i, j), or -1.
    int structure_of(NodeId i, NodeId j) const {
        if (i == j) return -1;
        const auto& a = node(i);
        const auto& b = node(j);
        if (a.block == b.block) return intra_level_pair_allowed(a.level, b.level) ? a.block : -1;
        for (int k = 0; k < n_interdeps(); ++k) {
            const auto& d = interdep(k);
            if (d.source_block == a.block && d.source_level == a.level && d.target_block == b.block &&
                d.target_level == b.level)
                return n_blocks() + k;
        }
        return -1;
    }

    // Stable 64-bit digest of labels and interdependencies, rendered as hex.
    std::string digest() const {
        std::string canon;
        for (const auto& b : block_names_) canon += "B" + b + ";";
        for (const auto& n : nodes_)
            canon += "N" + std::to_string(n.block) + ":" + std::string(to_string(n.level)) + ";";
        for (const auto& d : interdeps_)
            canon += "I" + std::to_string(d.source_block) + ":" + std::string(to_string(d.source_level)) + ">" +
                     std::to_string(d.target_block) + ":" + std::string(to_string(d.target_level)) + ";";
        static constexpr char hex[] = "0123456789abcdef";
        std::uint64_t h = fnv1a64(canon);
        std::string out(16, '0');
        for (int k = 15; k >= 0; --k, h >>= 4) out[static_cast<std::size_t>(k)] = hex[h & 0xf];
        return out;
    }

private:
    static std::size_t slot(int block, Level level) {
        return static_cast<std::size_t>(block) * 3 + static_cast<std::size_t>(level);
    }

    std::vector<std::string> block_names_;
    std::vector<NodeInfo> nodes_;
    std::vector<InterdepSpec> interdeps_;
    std::vector<std::vector<NodeId>> members_;
};

// ---------------------------------------------------------------------------
// FeasibleSet: the node pairs a proposal may toggle, with O(1) membership.
// ---------------------------------------------------------------------------
class FeasibleSet {
public:
    FeasibleSet() = default;

    // Pairs allowed by the level ordering and the declared interdependencies,
    // in lexicographic (from, to) order.
    static FeasibleSet build(const NetworkMeta& meta) {
        FeasibleSet fs(meta.n_nodes(), meta.n_structures(), true);
        for (NodeId i = 0; i < meta.n_nodes(); ++i)
            for (NodeId j = 0; j < meta.n_nodes(); ++j)
                if (int s = meta.structure_of(i, j); s >= 0) fs.add(i, j, s);
        return fs;
    }

    // Every ordered pair i != j. Pairs outside the constrained set keep
    // structure -1; used by the unconstrained proposal.
    static FeasibleSet all_pairs(const NetworkMeta& meta) {
        FeasibleSet fs(meta.n_nodes(), meta.n_structures(), false);
        for (NodeId i = 0; i < meta.n_nodes(); ++i)
            for (NodeId j = 0; j < meta.n_nodes(); ++j)
                if (i != j) fs.add(i, j, meta.structure_of(i, j));
        return fs;
    }

    int n_nodes() const { return n_; }
    int n_structures() const { return n_structures_; }
    // True when this is the infrastructure-constrained pair set.
    bool constrained() const { return constrained_; }
    int size() const { return static_cast<int>(pairs_.size()); }
    bool empty() const { return pairs_.empty(); }

    const NodePair& pair(int id) const { return pairs_[static_cast<std::size_t>(id)]; }
    std::span<const NodePair> pairs() const { return pairs_; }
    int structure(int id) const { return structure_[static_cast<std::size_t>(id)]; }

    int index_of(NodeId i, NodeId j) const {
        if (i < 0 || j < 0 || i >= n_ || j >= n_) return -1;
        return index_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)];
    }
    bool contains(NodeId i, NodeId j) const { return index_of(i, j) >= 0; }

private:
    FeasibleSet(int n, int n_structures, bool constrained)
        : n_(n), n_structures_(n_structures), constrained_(constrained),
          index_(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), -1) {}

    void add(NodeId i, NodeId j, int s) {
        index_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j)] = size();
        pairs_.push_back({i, j});
        structure_.push_back(s);
    }

    int n_ = 0;
    int n_structures_ = 0;
    bool constrained_ = false;
    std::vector<NodePair> pairs_;
    std::vector<int> structure_;
    std::vector<std::int32_t> index_;
};

inline FeasibleSet build_feasible_set(const NetworkMeta& meta) { return FeasibleSet::build(meta); }

enum class ToggleKind { Added, Removed };

// ---------------------------------------------------------------------------
// Topology: directed graph over a fixed pair space.
//
// Keeps sorted successor and predecessor lists, per-structure degree counters
// for O(1) incremental validation, and a partition of the pair ids into
// edges | non-edges so that either side can be sampled uniformly in O(1).
// ---------------------------------------------------------------------------
class Topology {
public:
    Topology() = default;

    explicit Topology(std::shared_ptr<const FeasibleSet> space)
        : space_(std::move(space)),
          forward_(static_cast<std::size_t>(space_->n_nodes())),
          reverse_(static_cast<std::size_t>(space_->n_nodes())),
          out_struct_(static_cast<std::size_t>(space_->n_structures() * space_->n_nodes()), 0),
          in_struct_(out_struct_.size(), 0),
          order_(static_cast<std::size_t>(space_->size())),
          position_(order_.size()) {
        for (int k = 0; k < space_->size(); ++k) {
            order_[static_cast<std::size_t>(k)] = k;
            position_[static_cast<std::size_t>(k)] = k;
        }
    }

    Topology(std::shared_ptr<const FeasibleSet> space, std::span<const NodePair> edges) : Topology(std::move(space)) {
        for (const auto& e : edges) {
            require(space_->contains(e.from, e.to), "edge (" + std::to_string(e.from) + "," + std::to_string(e.to) +
                                                          ") lies outside the pair space");
            if (!has_edge(e.from, e.to)) toggle(e.from, e.to);
        }
    }

    const FeasibleSet& space() const { return *space_; }
    const std::shared_ptr<const FeasibleSet>& space_ptr() const { return space_; }

    int n_nodes() const { return static_cast<int>(forward_.size()); }
    int edge_count() const { return n_edges_; }
    int non_edge_count() const { return space_->size() - n_edges_; }

    std::span<const NodeId> successors(NodeId i) const { return forward_[static_cast<std::size_t>(i)]; }
    std::span<const NodeId> predecessors(NodeId j) const { return reverse_[static_cast<std::size_t>(j)]; }

    bool has_pair(int pair_id) const { return position_[static_cast<std::size_t>(pair_id)] < n_edges_; }
    bool has_edge(NodeId i, NodeId j) const {
        const int id = space_->index_of(i, j);
        return id >= 0 && has_pair(id);
    }

    int out_degree_in(int structure, NodeId i) const { return out_struct_[slot(structure, i)]; }
    int in_degree_in(int structure, NodeId j) const { return in_struct_[slot(structure, j)]; }

    // k-th current edge / non-edge, k in [0, edge_count()) / [0, non_edge_count()).
    int edge_pair_at(int k) const { return order_[static_cast<std::size_t>(k)]; }
    int non_edge_pair_at(int k) const { return order_[static_cast<std::size_t>(n_edges_ + k)]; }

    ToggleKind toggle_pair(int id) {
        ensure(id >= 0 && id < space_->size(), "toggle of a pair id outside the pair space");
        const auto [i, j] = space_->pair(id);
        const int s = space_->structure(id);
        auto& succ = forward_[static_cast<std::size_t>(i)];
        auto& pred = reverse_[static_cast<std::size_t>(j)];
        const int pos = position_[static_cast<std::size_t>(id)];
        if (pos < n_edges_) {
            succ.erase(std::lower_bound(succ.begin(), succ.end(), j));
            pred.erase(std::lower_bound(pred.begin(), pred.end(), i));
            if (s >= 0) {
                --out_struct_[slot(s, i)];
                --in_struct_[slot(s, j)];
            }
            swap_slots(pos, n_edges_ - 1);
            --n_edges_;
            return ToggleKind::Removed;
        }
        succ.insert(std::lower_bound(succ.begin(), succ.end(), j), j);
        pred.insert(std::lower_bound(pred.begin(), pred.end(), i), i);
        if (s >= 0) {
            ++out_struct_[slot(s, i)];
            ++in_struct_[slot(s, j)];
        }
        swap_slots(pos, n_edges_);
        ++n_edges_;
        return ToggleKind::Added;
    }

    ToggleKind toggle(NodeId i, NodeId j) {
        const int id = space_->index_of(i, j);
        ensure(id >= 0, "toggle of pair (" + std::to_string(i) + "," + std::to_string(j) +
                            ") outside the feasible set");
        return toggle_pair(id);
    }

    // Edge list in lexicographic order.
    std::vector<NodePair> edges() const {
        std::vector<NodePair> out;
        out.reserve(static_cast<std::size_t>(n_edges_));
        for (NodeId i = 0; i < n_nodes(); ++i)
            for (NodeId j : successors(i)) out.push_back({i, j});
        return out;
    }

    // Bit k set iff pair k is an edge. Only meaningful for spaces of <= 64 pairs.
    std::uint64_t pair_mask() const {
        std::uint64_t m = 0;
        for (int k = 0; k < n_edges_; ++k) m |= std::uint64_t{1} << order_[static_cast<std::size_t>(k)];
        return m;
    }

    friend bool operator==(const Topology& a, const Topology& b) {
        return a.forward_ == b.forward_ && a.reverse_ == b.reverse_;
    }

private:
    std::size_t slot(int structure, NodeId i) const {
        return static_cast<std::size_t>(structure) * forward_.size() + static_cast<std::size_t>(i);
    }

    void swap_slots(int a, int b) {
        const int pa = order_[static_cast<std::size_t>(a)];
        const int pb = order_[static_cast<std::size_t>(b)];
        order_[static_cast<std::size_t>(a)] = pb;
        order_[static_cast<std::size_t>(b)] = pa;
        position_[static_cast<std::size_t>(pa)] = b;
        position_[static_cast<std::size_t>(pb)] = a;
    }

    std::shared_ptr<const FeasibleSet> space_;
    std::vector<std::vector<NodeId>> forward_;
    std::vector<std::vector<NodeId>> reverse_;
    std::vector<int> out_struct_;
    std::vector<int> in_struct_;
    std::vector<int> order_;     // pair ids; [0, n_edges_) are edges
    std::vector<int> position_;  // inverse of order_
    int n_edges_ = 0;
};

inline ToggleKind toggle_edge(Topology& topo, NodeId i, NodeId j) { return topo.toggle(i, j); }

}  // namespace icinet
