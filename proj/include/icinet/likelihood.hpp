#pragma once
// Log-likelihood of a cascade dataset under a topology.
//
// For every scenario, every transition t -> t+1 (t = 1..T-1) and every node j
// still functional at t, with s_j = prod over active in-neighbours k of (1 - q):
//     j fails at t+1   ->  log(1 - s_j)
//     j survives       ->  log(s_j)
// Nodes already failed at t contribute nothing. An observed failure with no
// active in-neighbour has probability zero and yields -infinity.
//
// Two evaluators with identical semantics:
//   log_likelihood_naive     - double loop over all node pairs per step
//   log_likelihood_edgelist  - walks only the out-lists of active nodes,
//                              O(sum_i T_i (|V| + |E|))
//
#include <cmath>
#include <limits>
#include <vector>

#include "icinet/cascade.hpp"
#include "icinet/network.hpp"

namespace icinet {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class LikelihoodKind { EdgeList, Naive };

namespace detail {

inline void check_dims(const Topology& topo, const CascadeDataset& data) {
    for (const auto& sc : data.scenarios)
        require(sc.n_nodes() == topo.n_nodes(), "cascade scenario has " + std::to_string(sc.n_nodes()) +
                                                    " nodes but the topology has " + std::to_string(topo.n_nodes()));
}

inline bool active_at(const CascadeScenario& sc, NodeId k, int t, bool markovian) {
    const int f = sc.fail_time(k);
    return markovian ? f == t : (f > 0 && f <= t);
}

}  // namespace detail

inline double log_likelihood_naive(const Topology& topo, const CascadeDataset& data, double q, bool markovian = true) {
    detail::check_dims(topo, data);
    const int n = topo.n_nodes();
    double ll = 0.0;
    for (const auto& sc : data.scenarios) {
        for (int t = 1; t < sc.steps(); ++t) {
            for (NodeId j = 0; j < n; ++j) {
                if (sc.failed(t, j)) continue;
                double survive = 1.0;
                for (NodeId k = 0; k < n; ++k) {
                    if (k == j) continue;
                    const double a = topo.has_edge(k, j) ? 1.0 : 0.0;
                    const double c = detail::active_at(sc, k, t, markovian) ? 1.0 : 0.0;
                    survive *= 1.0 - q * a * c;
                }
                const double term = sc.fail_time(j) == t + 1 ? std::log(1.0 - survive) : std::log(survive);
                if (term == kNegInf) return kNegInf;
                ll += term;
            }
        }
    }
    return ll;
}

// Reusable evaluator for the edge-list path; holds scratch buffers and the
// per-count log tables for one value of q.
class EdgeListLikelihood {
public:
    EdgeListLikelihood(int n_nodes, double q, bool markovian)
        : markovian_(markovian), log_survive_one_(std::log1p(-q)),
          log_fail_(static_cast<std::size_t>(n_nodes) + 1, kNegInf),
          count_(static_cast<std::size_t>(n_nodes), 0) {
        for (int k = 1; k <= n_nodes; ++k)
            log_fail_[static_cast<std::size_t>(k)] = std::log(-std::expm1(k * log_survive_one_));
        touched_.reserve(static_cast<std::size_t>(n_nodes));
    }

    double operator()(const Topology& topo, const CascadeDataset& data) {
        double ll = 0.0;
        for (const auto& sc : data.scenarios) {
            active_.clear();
            for (int t = 1; t < sc.steps(); ++t) {
                if (markovian_) active_.assign(sc.newly_failed(t).begin(), sc.newly_failed(t).end());
                else active_.insert(active_.end(), sc.newly_failed(t).begin(), sc.newly_failed(t).end());

                for (NodeId k : active_) {
                    for (NodeId j : topo.successors(k)) {
                        if (sc.failed(t, j)) continue;
                        if (count_[static_cast<std::size_t>(j)]++ == 0) touched_.push_back(j);
                    }
                }
                bool unexplained = false;
                for (NodeId j : sc.newly_failed(t + 1)) unexplained = unexplained || count_[static_cast<std::size_t>(j)] == 0;
                if (!unexplained) {
                    for (NodeId j : touched_) {
                        const int c = count_[static_cast<std::size_t>(j)];
                        ll += sc.fail_time(j) == t + 1 ? log_fail_[static_cast<std::size_t>(c)] : c * log_survive_one_;
                    }
                }
                for (NodeId j : touched_) count_[static_cast<std::size_t>(j)] = 0;
                touched_.clear();
                if (unexplained || ll == kNegInf) return kNegInf;
            }
        }
        return ll;
    }

private:
    bool markovian_;
    double log_survive_one_;
    std::vector<double> log_fail_;
    std::vector<int> count_;
    std::vector<NodeId> touched_;
    std::vector<NodeId> active_;
};

inline double log_likelihood_edgelist(const Topology& topo, const CascadeDataset& data, double q,
                                      bool markovian = true) {
    detail::check_dims(topo, data);
    return EdgeListLikelihood(topo.n_nodes(), q, markovian)(topo, data);
}

inline double log_likelihood(LikelihoodKind kind, const Topology& topo, const CascadeDataset& data, double q,
                             bool markovian = true) {
    return kind == LikelihoodKind::Naive ? log_likelihood_naive(topo, data, q, markovian)
                                         : log_likelihood_edgelist(topo, data, q, markovian);
}

}  // namespace icinet
