#pragma once
// Posterior summaries, accuracy against a ground truth, and the exact
// enumeration oracle for small systems.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "icinet/constraints.hpp"
#include "icinet/likelihood.hpp"
#include "icinet/prior.hpp"
#include "icinet/sampler.hpp"

namespace icinet {

// Dense row-major n x n matrix of edge probabilities.
struct EdgeMatrix {
    int n = 0;
    std::vector<double> values;

    EdgeMatrix() = default;
    explicit EdgeMatrix(int n_nodes)
        : n(n_nodes), values(static_cast<std::size_t>(n_nodes) * static_cast<std::size_t>(n_nodes), 0.0) {}

    double& operator()(NodeId i, NodeId j) {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }
    double operator()(NodeId i, NodeId j) const {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)];
    }

    static EdgeMatrix adjacency(const Topology& topo) {
        EdgeMatrix m(topo.n_nodes());
        for (const auto& [i, j] : topo.edges()) m(i, j) = 1.0;
        return m;
    }
};

// Fraction of recorded samples that contain each edge.
inline EdgeMatrix edge_marginals(const PosteriorSamples& samples) {
    require(samples.n_recorded > 0, "no recorded samples to summarise");
    EdgeMatrix m(samples.n_nodes);
    const double denom = static_cast<double>(samples.n_recorded);
    for (std::size_t k = 0; k < m.values.size(); ++k) m.values[k] = static_cast<double>(samples.edge_counts[k]) / denom;
    return m;
}

// |E| / N per recorded sample.
inline std::vector<double> average_degree_trace(const PosteriorSamples& samples) {
    std::vector<double> out;
    out.reserve(samples.trace.size());
    for (const auto& row : samples.trace) out.push_back(row.average_degree);
    return out;
}

struct PrPoint {
    double threshold = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    std::vector<PrPoint> pr_curve;
    double best_f1 = 0.0;
    double best_threshold = 0.0;
    bool feasible_only = true;
};

// 0.00, 0.01, ..., 1.00
inline std::vector<double> default_thresholds() {
    std::vector<double> t;
    for (int k = 0; k <= 100; ++k) t.push_back(k / 100.0);
    return t;
}

inline double f1_score(double precision, double recall) {
    return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

// A pair (i, j) is predicted connected when p_ij >= threshold. Pairs are
// drawn from `mask` when given (feasible-set sweep), otherwise from all
// ordered pairs i != j.
inline EvalReport precision_recall_curve(const EdgeMatrix& marginals, const Topology& truth,
                                         const FeasibleSet* mask = nullptr,
                                         const std::vector<double>& thresholds = default_thresholds()) {
    require(marginals.n == truth.n_nodes(), "marginals and ground truth differ in node count");
    struct Scored {
        double p;
        bool positive;
    };
    std::vector<Scored> pairs;
    if (mask != nullptr) {
        for (const auto& [i, j] : mask->pairs()) pairs.push_back({marginals(i, j), truth.has_edge(i, j)});
    } else {
        for (NodeId i = 0; i < marginals.n; ++i)
            for (NodeId j = 0; j < marginals.n; ++j)
                if (i != j) pairs.push_back({marginals(i, j), truth.has_edge(i, j)});
    }
    std::int64_t n_true = 0;
    for (const auto& s : pairs) n_true += s.positive;

    EvalReport rep;
    rep.feasible_only = mask != nullptr;
    rep.best_f1 = -1.0;
    for (double th : thresholds) {
        require(th >= 0.0 && th <= 1.0, "threshold outside [0,1]");
        std::int64_t tp = 0;
        std::int64_t predicted = 0;
        for (const auto& s : pairs) {
            if (s.p < th) continue;
            ++predicted;
            tp += s.positive;
        }
        PrPoint pt{th, predicted > 0 ? static_cast<double>(tp) / predicted : 0.0,
                   n_true > 0 ? static_cast<double>(tp) / n_true : 0.0, 0.0};
        pt.f1 = f1_score(pt.precision, pt.recall);
        rep.pr_curve.push_back(pt);
        if (pt.f1 > rep.best_f1) {
            rep.best_f1 = pt.f1;
            rep.best_threshold = th;
        }
    }
    if (rep.best_f1 < 0.0) rep.best_f1 = 0.0;
    return rep;
}

inline double mean_marginal_on_edges(const EdgeMatrix& marginals, const Topology& truth) {
    const auto edges = truth.edges();
    if (edges.empty()) return 0.0;
    double s = 0.0;
    for (const auto& [i, j] : edges) s += marginals(i, j);
    return s / static_cast<double>(edges.size());
}

// ---------------------------------------------------------------------------
// Exact posterior by enumeration of every subset of the pair space.
// ---------------------------------------------------------------------------
struct ExactPosterior {
    EdgeMatrix marginals;
    std::vector<std::uint64_t> valid_masks;  // bit k <-> pair k of the space
    std::vector<double> probabilities;       // normalised, aligned with valid_masks
    double log_evidence = kNegInf;           // log sum of exp(ll + lp) over valid graphs

    // Posterior probability of the graph with the given pair mask (0 if invalid).
    double probability_of(std::uint64_t mask) const {
        const auto it = std::lower_bound(valid_masks.begin(), valid_masks.end(), mask);
        return it != valid_masks.end() && *it == mask ? probabilities[static_cast<std::size_t>(it - valid_masks.begin())]
                                                      : 0.0;
    }
};

inline constexpr int kMaxEnumeratedPairs = 20;

inline ExactPosterior enumerate_exact_posterior(const NetworkMeta& meta, std::shared_ptr<const FeasibleSet> space,
                                                const CascadeDataset& data, const HsbmPrior& prior, double q,
                                                bool markovian = true) {
    const int m = space->size();
    require(m <= kMaxEnumeratedPairs, "pair space of " + std::to_string(m) + " pairs exceeds the enumeration guard of " +
                                          std::to_string(kMaxEnumeratedPairs));
    const PairPrior pair_prior(meta, *space, prior);

    ExactPosterior out;
    std::vector<double> log_w;
    Topology topo(space);
    std::uint64_t current = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        // Walk masks in order, toggling only the bits that changed.
        for (std::uint64_t diff = mask ^ current; diff != 0; diff &= diff - 1) {
            const int bit = std::countr_zero(diff);
            topo.toggle_pair(bit);
        }
        current = mask;
        if (space->constrained() && !check_constraints_full(topo, meta).valid()) continue;
        const double ll = log_likelihood_naive(topo, data, q, markovian);
        if (ll == kNegInf) continue;
        out.valid_masks.push_back(mask);
        log_w.push_back(ll + pair_prior.evaluate(topo));
    }
    require(!log_w.empty(), "no constraint-valid topology explains the data");
    const double top = *std::max_element(log_w.begin(), log_w.end());
    double z = 0.0;
    for (double w : log_w) z += std::exp(w - top);
    out.log_evidence = top + std::log(z);
    out.marginals = EdgeMatrix(meta.n_nodes());
    for (std::size_t k = 0; k < log_w.size(); ++k) {
        const double p = std::exp(log_w[k] - out.log_evidence);
        out.probabilities.push_back(p);
        for (int bit = 0; bit < m; ++bit)
            if (out.valid_masks[k] >> bit & 1U) {
                const auto& [i, j] = space->pair(bit);
                out.marginals(i, j) += p;
            }
    }
    return out;
}

// Constraint-valid topologies of a pair space (any likelihood), as masks.
inline std::vector<std::uint64_t> enumerate_valid_topologies(const NetworkMeta& meta,
                                                             std::shared_ptr<const FeasibleSet> space) {
    const int m = space->size();
    require(m <= kMaxEnumeratedPairs, "pair space exceeds the enumeration guard");
    std::vector<std::uint64_t> out;
    Topology topo(space);
    std::uint64_t current = 0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        for (std::uint64_t diff = mask ^ current; diff != 0; diff &= diff - 1) topo.toggle_pair(std::countr_zero(diff));
        current = mask;
        if (check_constraints_full(topo, meta).valid()) out.push_back(mask);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

// Shortest round-trip decimal form: 0 -> "0", 1 -> "1", 0.75 -> "0.75".
inline std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string heatmap_csv(const EdgeMatrix& m) {
    std::string s;
    for (NodeId i = 0; i < m.n; ++i) {
        for (NodeId j = 0; j < m.n; ++j) {
            if (j > 0) s += ',';
            s += format_number(m(i, j));
        }
        s += '\n';
    }
    return s;
}

// Grayscale cells (black = probability 1) with rules at block boundaries.
inline std::string heatmap_svg(const EdgeMatrix& m, const NetworkMeta* meta = nullptr, int cell = 14) {
    const int size = m.n * cell;
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size + 2) + "\" height=\"" +
                    std::to_string(size + 2) + "\" viewBox=\"-1 -1 " + std::to_string(size + 2) + " " +
                    std::to_string(size + 2) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(size) + "\" height=\"" + std::to_string(size) +
         "\" fill=\"white\" stroke=\"black\"/>\n";
    for (NodeId i = 0; i < m.n; ++i) {
        for (NodeId j = 0; j < m.n; ++j) {
            const double p = std::clamp(m(i, j), 0.0, 1.0);
            if (p <= 0.0) continue;
            const int g = static_cast<int>(std::lround(255.0 * (1.0 - p)));
            s += "<rect x=\"" + std::to_string(j * cell) + "\" y=\"" + std::to_string(i * cell) + "\" width=\"" +
                 std::to_string(cell) + "\" height=\"" + std::to_string(cell) + "\" fill=\"rgb(" + std::to_string(g) +
                 "," + std::to_string(g) + "," + std::to_string(g) + ")\"/>\n";
        }
    }
    if (meta != nullptr) {
        for (NodeId i = 1; i < m.n; ++i) {
            if (meta->block_of(i) == meta->block_of(i - 1)) continue;
            const int x = i * cell;
            s += "<line x1=\"" + std::to_string(x) + "\" y1=\"0\" x2=\"" + std::to_string(x) + "\" y2=\"" +
                 std::to_string(size) + "\" stroke=\"red\"/>\n";
            s += "<line x1=\"0\" y1=\"" + std::to_string(x) + "\" x2=\"" + std::to_string(size) + "\" y2=\"" +
                 std::to_string(x) + "\" stroke=\"red\"/>\n";
        }
    }
    s += "</svg>\n";
    return s;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw DataError("failed writing '" + path + "'");
}

// Writes `<base>.csv` and, when requested, `<base>.svg`.
inline void export_heatmap(const EdgeMatrix& m, const std::string& csv_path,
                           const std::optional<std::string>& svg_path = std::nullopt,
                           const NetworkMeta* meta = nullptr) {
    write_text_file(csv_path, heatmap_csv(m));
    if (svg_path) write_text_file(*svg_path, heatmap_svg(m, meta));
}

}  // namespace icinet
