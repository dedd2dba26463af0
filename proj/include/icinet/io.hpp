#pragma once
// JSON and CSV formats: network files, cascade files, generator and sampler
// configuration blocks, posterior outputs.

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "icinet/cascade.hpp"
#include "icinet/evaluation.hpp"
#include "icinet/network.hpp"
#include "icinet/sampler.hpp"
#include "icinet/synth.hpp"

namespace icinet {

using json = nlohmann::ordered_json;

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

namespace detail {

template <class T>
T get_field(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw DataError(where + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw DataError(where + ": field '" + std::string(key) + "' has the wrong type");
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Network file
// ---------------------------------------------------------------------------

struct NetworkFile {
    NetworkMeta meta;
    std::vector<NodePair> edges;  // dense ids
    json generator;               // resolved generator config, if any
};

// Node ids may be any distinct integers; they are re-indexed to 0..N-1 in
// ascending order. Blocks are numbered by first appearance.
inline NetworkFile parse_network(const json& doc) {
    const std::string where = "network";
    if (!doc.contains("nodes") || !doc["nodes"].is_array()) throw DataError(where + ": missing 'nodes' array");
    struct Raw {
        long long id;
        std::string name;
        std::string block;
        Level level;
    };
    std::vector<Raw> raw;
    for (const auto& n : doc["nodes"]) {
        Raw r{detail::get_field<long long>(n, "id", where), n.value("name", std::string{}),
              detail::get_field<std::string>(n, "block", where),
              parse_level(detail::get_field<std::string>(n, "level", where))};
        if (r.name.empty()) r.name = "n" + std::to_string(r.id);
        raw.push_back(std::move(r));
    }
    std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.id < b.id; });
    std::map<long long, NodeId> dense;
    for (std::size_t k = 0; k < raw.size(); ++k) {
        if (!dense.emplace(raw[k].id, static_cast<NodeId>(k)).second)
            throw DataError(where + ": duplicate node id " + std::to_string(raw[k].id));
    }
    std::vector<std::string> blocks;
    auto block_id = [&](const std::string& name) {
        for (std::size_t b = 0; b < blocks.size(); ++b)
            if (blocks[b] == name) return static_cast<int>(b);
        blocks.push_back(name);
        return static_cast<int>(blocks.size() - 1);
    };
    std::vector<NodeInfo> nodes;
    for (const auto& r : raw) nodes.push_back({r.name, block_id(r.block), r.level});

    std::vector<InterdepSpec> deps;
    for (const auto& d : doc.value("interdeps", json::array())) {
        const auto sb = detail::get_field<std::string>(d, "source_block", where);
        const auto tb = detail::get_field<std::string>(d, "target_block", where);
        auto find = [&](const std::string& n) {
            for (std::size_t b = 0; b < blocks.size(); ++b)
                if (blocks[b] == n) return static_cast<int>(b);
            throw DataError(where + ": interdependency references unknown block '" + n + "'");
        };
        deps.push_back({find(sb), parse_level(detail::get_field<std::string>(d, "source_level", where)), find(tb),
                        parse_level(detail::get_field<std::string>(d, "target_level", where))});
    }

    NetworkFile out{NetworkMeta(std::move(blocks), std::move(nodes), std::move(deps)), {}, {}};
    for (const auto& e : doc.value("edges", json::array())) {
        if (!e.is_array() || e.size() != 2) throw DataError(where + ": edges must be [from, to] pairs");
        const auto a = dense.find(e[0].get<long long>());
        const auto b = dense.find(e[1].get<long long>());
        if (a == dense.end() || b == dense.end()) throw DataError(where + ": edge references an unknown node id");
        out.edges.push_back({a->second, b->second});
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    if (doc.contains("generator")) out.generator = doc["generator"];
    return out;
}

inline NetworkFile read_network(const std::string& path) { return parse_network(read_json_file(path)); }

inline json network_to_json(const NetworkMeta& meta, std::vector<NodePair> edges, const json& generator = {}) {
    json doc;
    if (!generator.is_null()) doc["generator"] = generator;
    json nodes = json::array();
    for (NodeId i = 0; i < meta.n_nodes(); ++i) {
        const auto& n = meta.node(i);
        nodes.push_back({{"id", i},
                         {"name", n.name},
                         {"block", meta.block_names()[static_cast<std::size_t>(n.block)]},
                         {"level", std::string(to_string(n.level))}});
    }
    doc["nodes"] = std::move(nodes);
    std::sort(edges.begin(), edges.end());
    json e = json::array();
    for (const auto& [i, j] : edges) e.push_back({i, j});
    doc["edges"] = std::move(e);
    json deps = json::array();
    for (const auto& d : meta.interdeps())
        deps.push_back({{"source_block", meta.block_names()[static_cast<std::size_t>(d.source_block)]},
                        {"source_level", std::string(to_string(d.source_level))},
                        {"target_block", meta.block_names()[static_cast<std::size_t>(d.target_block)]},
                        {"target_level", std::string(to_string(d.target_level))}});
    doc["interdeps"] = std::move(deps);
    return doc;
}

// ---------------------------------------------------------------------------
// Generator configuration
// ---------------------------------------------------------------------------

inline json gen_config_to_json(const GenConfig& c) {
    json blocks = json::array();
    for (const auto& b : c.blocks)
        blocks.push_back({{"name", b.name},
                          {"supply", b.n_supply},
                          {"transmission", b.n_transmission},
                          {"demand", b.n_demand}});
    json deps = json::array();
    for (const auto& d : c.interdeps)
        deps.push_back({{"source_block", d.source_block},
                        {"source_level", std::string(to_string(d.source_level))},
                        {"target_block", d.target_block},
                        {"target_level", std::string(to_string(d.target_level))}});
    return {{"blocks", blocks},
            {"interdeps", deps},
            {"intra_density", c.intra_density},
            {"interdep_density", c.interdep_density},
            {"seed", c.seed}};
}

inline GenConfig gen_config_from_json(const json& j) {
    const std::string where = "generator config";
    GenConfig c;
    for (const auto& b : j.value("blocks", json::array()))
        c.blocks.push_back({detail::get_field<std::string>(b, "name", where), detail::get_field<int>(b, "supply", where),
                            detail::get_field<int>(b, "transmission", where),
                            detail::get_field<int>(b, "demand", where)});
    for (const auto& d : j.value("interdeps", json::array()))
        c.interdeps.push_back({detail::get_field<std::string>(d, "source_block", where),
                               parse_level(detail::get_field<std::string>(d, "source_level", where)),
                               detail::get_field<std::string>(d, "target_block", where),
                               parse_level(detail::get_field<std::string>(d, "target_level", where))});
    c.intra_density = j.value("intra_density", c.intra_density);
    c.interdep_density = j.value("interdep_density", c.interdep_density);
    c.seed = j.value("seed", c.seed);
    return c;
}

// ---------------------------------------------------------------------------
// Cascade file: first-failure times only; the monotone matrix is rebuilt on load.
// ---------------------------------------------------------------------------

inline json cascades_to_json(const CascadeDataset& ds) {
    json scenarios = json::array();
    for (const auto& sc : ds.scenarios) {
        json failures = json::array();
        for (int t = 1; t <= sc.steps(); ++t)
            for (NodeId j : sc.newly_failed(t)) failures.push_back({t, j});
        scenarios.push_back({{"T", sc.steps()}, {"failures", std::move(failures)}});
    }
    return {{"q", ds.q}, {"meta_digest", ds.meta_digest}, {"n_nodes", ds.n_nodes}, {"scenarios", std::move(scenarios)}};
}

// Rejects out-of-range node ids, failure times outside [1, T], and any node
// listed twice (which would break monotonicity).
inline CascadeDataset cascades_from_json(const json& doc, int n_nodes) {
    const std::string where = "cascade file";
    CascadeDataset ds;
    ds.q = detail::get_field<double>(doc, "q", where);
    ds.meta_digest = doc.value("meta_digest", std::string{});
    ds.n_nodes = n_nodes;
    if (doc.contains("n_nodes") && doc["n_nodes"].get<int>() != n_nodes)
        throw DataError(where + ": recorded for " + std::to_string(doc["n_nodes"].get<int>()) + " nodes, network has " +
                        std::to_string(n_nodes));
    if (!doc.contains("scenarios") || !doc["scenarios"].is_array()) throw DataError(where + ": missing 'scenarios'");
    for (const auto& s : doc["scenarios"]) {
        const int steps = detail::get_field<int>(s, "T", where);
        std::vector<int> fail_time(static_cast<std::size_t>(n_nodes), 0);
        for (const auto& f : s.value("failures", json::array())) {
            if (!f.is_array() || f.size() != 2) throw DataError(where + ": failures must be [t, node] pairs");
            const int t = f[0].get<int>();
            const int node = f[1].get<int>();
            if (node < 0 || node >= n_nodes) throw DataError(where + ": node id " + std::to_string(node) + " out of range");
            if (t < 1 || t > steps) throw DataError(where + ": failure time " + std::to_string(t) + " outside [1, T]");
            if (fail_time[static_cast<std::size_t>(node)] != 0)
                throw DataError(where + ": node " + std::to_string(node) + " fails twice (non-monotone scenario)");
            fail_time[static_cast<std::size_t>(node)] = t;
        }
        ds.scenarios.emplace_back(std::move(fail_time), steps);
    }
    return ds;
}

inline CascadeDataset read_cascades(const std::string& path, int n_nodes) {
    return cascades_from_json(read_json_file(path), n_nodes);
}

// ---------------------------------------------------------------------------
// Sampler configuration block
// ---------------------------------------------------------------------------

inline json sampler_config_to_json(const SamplerConfig& c) {
    return {{"samples", c.n_samples},
            {"warmup", c.n_warmup},
            {"sampler", c.sampler == SamplerKind::TNT ? "tnt" : "random"},
            {"proposal", c.proposal == ProposalKind::InfrastructureDependent ? "ip" : "unconstrained"},
            {"record_mode", c.record_mode == RecordMode::Standard ? "standard" : "accepted_only"},
            {"q", c.q},
            {"markovian", c.markovian},
            {"seed", c.seed},
            {"thinning", c.thinning},
            {"likelihood", c.likelihood == LikelihoodKind::EdgeList ? "edgelist" : "naive"},
            {"validation", c.validation == ValidationKind::Incremental ? "incremental"
                           : c.validation == ValidationKind::Full    ? "full"
                                                                     : "none"}};
}

inline SamplerKind parse_sampler(const std::string& s) {
    if (s == "tnt") return SamplerKind::TNT;
    if (s == "random") return SamplerKind::Random;
    throw DataError("unknown sampler '" + s + "' (expected tnt|random)");
}

inline ProposalKind parse_proposal(const std::string& s) {
    if (s == "ip") return ProposalKind::InfrastructureDependent;
    if (s == "unconstrained") return ProposalKind::Unconstrained;
    throw DataError("unknown proposal '" + s + "' (expected ip|unconstrained)");
}

inline RecordMode parse_record_mode(const std::string& s) {
    if (s == "standard") return RecordMode::Standard;
    if (s == "accepted_only") return RecordMode::AcceptedOnly;
    throw DataError("unknown record mode '" + s + "' (expected standard|accepted_only)");
}

inline LikelihoodKind parse_likelihood(const std::string& s) {
    if (s == "edgelist") return LikelihoodKind::EdgeList;
    if (s == "naive") return LikelihoodKind::Naive;
    throw DataError("unknown likelihood '" + s + "' (expected naive|edgelist)");
}

inline ValidationKind parse_validation(const std::string& s) {
    if (s == "incremental") return ValidationKind::Incremental;
    if (s == "full") return ValidationKind::Full;
    if (s == "none") return ValidationKind::None;
    throw DataError("unknown validation '" + s + "' (expected incremental|full|none)");
}

// Fields absent from `j` keep their value in `base`.
inline SamplerConfig sampler_config_from_json(const json& j, SamplerConfig base = {}) {
    base.n_samples = j.value("samples", base.n_samples);
    base.n_warmup = j.value("warmup", base.n_warmup);
    if (j.contains("sampler")) base.sampler = parse_sampler(j["sampler"].get<std::string>());
    if (j.contains("proposal")) base.proposal = parse_proposal(j["proposal"].get<std::string>());
    if (j.contains("record_mode")) base.record_mode = parse_record_mode(j["record_mode"].get<std::string>());
    if (j.contains("likelihood")) base.likelihood = parse_likelihood(j["likelihood"].get<std::string>());
    if (j.contains("validation")) base.validation = parse_validation(j["validation"].get<std::string>());
    base.q = j.value("q", base.q);
    base.markovian = j.value("markovian", base.markovian);
    base.seed = j.value("seed", base.seed);
    base.thinning = j.value("thinning", base.thinning);
    return base;
}

// ---------------------------------------------------------------------------
// Posterior outputs
// ---------------------------------------------------------------------------

// i,j,p_ij over the pairs of the chain's pair space.
inline std::string marginals_csv(const EdgeMatrix& m, const FeasibleSet& space) {
    std::string s = "i,j,p_ij\n";
    for (const auto& [i, j] : space.pairs())
        s += std::to_string(i) + "," + std::to_string(j) + "," + format_number(m(i, j)) + "\n";
    return s;
}

inline std::string trace_csv(const PosteriorSamples& samples) {
    std::string s = "# avg_degree = |E| / N (directed edges per node)\n";
    s += "sample_index,iteration,avg_degree,log_likelihood,log_prior\n";
    for (std::size_t k = 0; k < samples.trace.size(); ++k) {
        const auto& r = samples.trace[k];
        s += std::to_string(k) + "," + std::to_string(r.iteration) + "," + format_number(r.average_degree) + "," +
             format_number(r.log_likelihood) + "," + format_number(r.log_prior) + "\n";
    }
    return s;
}

inline std::string pr_curve_csv(const EvalReport& rep) {
    std::string s = "threshold,precision,recall,f1\n";
    for (const auto& p : rep.pr_curve)
        s += format_number(p.threshold) + "," + format_number(p.precision) + "," + format_number(p.recall) + "," +
             format_number(p.f1) + "\n";
    return s;
}

}  // namespace icinet
