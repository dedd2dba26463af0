#pragma once
// Method presets and the generate -> simulate -> reconstruct -> evaluate
// pipeline shared by the CLI and the acceptance suite.
//
//   method  IP  TNT  edge-list  incremental validation
//   m1      x   x    x          x
//   m2      x   x    x          (full BFS check)
//   m3      x   x               (full BFS check)
//   m4      x                   (full BFS check)
//   m5                          (no constraint system)
//
#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "icinet/cascade.hpp"
#include "icinet/evaluation.hpp"
#include "icinet/sampler.hpp"
#include "icinet/synth.hpp"

namespace icinet {

struct MethodSpec {
    std::string name;
    ProposalKind proposal = ProposalKind::InfrastructureDependent;
    SamplerKind sampler = SamplerKind::TNT;
    LikelihoodKind likelihood = LikelihoodKind::EdgeList;
    ValidationKind validation = ValidationKind::Incremental;
};

inline const std::array<MethodSpec, 5>& method_presets() {
    static const std::array<MethodSpec, 5> presets{{
        {"m1", ProposalKind::InfrastructureDependent, SamplerKind::TNT, LikelihoodKind::EdgeList,
         ValidationKind::Incremental},
        {"m2", ProposalKind::InfrastructureDependent, SamplerKind::TNT, LikelihoodKind::EdgeList, ValidationKind::Full},
        {"m3", ProposalKind::InfrastructureDependent, SamplerKind::TNT, LikelihoodKind::Naive, ValidationKind::Full},
        {"m4", ProposalKind::InfrastructureDependent, SamplerKind::Random, LikelihoodKind::Naive, ValidationKind::Full},
        {"m5", ProposalKind::Unconstrained, SamplerKind::Random, LikelihoodKind::Naive, ValidationKind::None},
    }};
    return presets;
}

inline MethodSpec method_preset(const std::string& name) {
    for (const auto& m : method_presets())
        if (m.name == name) return m;
    throw DataError("unknown method '" + name + "' (expected m1|m2|m3|m4|m5)");
}

inline void apply_method(SamplerConfig& config, const MethodSpec& m) {
    config.proposal = m.proposal;
    config.sampler = m.sampler;
    config.likelihood = m.likelihood;
    config.validation = m.validation;
}

// Cascade data designs: n scenarios, each lasting at least `min_steps` steps.
struct ExperimentDesign {
    std::string name;
    int n_scenarios = 0;
    int min_steps = 0;
};

inline const std::array<ExperimentDesign, 3>& experiment_designs() {
    static const std::array<ExperimentDesign, 3> designs{{{"E5_5", 5, 5}, {"E5_15", 15, 5}, {"E5_40", 40, 5}}};
    return designs;
}

struct Reconstruction {
    ChainResult chain;
    EdgeMatrix marginals;
    EvalReport report;            // feasible pairs for IP runs, all pairs otherwise
    EvalReport report_all_pairs;  // always over every ordered pair
    double seconds = 0.0;         // chain wall-clock
};

inline Reconstruction reconstruct(const NetworkMeta& meta, const std::shared_ptr<const FeasibleSet>& feasible,
                                  const Topology& truth, const CascadeDataset& data, const HsbmPrior& prior,
                                  const SamplerConfig& config) {
    Reconstruction r;
    r.chain = run_chain(meta, feasible, data, prior, config);
    r.seconds = r.chain.stats.seconds;
    r.marginals = edge_marginals(r.chain.samples);
    const bool ip = config.proposal == ProposalKind::InfrastructureDependent;
    r.report_all_pairs = precision_recall_curve(r.marginals, truth, nullptr);
    r.report = ip ? precision_recall_curve(r.marginals, truth, feasible.get()) : r.report_all_pairs;
    return r;
}

struct Scenario {
    GeneratedNetwork network;
    CascadeDataset data;
};

inline Scenario make_scenario(const GenConfig& gen, const CascadeParams& cascades) {
    Scenario s{generate_icin(gen), {}};
    s.data = generate_dataset(s.network.topology, s.network.meta, cascades);
    return s;
}

// Per-repetition seeds: repetition k of a grid draws from sub-streams of
// substream(master, k), so cells can be rerun on their own.
struct CellSeeds {
    std::uint64_t generation = 0;
    std::uint64_t simulation = 0;
    std::uint64_t chain = 0;
};

inline CellSeeds cell_seeds(std::uint64_t master, std::uint64_t repetition) {
    const std::uint64_t base = substream(master, repetition);
    return {substream(base, "generation"), substream(base, "simulation"), substream(base, "chain")};
}

// Larger three-block system for q sweeps: 4 supply, 8 transmission and 20
// demand nodes per block, sparse extra edges. The 2-3-5 system is too small
// for the accuracy/q trade-off to show (every cascade must last 5 steps).
inline GenConfig sweep_stand_in(std::uint64_t seed = 0) {
    GenConfig c = GenConfig::reference_system(seed);
    for (auto& b : c.blocks) {
        b.n_supply = 4;
        b.n_transmission = 8;
        b.n_demand = 20;
    }
    c.intra_density = 0.05;
    return c;
}

inline std::vector<double> default_q_grid() {
    std::vector<double> qs;
    for (int k = 1; k <= 9; ++k) qs.push_back(k / 10.0);
    return qs;
}

}  // namespace icinet
