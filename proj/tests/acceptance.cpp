// End-to-end acceptance checks. Prints one PASS/FAIL line per check and
// exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "icinet/counting.hpp"
#include "icinet/experiment.hpp"

using namespace icinet;

namespace {

constexpr std::uint64_t kMaster = 0x1C1AE7;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// 1 supply, 1 transmission, 2 demand in one block: five feasible pairs.
NetworkMeta tiny_meta() {
    return NetworkMeta({"grid"},
                       {{"s", 0, Level::Supply}, {"t", 0, Level::Transmission}, {"d0", 0, Level::Demand},
                        {"d1", 0, Level::Demand}},
                       {});
}

struct Tiny {
    NetworkMeta meta = tiny_meta();
    std::shared_ptr<const FeasibleSet> space = std::make_shared<const FeasibleSet>(build_feasible_set(meta));
    CascadeDataset data;
};

Tiny tiny_system() {
    Tiny t;
    const Topology truth(t.space, std::vector<NodePair>{{0, 1}, {1, 2}, {0, 3}, {1, 3}});
    CascadeParams p;
    p.n_scenarios = 4;
    p.min_steps = 2;
    p.q = 0.4;
    p.seed = substream(kMaster, "tiny");
    t.data = generate_dataset(truth, t.meta, p);
    return t;
}

// ---------------------------------------------------------------------------

Outcome check_counting() {
    const auto c = count_candidate_topologies(2, 3);
    const auto u = count_unconstrained(5);
    return {c == 192 && u == 1024, "candidates(2,3) = " + c.str() + ", unconstrained(5) = " + u.str()};
}

Outcome check_likelihood_equivalence() {
    Rng rng = make_rng(substream(kMaster, "fuzz"));
    int cases = 0, finite = 0, infinite = 0, mismatches = 0;
    std::string first;
    while (cases < 300) {
        GenConfig g;
        const int nb = 1 + uniform_index<int>(rng, 3);
        for (int b = 0; b < nb; ++b)
            g.blocks.push_back({"b" + std::to_string(b), 1 + uniform_index<int>(rng, 2), uniform_index<int>(rng, 3),
                                1 + uniform_index<int>(rng, 5)});
        for (int b = 0; b + 1 < nb; ++b)
            g.interdeps.push_back({"b" + std::to_string(b), Level::Demand, "b" + std::to_string(b + 1), Level::Supply});
        g.intra_density = 0.5 * uniform01(rng);
        g.interdep_density = 0.3 * uniform01(rng);
        g.seed = rng();
        const auto net = generate_icin(g);
        if (net.meta.n_nodes() > 30) continue;

        // data from the ground truth, evaluated on a perturbed graph (feasible or arbitrary)
        CascadeDataset ds;
        ds.n_nodes = net.meta.n_nodes();
        const int n_sc = 1 + uniform_index<int>(rng, 10);
        const double q_sim = 0.2 + 0.7 * uniform01(rng);
        while (static_cast<int>(ds.scenarios.size()) < n_sc) {
            auto sc = simulate_cascade(net.topology, q_sim, 0.2, true, rng);
            if (sc.steps() <= 10) ds.scenarios.push_back(std::move(sc));
        }
        const bool arbitrary = uniform01(rng) < 0.3;
        auto space = arbitrary ? std::make_shared<const FeasibleSet>(FeasibleSet::all_pairs(net.meta)) : net.feasible;
        Topology topo(space);
        for (const auto& [i, j] : net.topology.edges()) topo.toggle(i, j);
        const int flips = uniform_index<int>(rng, 6);
        for (int f = 0; f < flips; ++f) topo.toggle_pair(uniform_index<int>(rng, space->size()));

        const bool markovian = uniform01(rng) < 0.7;
        const double q = 0.05 + 0.9 * uniform01(rng);
        const double naive = log_likelihood_naive(topo, ds, q, markovian);
        const double fast = log_likelihood_edgelist(topo, ds, q, markovian);
        ++cases;
        bool ok;
        if (naive == kNegInf) {
            ok = fast == kNegInf;
            ++infinite;
        } else {
            ok = std::abs(fast - naive) <= 1e-9 * std::abs(naive);
            ++finite;
        }
        if (!ok && mismatches++ == 0) first = "naive " + fmt(naive, 17) + " vs edge-list " + fmt(fast, 17);
    }
    return {mismatches == 0 && finite > 0 && infinite > 0,
            std::to_string(cases) + " cases (" + std::to_string(finite) + " finite, " + std::to_string(infinite) +
                " -inf), " + std::to_string(mismatches) + " mismatches" + (first.empty() ? "" : "; first: " + first)};
}

Outcome check_incremental_validation() {
    Rng rng = make_rng(substream(kMaster, "toggles"));
    int checked = 0, disagreements = 0, rejected = 0;
    std::string log;
    for (std::uint64_t net_index = 0; checked < 20000; ++net_index) {
        auto cfg = GenConfig::reference_system(substream(kMaster, net_index));
        cfg.intra_density = 0.2 * uniform01(rng);
        cfg.interdep_density = 0.2 * uniform01(rng);
        auto net = generate_icin(cfg);
        for (int step = 0; step < 500; ++step) {
            const int id = uniform_index<int>(rng, net.feasible->size());
            const auto [i, j] = net.feasible->pair(id);
            const auto kind = net.topology.toggle_pair(id);
            const bool fast = validate_incremental(net.topology, i, j, kind);
            const bool full = check_constraints_full(net.topology, net.meta).valid();
            ++checked;
            if (fast != full) {
                ++disagreements;
                std::fprintf(stderr, "disagreement: network %llu, %s (%d,%d): incremental %d, full %d\n%s",
                             static_cast<unsigned long long>(net_index),
                             kind == ToggleKind::Added ? "add" : "remove", i, j, fast, full,
                             check_constraints_full(net.topology, net.meta).summary().c_str());
            }
            if (!full) {
                net.topology.toggle_pair(id);  // keep the precondition valid
                ++rejected;
            }
        }
    }
    return {disagreements == 0, std::to_string(checked) + " toggles (" + std::to_string(rejected) +
                                    " invalidating), " + std::to_string(disagreements) + " disagreements"};
}

Outcome check_exact_posterior() {
    const auto tiny = tiny_system();
    const auto exact = enumerate_exact_posterior(tiny.meta, tiny.space, tiny.data, HsbmPrior{}, 0.4);

    SamplerConfig cfg;
    cfg.sampler = SamplerKind::TNT;
    cfg.proposal = ProposalKind::InfrastructureDependent;
    cfg.n_warmup = 5000;
    cfg.n_samples = cfg.n_warmup + 100000;
    cfg.q = 0.4;
    cfg.seed = substream(kMaster, "exact-chain");
    std::map<std::uint64_t, std::int64_t> visits;
    std::int64_t it = 0;
    ChainObserver obs{[&](const Topology& t, bool) {
        if (it++ >= cfg.n_warmup) ++visits[t.pair_mask()];
    }};
    const auto chain = run_chain(tiny.meta, tiny.space, tiny.data, HsbmPrior{}, cfg, obs);
    const auto m = edge_marginals(chain.samples);

    double max_diff = 0.0;
    for (const auto& [i, j] : tiny.space->pairs()) max_diff = std::max(max_diff, std::abs(m(i, j) - exact.marginals(i, j)));
    const double n = static_cast<double>(chain.samples.n_recorded);
    double tv = 0.0;
    for (std::size_t k = 0; k < exact.valid_masks.size(); ++k) {
        const auto v = visits.find(exact.valid_masks[k]);
        tv += std::abs((v == visits.end() ? 0.0 : static_cast<double>(v->second) / n) - exact.probabilities[k]);
    }
    for (const auto& [mask, count] : visits)
        if (exact.probability_of(mask) == 0.0) tv += static_cast<double>(count) / n;
    tv *= 0.5;
    return {chain.samples.n_recorded == 100000 && max_diff < 0.05 && tv < 0.05,
            std::to_string(chain.samples.n_recorded) + " samples over " + std::to_string(exact.valid_masks.size()) +
                " supported graphs; max marginal diff " + fmt(max_diff) + ", total variation " + fmt(tv)};
}

Outcome check_irreducibility() {
    const auto tiny = tiny_system();
    const auto valid = enumerate_valid_topologies(tiny.meta, tiny.space);
    const auto exact = enumerate_exact_posterior(tiny.meta, tiny.space, tiny.data, HsbmPrior{}, 0.4);
    std::string detail;
    bool pass = true;
    // without data every valid graph has positive mass; with data, every graph in the support
    for (bool with_data : {false, true}) {
        CascadeDataset empty;
        empty.n_nodes = tiny.meta.n_nodes();
        const auto& data = with_data ? tiny.data : empty;
        const auto& target = with_data ? exact.valid_masks : valid;
        SamplerConfig cfg;
        cfg.n_samples = 1000000;
        cfg.n_warmup = 0;
        cfg.seed = substream(kMaster, with_data ? "irreducible-data" : "irreducible-prior");
        std::map<std::uint64_t, std::int64_t> first_visit;
        std::int64_t it = 0;
        ChainObserver obs{[&](const Topology& t, bool) { first_visit.emplace(t.pair_mask(), it++); }};
        const auto chain = run_chain(tiny.meta, tiny.space, data, HsbmPrior{}, cfg, obs);
        first_visit.emplace(chain.initial.pair_mask(), 0);
        int seen = 0;
        std::int64_t last = 0;
        for (auto mask : target) {
            const auto f = first_visit.find(mask);
            if (f == first_visit.end()) continue;
            ++seen;
            last = std::max(last, f->second);
        }
        const std::int64_t rejections = chain.stats.constraint_rejections + chain.stats.likelihood_rejections;
        const bool ok = seen == static_cast<int>(target.size()) && first_visit.size() == target.size() && rejections > 0;
        pass = pass && ok;
        detail += std::string(with_data ? "data: " : "prior: ") + std::to_string(seen) + "/" +
                  std::to_string(target.size()) + " graphs visited (all by step " + std::to_string(last) + "), " +
                  std::to_string(rejections) + " rejections; ";
    }
    detail.resize(detail.size() - 2);
    return {pass, detail};
}

constexpr int kSeeds = 5;

// Fresh 2-3-5 ground truths with 40 scenarios each, one per seed.
std::vector<Scenario> reference_scenarios() {
    std::vector<Scenario> out;
    for (int k = 0; k < kSeeds; ++k) {
        const auto seeds = cell_seeds(kMaster, static_cast<std::uint64_t>(k));
        CascadeParams p;
        p.n_scenarios = 40;
        p.q = 0.4;
        p.initial_ratio = 0.2;
        p.seed = seeds.simulation;
        out.push_back(make_scenario(GenConfig::reference_system(seeds.generation), p));
    }
    return out;
}

// First n scenarios of a dataset: scenario k uses its own stream, so this is
// exactly the dataset a smaller design would have drawn.
CascadeDataset prefix(const CascadeDataset& ds, int n) {
    CascadeDataset out = ds;
    out.scenarios.resize(static_cast<std::size_t>(n));
    return out;
}

Reconstruction run(const Scenario& sc, const CascadeDataset& data, SamplerConfig cfg, int k) {
    cfg.q = 0.4;
    cfg.seed = cell_seeds(kMaster, static_cast<std::uint64_t>(k)).chain;
    return reconstruct(sc.network.meta, sc.network.feasible, sc.network.topology, data, HsbmPrior{}, cfg);
}

Outcome check_data_monotonicity(const std::vector<Scenario>& scs) {
    std::vector<double> f1;
    for (const auto& d : experiment_designs()) {
        std::vector<double> v;
        for (int k = 0; k < kSeeds; ++k) {
            SamplerConfig cfg;
            apply_method(cfg, method_preset("m1"));
            v.push_back(run(scs[static_cast<std::size_t>(k)], prefix(scs[static_cast<std::size_t>(k)].data, d.n_scenarios),
                            cfg, k)
                            .report.best_f1);
        }
        f1.push_back(mean(v));
    }
    return {f1[0] < f1[1] && f1[1] < f1[2] && f1[2] >= 0.85,
            "mean best F1 (m1): E5_5 " + fmt(f1[0], 3) + ", E5_15 " + fmt(f1[1], 3) + ", E5_40 " + fmt(f1[2], 3)};
}

Outcome check_ip_benefit(const std::vector<Scenario>& scs) {
    bool pass = true;
    std::string detail;
    for (const auto& d : experiment_designs()) {
        std::vector<double> ip, ip_all, free;
        for (int k = 0; k < kSeeds; ++k) {
            const auto& sc = scs[static_cast<std::size_t>(k)];
            const auto data = prefix(sc.data, d.n_scenarios);
            SamplerConfig cfg;
            apply_method(cfg, method_preset("m1"));
            const auto a = run(sc, data, cfg, k);
            cfg.proposal = ProposalKind::Unconstrained;
            cfg.validation = ValidationKind::None;
            const auto b = run(sc, data, cfg, k);
            ip.push_back(a.report.best_f1);
            ip_all.push_back(a.report_all_pairs.best_f1);
            free.push_back(b.report.best_f1);
        }
        const bool ok = mean(ip) > mean(free) && mean(ip_all) > mean(free);
        pass = pass && ok;
        detail += d.name + " ip " + fmt(mean(ip), 3) + " (all pairs " + fmt(mean(ip_all), 3) + ") vs unconstrained " +
                  fmt(mean(free), 3) + "; ";
    }
    detail.resize(detail.size() - 2);
    return {pass, detail};
}

Outcome check_speedups(const std::vector<Scenario>& scs) {
    // Interleave methods and take the median of 5 rounds to damp scheduler noise.
    const std::vector<std::string> methods{"m1", "m2", "m3", "m4"};
    std::vector<std::vector<double>> rounds(methods.size());
    for (int round = 0; round < 5; ++round) {
        for (std::size_t m = 0; m < methods.size(); ++m) {
            double total = 0.0;
            for (int k = 0; k < kSeeds; ++k) {
                SamplerConfig cfg;
                apply_method(cfg, method_preset(methods[m]));
                total += run(scs[static_cast<std::size_t>(k)], scs[static_cast<std::size_t>(k)].data, cfg, k).seconds;
            }
            rounds[m].push_back(total / kSeeds);
        }
    }
    std::vector<double> t;
    for (auto& r : rounds) {
        std::sort(r.begin(), r.end());
        t.push_back(r[r.size() / 2]);
    }
    const bool ordered = t[0] < t[2] && t[2] < t[3];
    const bool comparable = std::abs(t[1] - t[0]) <= 0.2 * t[0];
    return {ordered && comparable, "mean chain time on E5_40: m1 " + fmt(t[0], 3) + " s, m2 " + fmt(t[1], 3) +
                                       " s, m3 " + fmt(t[2], 3) + " s, m4 " + fmt(t[3], 3) + " s (m2/m1 = " +
                                       fmt(t[1] / t[0], 3) + ")"};
}

Outcome check_q_sweep() {
    const auto qs = default_q_grid();
    std::vector<double> f1, secs;
    for (double q : qs) {
        std::vector<double> f, s;
        for (int k = 0; k < kSeeds; ++k) {
            const auto seeds = cell_seeds(substream(kMaster, "sweep"), static_cast<std::uint64_t>(k));
            const auto net = generate_icin(sweep_stand_in(seeds.generation));
            CascadeParams p;
            p.n_scenarios = 20;
            p.min_steps = 5;
            p.q = q;
            p.seed = seeds.simulation;
            const auto data = generate_dataset(net.topology, net.meta, p);
            SamplerConfig cfg;
            apply_method(cfg, method_preset("m1"));
            cfg.q = q;
            cfg.seed = seeds.chain;
            const auto r = reconstruct(net.meta, net.feasible, net.topology, data, HsbmPrior{}, cfg);
            f.push_back(r.report.best_f1);
            s.push_back(r.seconds);
        }
        f1.push_back(mean(f));
        secs.push_back(mean(s));
    }
    const auto best = static_cast<std::size_t>(std::max_element(f1.begin(), f1.end()) - f1.begin());
    std::string curve;
    for (std::size_t k = 0; k < qs.size(); ++k) curve += (k ? " " : "") + fmt(qs[k], 2) + ":" + fmt(f1[k], 3);
    return {secs.back() > secs.front() && best != 0 && best != qs.size() - 1,
            "F1 by q [" + curve + "], peak at q = " + fmt(qs[best], 2) + "; runtime q=0.1 " + fmt(secs.front(), 3) +
                " s, q=0.9 " + fmt(secs.back(), 3) + " s"};
}

Outcome check_properties(const std::vector<Scenario>& scs) {
    std::vector<std::string> failed;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok && std::find(failed.begin(), failed.end(), what) == failed.end()) failed.push_back(what);
    };

    // generated networks satisfy every constraint
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto net = generate_icin(GenConfig::reference_system(substream(kMaster, seed)));
        expect(check_constraints_full(net.topology, net.meta).valid(), "generator validity");
    }

    for (const auto& sc : scs) {
        const auto& truth = sc.network.topology;
        // cascades: monotone, and each non-seed failure has a neighbour that failed one step earlier
        for (const auto& s : sc.data.scenarios) {
            for (int t = 1; t < s.steps(); ++t)
                for (NodeId j = 0; j < s.n_nodes(); ++j) expect(!s.failed(t, j) || s.failed(t + 1, j), "cascade monotonicity");
            for (int t = 2; t <= s.steps(); ++t)
                for (NodeId j : s.newly_failed(t)) {
                    bool cause = false;
                    for (NodeId k : truth.predecessors(j)) cause = cause || s.fail_time(k) == t - 1;
                    expect(cause, "cascade causality");
                }
        }
        // adjacency lists mirror each other
        for (NodeId i = 0; i < truth.n_nodes(); ++i)
            for (NodeId j : truth.successors(i))
                expect(std::binary_search(truth.predecessors(j).begin(), truth.predecessors(j).end(), i),
                       "transpose consistency");

        // chain: cached scores agree with recomputation, marginals in [0,1], PR recall monotone
        SamplerConfig cfg;
        apply_method(cfg, method_preset("m1"));
        cfg.cache_check_every = 1;
        cfg.seed = substream(kMaster, "properties");
        Reconstruction r;
        try {
            r = reconstruct(sc.network.meta, sc.network.feasible, truth, sc.data, HsbmPrior{}, cfg);
        } catch (const InternalError&) {
            expect(false, "cache coherence");
            continue;
        }
        for (double p : r.marginals.values) expect(p >= 0.0 && p <= 1.0, "marginal bounds");
        for (const auto* rep : {&r.report, &r.report_all_pairs})
            for (std::size_t k = 1; k < rep->pr_curve.size(); ++k)
                expect(rep->pr_curve[k].recall <= rep->pr_curve[k - 1].recall, "PR recall monotonicity");
        expect(check_constraints_full(r.chain.final_state, sc.network.meta).valid(), "chain state validity");
    }
    std::string detail = "generator validity (1000 seeds), cascade monotonicity and causality, transpose "
                         "consistency, cache coherence, marginal bounds, PR monotonicity";
    if (!failed.empty()) {
        detail = "violated:";
        for (const auto& f : failed) detail += " " + f + ";";
    }
    return {failed.empty(), detail};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int number, const char* name, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += !o.pass;
        std::printf("%s %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", number, name, o.detail.c_str(), secs);
        std::fflush(stdout);
    };

    report(1, "candidate-space counts", check_counting);
    report(2, "edge-list likelihood equals naive", check_likelihood_equivalence);
    report(3, "incremental validation equals full check", check_incremental_validation);
    report(4, "chain matches exact posterior", check_exact_posterior);
    report(5, "chain visits every valid topology", check_irreducibility);
    std::vector<Scenario> scs;
    try {
        scs = reference_scenarios();
    } catch (const std::exception& e) {
        std::printf("could not build reference scenarios: %s\n", e.what());
    }
    auto with_scenarios = [&](Outcome (*fn)(const std::vector<Scenario>&)) {
        return [&scs, fn] { return scs.size() == kSeeds ? fn(scs) : Outcome{false, "no reference scenarios"}; };
    };
    report(6, "accuracy grows with data", with_scenarios(check_data_monotonicity));
    report(7, "constrained proposal beats unconstrained", with_scenarios(check_ip_benefit));
    report(8, "optimisation speedups", with_scenarios(check_speedups));
    report(9, "q sweep shape", check_q_sweep);
    report(10, "randomised properties", with_scenarios(check_properties));
    std::printf("%d of 10 checks failed\n", failures);
    return failures == 0 ? 0 : 1;
}
