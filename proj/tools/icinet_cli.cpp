// icinet: generate networks, simulate cascades, reconstruct topologies and
// run the experiment grids.
//
// Exit codes: 0 ok, 1 bench order check failed, 2 usage error,
// 3 data/config error, 4 internal error.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "icinet/experiment.hpp"
#include "icinet/io.hpp"

namespace fs = std::filesystem;
using namespace icinet;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// seeds

struct MasterSeed {
    std::uint64_t value = 0;
    std::string source;  // flag | config | ICINET_SEED | entropy
};

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &pos, 0);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size() || s.front() == '-') throw UsageError(what + ": '" + s + "' is not a seed");
    return v;
}

MasterSeed resolve_seed(const std::optional<std::uint64_t>& flag, std::optional<std::uint64_t> from_config = {}) {
    if (flag) return {*flag, "flag"};
    if (from_config) return {*from_config, "config"};
    if (const char* env = std::getenv("ICINET_SEED"); env != nullptr && *env != '\0')
        return {parse_u64(env, "ICINET_SEED"), "ICINET_SEED"};
    std::random_device rd;
    const std::uint64_t v = (std::uint64_t{rd()} << 32) ^ rd();
    return {v, "entropy"};
}

json seed_json(const MasterSeed& s) { return {{"master_seed", s.value}, {"seed_source", s.source}}; }

// ---------------------------------------------------------------------------
// small helpers

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void emit(const std::optional<std::string>& path, const std::string& text) {
    if (path) write_text_file(*path, text);
    else std::cout << text;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

int parse_count(const std::string& s, const std::string& where) {
    std::size_t pos = 0;
    int v = -1;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != s.size() || v < 0) throw UsageError(where + ": '" + s + "' is not a node count");
    return v;
}

// "3x2,3,5" (three blocks of 2 supply, 3 transmission, 5 demand) or
// "water=2,3,5;power=1,2,4".
std::vector<BlockSpec> parse_blocks(const std::string& spec) {
    auto counts = [&](const std::string& s) {
        const auto parts = split(s, ',');
        if (parts.size() != 3)
            throw UsageError("--blocks: expected supply,transmission,demand counts in '" + s + "'");
        return std::array<int, 3>{parse_count(parts[0], "--blocks"), parse_count(parts[1], "--blocks"),
                                  parse_count(parts[2], "--blocks")};
    };
    std::vector<BlockSpec> out;
    if (const auto x = spec.find('x'); x != std::string::npos && spec.find('=') == std::string::npos) {
        const int k = parse_count(spec.substr(0, x), "--blocks");
        if (k < 1) throw UsageError("--blocks: need at least one block");
        const auto c = counts(spec.substr(x + 1));
        static const char* reference_names[] = {"water", "power", "gas"};
        for (int b = 0; b < k; ++b)
            out.push_back({k == 3 ? reference_names[b] : "b" + std::to_string(b), c[0], c[1], c[2]});
        return out;
    }
    for (const auto& item : split(spec, ';')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw UsageError("--blocks: expected NAME=S,T,D in '" + item + "'");
        const auto c = counts(item.substr(eq + 1));
        out.push_back({item.substr(0, eq), c[0], c[1], c[2]});
    }
    if (out.empty()) throw UsageError("--blocks: no blocks given");
    return out;
}

// "power:demand>water:supply"
InterdepDecl parse_interdep(const std::string& s) {
    const auto gt = s.find('>');
    if (gt == std::string::npos) throw UsageError("--interdep: expected SRC:LEVEL>DST:LEVEL, got '" + s + "'");
    auto side = [&](const std::string& part) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw UsageError("--interdep: expected BLOCK:LEVEL, got '" + part + "'");
        try {
            return std::pair{part.substr(0, colon), parse_level(part.substr(colon + 1))};
        } catch (const DataError& e) {
            throw UsageError(std::string("--interdep: ") + e.what());
        }
    };
    const auto [sb, sl] = side(s.substr(0, gt));
    const auto [tb, tl] = side(s.substr(gt + 1));
    return {sb, sl, tb, tl};
}

// Default coupling for --blocks: the reference pattern for the three named
// utilities, otherwise a ring of demand -> supply dependencies.
std::vector<InterdepDecl> default_interdeps(const std::vector<BlockSpec>& blocks) {
    if (blocks.size() == 3 && blocks[0].name == "water" && blocks[1].name == "power" && blocks[2].name == "gas")
        return GenConfig::reference_system().interdeps;
    std::vector<InterdepDecl> out;
    if (blocks.size() < 2) return out;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        const auto& next = blocks[(b + 1) % blocks.size()];
        if (blocks.size() == 2 && b == 1) break;
        out.push_back({blocks[b].name, Level::Demand, next.name, Level::Supply});
    }
    return out;
}

// Ground truth over all ordered pairs so files with arbitrary edges load.
struct LoadedNetwork {
    NetworkFile file;
    std::shared_ptr<const FeasibleSet> feasible;
    Topology truth;
};

LoadedNetwork load_network(const std::string& path) {
    LoadedNetwork out{read_network(path), nullptr, {}};
    out.feasible = std::make_shared<const FeasibleSet>(build_feasible_set(out.file.meta));
    auto all = std::make_shared<const FeasibleSet>(FeasibleSet::all_pairs(out.file.meta));
    out.truth = Topology(all);
    for (const auto& [i, j] : out.file.edges) {
        if (i == j) throw DataError(path + ": self-loop on node " + std::to_string(i));
        out.truth.toggle(i, j);
    }
    return out;
}

// Ground truth restricted to the feasible set, as the generator produces it.
Topology feasible_truth(const LoadedNetwork& net) {
    Topology t(net.feasible);
    for (const auto& [i, j] : net.file.edges) {
        if (!net.feasible->contains(i, j))
            throw DataError("edge (" + std::to_string(i) + "," + std::to_string(j) +
                            ") breaks the level or interdependency rules");
        t.toggle(i, j);
    }
    return t;
}

// ---------------------------------------------------------------------------
// sampler flags shared by reconstruct / sweep-q / bench

struct SamplerFlags {
    std::string method = "m1";
    std::optional<std::string> sampler, proposal, likelihood, validation, record_mode;
    int samples = 3000;
    int warmup = 2000;
    int thinning = 1;
    bool non_markovian = false;
    double prior_density = 0.5;

    void add_to(CLI::App* cmd, bool method_flag = true) {
        if (method_flag)
            cmd->add_option("--method", method, "preset m1..m5 (override parts with the flags below)")
                ->check(CLI::IsMember({"m1", "m2", "m3", "m4", "m5"}))
                ->capture_default_str();
        cmd->add_option("--sampler", sampler, "tnt|random")->check(CLI::IsMember({"tnt", "random"}));
        cmd->add_option("--proposal", proposal, "ip|unconstrained")->check(CLI::IsMember({"ip", "unconstrained"}));
        cmd->add_option("--likelihood", likelihood, "naive|edgelist")->check(CLI::IsMember({"naive", "edgelist"}));
        cmd->add_option("--validation", validation, "incremental|full|none")
            ->check(CLI::IsMember({"incremental", "full", "none"}));
        cmd->add_option("--record-mode", record_mode, "standard|accepted_only")
            ->check(CLI::IsMember({"standard", "accepted_only"}));
        cmd->add_option("--samples", samples, "total iterations (accepted proposals in accepted_only mode)")
            ->capture_default_str();
        cmd->add_option("--warmup", warmup, "leading samples discarded")->capture_default_str();
        cmd->add_option("--thinning", thinning)->capture_default_str();
        cmd->add_flag("--non-markovian", non_markovian, "every failed node stays active");
        cmd->add_option("--prior-density", prior_density, "flat edge prior probability")->capture_default_str();
    }

    SamplerConfig resolve(const std::string& method_name, double q, std::uint64_t chain_seed) const {
        SamplerConfig c;
        apply_method(c, method_preset(method_name));
        if (sampler) c.sampler = parse_sampler(*sampler);
        if (proposal) {
            c.proposal = parse_proposal(*proposal);
            if (c.proposal == ProposalKind::Unconstrained && !validation) c.validation = ValidationKind::None;
        }
        if (likelihood) c.likelihood = parse_likelihood(*likelihood);
        if (validation) c.validation = parse_validation(*validation);
        if (record_mode) c.record_mode = parse_record_mode(*record_mode);
        c.n_samples = samples;
        c.n_warmup = warmup;
        c.thinning = thinning;
        c.markovian = !non_markovian;
        c.q = q;
        c.seed = chain_seed;
        c.validate();
        return c;
    }

    HsbmPrior prior() const {
        HsbmPrior p;
        p.default_feasible = prior_density;
        p.off_class = prior_density;
        return p;
    }
};

json report_json(const EvalReport& r) {
    return {{"best_f1", r.best_f1}, {"best_threshold", r.best_threshold}, {"feasible_only", r.feasible_only}};
}

json stats_json(const ChainStats& s) {
    return {{"iterations", s.iterations},
            {"accepted", s.accepted},
            {"constraint_rejections", s.constraint_rejections},
            {"likelihood_rejections", s.likelihood_rejections},
            {"likelihood_evaluations", s.likelihood_evaluations},
            {"truncated", s.truncated},
            {"seconds", s.seconds}};
}

// ---------------------------------------------------------------------------
// gen-network

struct GenArgs {
    std::optional<std::string> config;
    std::optional<std::string> blocks;
    std::vector<std::string> interdeps;
    bool no_interdeps = false;
    std::optional<double> intra_density, interdep_density;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
};

int cmd_gen_network(const GenArgs& a) {
    GenConfig cfg = GenConfig::reference_system();
    std::optional<std::uint64_t> config_seed;
    if (a.config) {
        const auto doc = read_json_file(*a.config);
        cfg = gen_config_from_json(doc.contains("generator") ? doc["generator"] : doc);
        const auto& g = doc.contains("generator") ? doc["generator"] : doc;
        if (g.contains("master_seed")) config_seed = g["master_seed"].get<std::uint64_t>();
        else if (g.contains("seed")) config_seed = g["seed"].get<std::uint64_t>();
    }
    if (a.blocks) {
        cfg.blocks = parse_blocks(*a.blocks);
        cfg.interdeps = default_interdeps(cfg.blocks);
    }
    if (!a.interdeps.empty()) {
        cfg.interdeps.clear();
        for (const auto& s : a.interdeps) cfg.interdeps.push_back(parse_interdep(s));
    }
    if (a.no_interdeps) cfg.interdeps.clear();
    if (a.intra_density) cfg.intra_density = *a.intra_density;
    if (a.interdep_density) cfg.interdep_density = *a.interdep_density;

    const auto master = resolve_seed(a.seed, config_seed);
    cfg.seed = substream(master.value, "generation");
    const auto net = generate_icin(cfg);

    json gen = gen_config_to_json(cfg);
    gen["seed"] = master.value;  // master seed; the generator draws from its "generation" stream
    gen["seed_source"] = master.source;
    gen["stream"] = "generation";
    emit(a.output, network_to_json(net.meta, net.topology.edges(), gen).dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

struct SimArgs {
    std::string network;
    int scenarios = 40;
    int min_steps = 5;
    double q = 0.4;
    double ratio = 0.2;
    bool non_markovian = false;
    int max_rejections = 10000;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
};

int cmd_simulate(const SimArgs& a) {
    const auto net = load_network(a.network);
    const auto master = resolve_seed(a.seed);
    CascadeParams p;
    p.n_scenarios = a.scenarios;
    p.min_steps = a.min_steps;
    p.q = a.q;
    p.initial_ratio = a.ratio;
    p.markovian = !a.non_markovian;
    p.max_rejections = a.max_rejections;
    p.seed = substream(master.value, "simulation");
    const auto ds = generate_dataset(net.truth, net.file.meta, p);

    json doc = cascades_to_json(ds);
    json cfg = {{"network", a.network},       {"scenarios", a.scenarios},     {"min_steps", a.min_steps},
                {"q", a.q},                   {"initial_ratio", a.ratio},     {"markovian", p.markovian},
                {"max_rejections", a.max_rejections}};
    cfg.update(seed_json(master));
    cfg["stream"] = "simulation";
    json out = {{"config", cfg}};
    out.update(doc);
    emit(a.output, out.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------------------
// reconstruct

struct ReconArgs {
    std::string network;
    std::string cascades;
    std::string out_dir;
    std::optional<double> q;
    std::optional<std::uint64_t> seed;
    bool no_svg = false;
    SamplerFlags flags;
};

// Writes into a sibling temp directory and renames it into place, so a
// failed run leaves no half-written output directory behind.
class OutputDir {
public:
    explicit OutputDir(const std::string& path) : final_(path) {
        if (fs::exists(final_)) {
            if (!fs::is_directory(final_)) throw DataError("output path '" + path + "' exists and is not a directory");
            work_ = final_;
            return;
        }
        const auto parent = final_.has_parent_path() ? final_.parent_path() : fs::path(".");
        if (!fs::exists(parent)) throw DataError("parent of output directory '" + path + "' does not exist");
        work_ = parent / (final_.filename().string() + ".tmp" + std::to_string(::getpid()));
        fs::create_directories(work_);
    }
    ~OutputDir() {
        std::error_code ec;
        if (work_ != final_) fs::remove_all(work_, ec);
    }
    std::string file(const std::string& name) const { return (work_ / name).string(); }
    void commit() {
        if (work_ != final_) fs::rename(work_, final_);
        work_ = final_;
    }

private:
    fs::path final_;
    fs::path work_;
};

int cmd_reconstruct(const ReconArgs& a) {
    const auto net = load_network(a.network);
    const auto& meta = net.file.meta;
    const auto ds_doc = read_json_file(a.cascades);
    const auto data = cascades_from_json(ds_doc, meta.n_nodes());
    if (!data.meta_digest.empty() && data.meta_digest != meta.digest())
        throw DataError("cascade file was simulated on a different network (digest " + data.meta_digest + " vs " +
                        meta.digest() + ")");
    if (data.empty()) throw DataError(a.cascades + ": no scenarios");

    const auto master = resolve_seed(a.seed);
    const double q = a.q.value_or(data.q);
    const auto cfg = a.flags.resolve(a.flags.method, q, substream(master.value, "chain"));
    const auto prior = a.flags.prior();

    OutputDir out(a.out_dir);
    const auto chain = run_chain(meta, net.feasible, data, prior, cfg);
    const auto marginals = edge_marginals(chain.samples);
    const auto& space = chain.final_state.space();

    json config = {{"network", a.network}, {"cascades", a.cascades}, {"method", a.flags.method}};
    config["sampler"] = sampler_config_to_json(cfg);
    config["prior_density"] = a.flags.prior_density;
    config.update(seed_json(master));
    config["stream"] = "chain";

    json report = {{"config", config}, {"stats", stats_json(chain.stats)}};
    report["n_nodes"] = meta.n_nodes();
    report["pair_space_size"] = space.size();
    report["initial_edges"] = chain.initial.edge_count();

    if (!net.file.edges.empty()) {
        const bool ip = cfg.proposal == ProposalKind::InfrastructureDependent;
        const auto all = precision_recall_curve(marginals, net.truth, nullptr);
        const auto main = ip ? precision_recall_curve(marginals, net.truth, net.feasible.get()) : all;
        report["evaluation"] = {{"primary", report_json(main)},
                                {"all_pairs", report_json(all)},
                                {"mean_marginal_on_true_edges", mean_marginal_on_edges(marginals, net.truth)}};
        write_text_file(out.file("pr_curve.csv"), pr_curve_csv(main));
        if (ip) write_text_file(out.file("pr_curve_all_pairs.csv"), pr_curve_csv(all));
    } else {
        report["evaluation"] = nullptr;
    }

    write_text_file(out.file("marginals.csv"), marginals_csv(marginals, space));
    write_text_file(out.file("trace.csv"), trace_csv(chain.samples));
    export_heatmap(marginals, out.file("heatmap.csv"),
                   a.no_svg ? std::nullopt : std::optional<std::string>(out.file("heatmap.svg")), &meta);
    write_json_file(out.file("report.json"), report);
    out.commit();

    std::cerr << "iterations " << chain.stats.iterations << ", accepted " << chain.stats.accepted << ", "
              << chain.stats.seconds << " s";
    if (report["evaluation"].is_object()) std::cerr << ", best F1 " << report["evaluation"]["primary"]["best_f1"];
    std::cerr << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// grids

struct GridArgs {
    std::optional<std::string> network;
    int repeats = 5;
    int min_steps = 5;
    double ratio = 0.2;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    std::optional<std::string> cells;
    SamplerFlags flags;
};

// Ground truth for repetition k: the fixed network file, or a fresh draw.
struct GridTruth {
    NetworkMeta meta;
    std::shared_ptr<const FeasibleSet> feasible;
    Topology truth;
};

GridTruth grid_truth(const std::optional<LoadedNetwork>& fixed, const GenConfig& base, std::uint64_t gen_seed) {
    if (fixed) return {fixed->file.meta, fixed->feasible, feasible_truth(*fixed)};
    GenConfig g = base;
    g.seed = gen_seed;
    auto net = generate_icin(g);
    return {std::move(net.meta), std::move(net.feasible), std::move(net.topology)};
}

// Each repeat draws the generator seed from its own "generation" stream.
json grid_generator_json(const GenConfig& base) {
    json g = gen_config_to_json(base);
    g["seed"] = "per repeat: generation stream of substream(master_seed, repeat)";
    return g;
}

json grid_config(const GridArgs& a, const MasterSeed& master) {
    json c = {{"network", a.network ? json(*a.network) : json("generated")},
              {"repeats", a.repeats},
              {"min_steps", a.min_steps},
              {"initial_ratio", a.ratio},
              {"samples", a.flags.samples},
              {"warmup", a.flags.warmup},
              {"markovian", !a.flags.non_markovian},
              {"prior_density", a.flags.prior_density}};
    c.update(seed_json(master));
    return c;
}

struct SweepArgs : GridArgs {
    std::vector<double> qs = default_q_grid();
    int scenarios = 20;
};

int cmd_sweep_q(const SweepArgs& a) {
    std::optional<LoadedNetwork> fixed;
    if (a.network) fixed = load_network(*a.network);
    const auto master = resolve_seed(a.seed);
    const auto base = sweep_stand_in();
    for (double q : a.qs)
        if (!(q > 0.0 && q <= 1.0)) throw UsageError("--q values must lie in (0,1]");

    json config = grid_config(a, master);
    config["method"] = a.flags.method;
    config["scenarios"] = a.scenarios;
    config["q"] = a.qs;
    if (!fixed) config["generator"] = grid_generator_json(base);

    std::string cells = "q,repeat,best_f1,seconds,edges\n";
    std::string table = "# " + config.dump() + "\nq,best_f1,best_f1_sd,runtime_s,runtime_sd,repeats\n";
    for (double q : a.qs) {
        std::vector<double> f1, secs;
        for (int k = 0; k < a.repeats; ++k) {
            const auto seeds = cell_seeds(master.value, static_cast<std::uint64_t>(k));
            const auto truth = grid_truth(fixed, base, seeds.generation);
            CascadeParams p;
            p.n_scenarios = a.scenarios;
            p.min_steps = a.min_steps;
            p.q = q;
            p.initial_ratio = a.ratio;
            p.markovian = !a.flags.non_markovian;
            p.seed = seeds.simulation;
            const auto data = generate_dataset(truth.truth, truth.meta, p);
            const auto cfg = a.flags.resolve(a.flags.method, q, seeds.chain);
            const auto r = reconstruct(truth.meta, truth.feasible, truth.truth, data, a.flags.prior(), cfg);
            f1.push_back(r.report.best_f1);
            secs.push_back(r.seconds);
            cells += format_number(q) + "," + std::to_string(k) + "," + format_number(r.report.best_f1) + "," +
                     format_number(r.seconds) + "," + std::to_string(truth.truth.edge_count()) + "\n";
        }
        table += format_number(q) + "," + format_number(mean(f1)) + "," + format_number(stddev(f1)) + "," +
                 format_number(mean(secs)) + "," + format_number(stddev(secs)) + "," + std::to_string(a.repeats) +
                 "\n";
        std::cerr << "q " << q << ": F1 " << mean(f1) << ", " << mean(secs) << " s\n";
    }
    emit(a.output, table);
    if (a.cells) write_text_file(*a.cells, "# " + config.dump() + "\n" + cells);
    return 0;
}

struct BenchArgs : GridArgs {
    std::vector<std::string> methods{"m1", "m2", "m3", "m4", "m5"};
    std::vector<std::string> designs{"E5_5", "E5_15", "E5_40"};
    double q = 0.4;
    bool assert_order = false;
};

int cmd_bench(const BenchArgs& a) {
    std::optional<LoadedNetwork> fixed;
    if (a.network) fixed = load_network(*a.network);
    const auto master = resolve_seed(a.seed);
    const auto base = GenConfig::reference_system();

    std::vector<ExperimentDesign> designs;
    for (const auto& name : a.designs) {
        bool found = false;
        for (const auto& d : experiment_designs())
            if (d.name == name) {
                designs.push_back({d.name, d.n_scenarios, a.min_steps});
                found = true;
            }
        if (!found) throw UsageError("unknown design '" + name + "' (expected E5_5|E5_15|E5_40)");
    }
    for (const auto& m : a.methods) method_preset(m);

    json config = grid_config(a, master);
    config["q"] = a.q;
    config["methods"] = a.methods;
    config["designs"] = a.designs;
    if (!fixed) config["generator"] = grid_generator_json(base);

    // [design][method] -> per-repeat values
    const std::size_t nd = designs.size(), nm = a.methods.size();
    std::vector<std::vector<std::vector<double>>> secs(nd, std::vector<std::vector<double>>(nm));
    auto f1 = secs;
    std::string cells = "design,method,repeat,best_f1,seconds\n";
    for (int k = 0; k < a.repeats; ++k) {
        const auto seeds = cell_seeds(master.value, static_cast<std::uint64_t>(k));
        const auto truth = grid_truth(fixed, base, seeds.generation);
        for (std::size_t d = 0; d < nd; ++d) {
            CascadeParams p;
            p.n_scenarios = designs[d].n_scenarios;
            p.min_steps = designs[d].min_steps;
            p.q = a.q;
            p.initial_ratio = a.ratio;
            p.markovian = !a.flags.non_markovian;
            p.seed = seeds.simulation;
            const auto data = generate_dataset(truth.truth, truth.meta, p);
            for (std::size_t m = 0; m < nm; ++m) {
                const auto cfg = a.flags.resolve(a.methods[m], a.q, seeds.chain);
                const auto r = reconstruct(truth.meta, truth.feasible, truth.truth, data, a.flags.prior(), cfg);
                secs[d][m].push_back(r.seconds);
                f1[d][m].push_back(r.report.best_f1);
                cells += designs[d].name + "," + a.methods[m] + "," + std::to_string(k) + "," +
                         format_number(r.report.best_f1) + "," + format_number(r.seconds) + "\n";
            }
        }
        std::cerr << "repeat " << k + 1 << "/" << a.repeats << " done\n";
    }

    std::string table = "# " + config.dump() + "\ndesign,method,mean_seconds,sd_seconds,mean_best_f1,sd_best_f1,repeats\n";
    for (std::size_t d = 0; d < nd; ++d)
        for (std::size_t m = 0; m < nm; ++m)
            table += designs[d].name + "," + a.methods[m] + "," + format_number(mean(secs[d][m])) + "," +
                     format_number(stddev(secs[d][m])) + "," + format_number(mean(f1[d][m])) + "," +
                     format_number(stddev(f1[d][m])) + "," + std::to_string(a.repeats) + "\n";
    emit(a.output, table);
    if (a.cells) write_text_file(*a.cells, "# " + config.dump() + "\n" + cells);

    if (!a.assert_order) return 0;
    // m1 < m3 < m4 and m1 ~ m2 (within 20%) on the largest design
    auto time_of = [&](const std::string& name) -> std::optional<double> {
        for (std::size_t m = 0; m < nm; ++m)
            if (a.methods[m] == name) return mean(secs[nd - 1][m]);
        return std::nullopt;
    };
    const auto t1 = time_of("m1"), t2 = time_of("m2"), t3 = time_of("m3"), t4 = time_of("m4");
    if (!t1 || !t2 || !t3 || !t4) throw UsageError("--assert-order needs methods m1, m2, m3 and m4");
    const bool ordered = *t1 < *t3 && *t3 < *t4;
    const bool comparable = std::abs(*t2 - *t1) <= 0.2 * *t1;
    std::cerr << "order check on " << designs[nd - 1].name << ": m1 " << *t1 << " s, m2 " << *t2 << " s, m3 " << *t3
              << " s, m4 " << *t4 << " s -> " << (ordered && comparable ? "ok" : "FAILED") << "\n";
    return ordered && comparable ? 0 : 1;
}

void add_grid_options(CLI::App* cmd, GridArgs& a) {
    cmd->add_option("--network", a.network, "fixed ground-truth network (default: generate one per repeat)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--repeats", a.repeats, "repetitions per cell")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--min-steps", a.min_steps)->capture_default_str();
    cmd->add_option("--ratio", a.ratio, "initial failure ratio")->capture_default_str();
    cmd->add_option("--seed", a.seed, "master seed (fallback: ICINET_SEED, then fresh entropy)");
    cmd->add_option("-o,--output", a.output, "summary CSV (default: stdout)");
    cmd->add_option("--cells", a.cells, "per-repeat CSV");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reconstruct interdependent infrastructure networks from cascading-failure data"};
    app.name("icinet");
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen-network", "generate a random constraint-valid network");
    g->add_option("--config", gen.config, "generator config JSON (or a network file with a generator block)")
        ->check(CLI::ExistingFile);
    g->add_option("--blocks", gen.blocks, "KxS,T,D or NAME=S,T,D;NAME=S,T,D (default: water/power/gas 2,3,5)");
    g->add_option("--interdep", gen.interdeps, "SRC:LEVEL>DST:LEVEL, repeatable");
    g->add_flag("--no-interdeps", gen.no_interdeps);
    g->add_option("--intra-density", gen.intra_density, "extra edge probability inside blocks (default 0.1)");
    g->add_option("--interdep-density", gen.interdep_density, "extra edge probability across blocks (default 0)");
    g->add_option("--seed", gen.seed, "master seed (fallback: ICINET_SEED, then fresh entropy)");
    g->add_option("-o,--output", gen.output, "network JSON (default: stdout)");

    SimArgs sim;
    auto* s = app.add_subcommand("simulate", "simulate cascading failures on a network");
    s->add_option("--network", sim.network)->required()->check(CLI::ExistingFile);
    s->add_option("--scenarios", sim.scenarios)->capture_default_str()->check(CLI::NonNegativeNumber);
    s->add_option("--min-steps", sim.min_steps)->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--q", sim.q, "propagation probability")->capture_default_str();
    s->add_option("--ratio", sim.ratio, "initial failure ratio")->capture_default_str();
    s->add_flag("--non-markovian", sim.non_markovian, "every failed node stays active");
    s->add_option("--max-rejections", sim.max_rejections)->capture_default_str()->check(CLI::PositiveNumber);
    s->add_option("--seed", sim.seed, "master seed (fallback: ICINET_SEED, then fresh entropy)");
    s->add_option("-o,--output", sim.output, "cascade JSON (default: stdout)");

    ReconArgs rec;
    auto* r = app.add_subcommand("reconstruct", "sample the posterior over topologies");
    r->add_option("--network", rec.network, "network JSON; its edges, if any, are the ground truth")
        ->required()
        ->check(CLI::ExistingFile);
    r->add_option("--cascades", rec.cascades)->required()->check(CLI::ExistingFile);
    r->add_option("--out-dir", rec.out_dir)->required();
    r->add_option("--q", rec.q, "propagation probability (default: the one in the cascade file)");
    r->add_option("--seed", rec.seed, "master seed (fallback: ICINET_SEED, then fresh entropy)");
    r->add_flag("--no-svg", rec.no_svg);
    rec.flags.add_to(r);

    SweepArgs sweep;
    auto* sq = app.add_subcommand("sweep-q", "F1 and runtime against the propagation probability");
    add_grid_options(sq, sweep);
    sq->add_option("--q", sweep.qs, "q values (default 0.1..0.9)")->delimiter(',');
    sq->add_option("--scenarios", sweep.scenarios)->capture_default_str();
    sweep.flags.add_to(sq);

    BenchArgs bench;
    bench.repeats = 10;
    auto* b = app.add_subcommand("bench", "time and F1 across methods and data designs");
    add_grid_options(b, bench);
    b->add_option("--methods", bench.methods)->delimiter(',')->check(CLI::IsMember({"m1", "m2", "m3", "m4", "m5"}));
    b->add_option("--designs", bench.designs)->delimiter(',')->check(CLI::IsMember({"E5_5", "E5_15", "E5_40"}));
    b->add_option("--q", bench.q)->capture_default_str();
    b->add_flag("--assert-order", bench.assert_order, "exit 1 unless m1 < m3 < m4 and m2 within 20% of m1");
    bench.flags.add_to(b, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*g) return cmd_gen_network(gen);
        if (*s) return cmd_simulate(sim);
        if (*r) return cmd_reconstruct(rec);
        if (*sq) return cmd_sweep_q(sweep);
        if (*b) return cmd_bench(bench);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}
