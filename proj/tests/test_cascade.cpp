#include <gtest/gtest.h>

#include <cmath>

#include "icinet/cascade.hpp"
#include "icinet/synth.hpp"
#include "test_support.hpp"

using namespace icinet;
using icinet::testing::make_system;
using icinet::testing::single_block;

TEST(FailureProbability, Values) {
    EXPECT_DOUBLE_EQ(node_failure_probability(0.4, 0), 0.0);
    EXPECT_DOUBLE_EQ(node_failure_probability(0.4, 1), 0.4);
    EXPECT_NEAR(node_failure_probability(0.4, 2), 0.64, 1e-12);
    EXPECT_NEAR(node_failure_probability(0.4, 3), 1.0 - 0.216, 1e-12);
    EXPECT_DOUBLE_EQ(node_failure_probability(1.0, 1), 1.0);
    EXPECT_DOUBLE_EQ(node_failure_probability(0.0, 5), 0.0);
}

TEST(Scenario, StatesAreMonotone) {
    const CascadeScenario sc({1, 2, 0, 3}, 3);
    EXPECT_TRUE(sc.failed(1, 0));
    EXPECT_FALSE(sc.failed(1, 1));
    EXPECT_TRUE(sc.failed(2, 1));
    EXPECT_TRUE(sc.failed(3, 1));
    EXPECT_FALSE(sc.failed(3, 2));
    EXPECT_EQ(std::vector<NodeId>(sc.newly_failed(3).begin(), sc.newly_failed(3).end()), std::vector<NodeId>{3});
}

TEST(Scenario, RejectsBadTimes) {
    EXPECT_THROW(CascadeScenario({0, 2}, 2), DataError);   // nothing at t = 1
    EXPECT_THROW(CascadeScenario({1, 4}, 3), DataError);   // beyond T
    EXPECT_THROW(CascadeScenario({1, -1}, 3), DataError);
    EXPECT_THROW(CascadeScenario({1}, 0), DataError);
}

TEST(Simulation, CertainPropagationAlongChain) {
    auto sys = make_system(single_block(1, 1, 1));
    const Topology topo(sys.feasible, std::vector<NodePair>{{0, 1}, {1, 2}});
    Rng rng = make_rng(1);
    const std::vector<NodeId> seeds{0};
    const auto sc = simulate_from(topo, 1.0, seeds, true, rng);
    EXPECT_EQ(sc.steps(), 3);
    EXPECT_EQ(sc.fail_times(), (std::vector<int>{1, 2, 3}));
}

TEST(Simulation, ZeroProbabilityStopsAtSeeds) {
    auto sys = make_system(single_block(1, 1, 1));
    const Topology topo(sys.feasible, std::vector<NodePair>{{0, 1}, {1, 2}});
    Rng rng = make_rng(1);
    const std::vector<NodeId> seeds{0};
    const auto sc = simulate_from(topo, 0.0, seeds, true, rng);
    EXPECT_EQ(sc.steps(), 1);
    EXPECT_EQ(sc.fail_times(), (std::vector<int>{1, 0, 0}));
}

TEST(Simulation, MarkovianIgnoresStaleFailures) {
    auto sys = make_system(single_block(1, 1, 1));
    // s -> t, s -> d; t has no edge to d
    const Topology topo(sys.feasible, std::vector<NodePair>{{0, 1}, {0, 2}});
    const std::vector<int> fail_time{1, 2, 0};
    Rng rng = make_rng(2);
    // at t = 2 only the transmission node is newly failed and it has no successor
    EXPECT_TRUE(propagate_step(topo, 1.0, true, fail_time, 2, rng).empty());
    EXPECT_EQ(propagate_step(topo, 1.0, false, fail_time, 2, rng), std::vector<NodeId>{2});
}

TEST(Simulation, SeedCountFollowsRatio) {
    Rng rng = make_rng(3);
    EXPECT_EQ(sample_seed_nodes(30, 0.2, rng).size(), 6u);
    EXPECT_EQ(sample_seed_nodes(7, 0.2, rng).size(), 2u);
    EXPECT_EQ(sample_seed_nodes(3, 0.01, rng).size(), 1u);
    const auto s = sample_seed_nodes(30, 0.5, rng);
    EXPECT_TRUE(std::is_sorted(s.begin(), s.end()));
    EXPECT_EQ(std::adjacent_find(s.begin(), s.end()), s.end());
}

// A demand node with k active failed predecessors fails with 1 - (1 - q)^k.
TEST(Simulation, EmpiricalFailureRateMatchesModel) {
    auto sys = make_system(single_block(3, 0, 1));
    for (int k = 1; k <= 3; ++k) {
        std::vector<NodePair> edges;
        for (NodeId s = 0; s < k; ++s) edges.push_back({s, 3});
        const Topology topo(sys.feasible, edges);
        std::vector<int> fail_time{1, 1, 1, 0};
        const double q = 0.3;
        const double p = node_failure_probability(q, k);
        const int trials = 40000;
        Rng rng = make_rng(100 + static_cast<std::uint64_t>(k));
        int hits = 0;
        for (int n = 0; n < trials; ++n) hits += !propagate_step(topo, q, true, fail_time, 1, rng).empty();
        const double se = std::sqrt(p * (1 - p) / trials);
        EXPECT_NEAR(static_cast<double>(hits) / trials, p, 3 * se) << "k = " << k;
    }
}

TEST(Dataset, ScenariosMeetMinimumLength) {
    auto cfg = GenConfig::reference_system(4);
    const auto net = generate_icin(cfg);
    CascadeParams p;
    p.n_scenarios = 15;
    p.seed = 9;
    const auto ds = generate_dataset(net.topology, net.meta, p);
    ASSERT_EQ(ds.scenarios.size(), 15u);
    for (const auto& sc : ds.scenarios) {
        EXPECT_GE(sc.steps(), 5);
        EXPECT_EQ(sc.n_nodes(), 30);
        // the last step has a new failure and seeds are 20% of the nodes
        EXPECT_FALSE(sc.newly_failed(sc.steps()).empty());
        EXPECT_EQ(sc.newly_failed(1).size(), 6u);
    }
    EXPECT_EQ(ds.meta_digest, net.meta.digest());
}

TEST(Dataset, DeterministicAndPrefixStable) {
    const auto net = generate_icin(GenConfig::reference_system(4));
    CascadeParams p;
    p.seed = 5;
    p.n_scenarios = 5;
    const auto a = generate_dataset(net.topology, net.meta, p);
    const auto b = generate_dataset(net.topology, net.meta, p);
    p.n_scenarios = 8;
    const auto c = generate_dataset(net.topology, net.meta, p);
    EXPECT_EQ(a.scenarios, b.scenarios);
    for (std::size_t k = 0; k < a.scenarios.size(); ++k) EXPECT_EQ(a.scenarios[k], c.scenarios[k]);
}

TEST(Dataset, AbortsWhenMinimumLengthIsUnreachable) {
    auto sys = make_system(single_block(1, 0, 1));
    const Topology topo(sys.feasible, std::vector<NodePair>{{0, 1}});
    CascadeParams p;
    p.n_scenarios = 1;
    p.min_steps = 5;  // a two-node chain lasts at most two steps
    p.max_rejections = 200;
    EXPECT_THROW(generate_dataset(topo, sys.meta, p), DataError);
}

TEST(Dataset, RejectsBadParameters) {
    const auto net = generate_icin(GenConfig::reference_system(4));
    Rng rng = make_rng(0);
    EXPECT_THROW(simulate_cascade(net.topology, 0.4, 0.0, true, rng), DataError);
    EXPECT_THROW(simulate_cascade(net.topology, 0.4, 1.0, true, rng), DataError);
    EXPECT_THROW(simulate_cascade(net.topology, 1.5, 0.2, true, rng), DataError);
}
