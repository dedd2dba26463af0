#include <gtest/gtest.h>

#include "icinet/constraints.hpp"
#include "icinet/counting.hpp"
#include "icinet/evaluation.hpp"
#include "test_support.hpp"

using namespace icinet;

TEST(Counting, Permutations) {
    EXPECT_EQ(permutations(5, 0), 1);
    EXPECT_EQ(permutations(5, 2), 20);
    EXPECT_EQ(permutations(3, 3), 6);
    EXPECT_EQ(permutations(2, 3), 0);
}

TEST(Counting, CandidateTopologiesTwoByThree) {
    // m1=3, m2=2, m3=3: 1 * 2 * 6 * (1 + 3 + 6 + 6) = 192
    EXPECT_EQ(count_candidate_topologies(2, 3), 192);
    EXPECT_EQ(count_candidate_topologies(3, 2), 192);
}

TEST(Counting, CandidateTopologiesEqualCountsGiveZero) {
    EXPECT_EQ(count_candidate_topologies(1, 1), 0);
    EXPECT_EQ(count_candidate_topologies(4, 4), 0);
}

TEST(Counting, CandidateTopologiesOneSupply) {
    // m1=n, m2=1, m3=0: (n-1) * 1 * n * 1
    EXPECT_EQ(count_candidate_topologies(1, 5), 20);
}

TEST(Counting, Unconstrained) {
    EXPECT_EQ(count_unconstrained(2), 2);
    EXPECT_EQ(count_unconstrained(4), 64);
    EXPECT_EQ(count_unconstrained(5), 1024);
    BigInt big = count_unconstrained(60);
    EXPECT_EQ(big, BigInt(1) << 1770);
}

TEST(Counting, RejectsDegenerateInput) {
    EXPECT_THROW(count_candidate_topologies(0, 3), DataError);
    EXPECT_THROW(count_unconstrained(1), DataError);
}

// The closed form is not bounded by the unconstrained count: for (3,4) it
// already exceeds 2^C(7,2).
TEST(Counting, ClosedFormGrowsFasterThanUnconstrained) {
    EXPECT_LT(count_candidate_topologies(2, 3), count_unconstrained(5));
    EXPECT_EQ(count_candidate_topologies(3, 4), 7891272);
    EXPECT_GT(count_candidate_topologies(3, 4), count_unconstrained(7));
}

// Brute-force count of valid two-level topologies: every supply node needs a
// demand successor and every demand node a supply predecessor, i.e. the edge
// covers of K_{ns,nd}. This differs from the closed formula above, which
// counts a different quantity; both are kept so the gap stays visible.
TEST(Counting, EnumeratedTwoLevelTopologies) {
    auto sys = icinet::testing::make_system(icinet::testing::single_block(2, 0, 3));
    const auto valid = enumerate_valid_topologies(sys.meta, sys.feasible);
    // inclusion-exclusion over uncovered vertices of K_{2,3}
    EXPECT_EQ(valid.size(), 25u);
    EXPECT_NE(BigInt(valid.size()), count_candidate_topologies(2, 3));

    auto one = icinet::testing::make_system(icinet::testing::single_block(1, 0, 2));
    EXPECT_EQ(enumerate_valid_topologies(one.meta, one.feasible).size(), 1u);
}
