#pragma once
// Size of the topology candidate space with and without the level constraints.

#include <algorithm>
#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

#include "icinet/error.hpp"

namespace icinet {

using BigInt = boost::multiprecision::cpp_int;

// n! / (n - k)!
inline BigInt permutations(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    BigInt r = 1;
    for (std::uint64_t i = 0; i < k; ++i) r *= (n - i);
    return r;
}

// Candidate topologies of a two-level (supply -> demand) network:
//   (m1 - m2) * m2 * PM(m1, m2) * sum_{i=0}^{m3} PM(m3, i)
// with m1 = max, m2 = min of the two counts and m3 = m1*m2 - m1.
// Evaluated verbatim; it is 0 whenever the two counts are equal.
inline BigInt count_candidate_topologies(std::uint64_t n_supply, std::uint64_t n_demand) {
    require(n_supply >= 1 && n_demand >= 1, "candidate count needs at least one supply and one demand node");
    const std::uint64_t m1 = std::max(n_supply, n_demand);
    const std::uint64_t m2 = std::min(n_supply, n_demand);
    const std::uint64_t m3 = m1 * m2 - m1;
    BigInt tail = 0;
    for (std::uint64_t i = 0; i <= m3; ++i) tail += permutations(m3, i);
    return BigInt(m1 - m2) * m2 * permutations(m1, m2) * tail;
}

// 2^C(n, 2): every unordered node pair either carries an edge or not.
inline BigInt count_unconstrained(std::uint64_t n_nodes) {
    require(n_nodes >= 2, "unconstrained count needs at least two nodes");
    BigInt r = 1;
    r <<= static_cast<unsigned>(n_nodes * (n_nodes - 1) / 2);
    return r;
}

}  // namespace icinet
