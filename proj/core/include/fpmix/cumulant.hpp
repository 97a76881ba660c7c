#ifndef FPMIX_CUMULANT_HPP
#define FPMIX_CUMULANT_HPP

#include <cstdint>
#include <map>
#include <vector>

#include "fpmix/mixing.hpp"
#include "fpmix/prime_family.hpp"

namespace fpmix {

// disjoint nonempty blocks covering {0..r-1}, blocks and block lists sorted
using PartitionSet = std::vector<std::vector<int>>;

// all partitions of {0..r-1} via restricted-growth strings, lexicographic
std::vector<PartitionSet> partitions_of(int r);

// moments are 0/1: subset I maps to whether sum_{j in I} Q_j R^(a_j) = 0
struct MomentTable {
    int r = 0;
    std::vector<int64_t> m; // indexed by subset bitmask; m[0] = 1

    int64_t operator()(uint32_t mask) const { return m[mask]; }
};

MomentTable moment_table(const CharacterTuple& chars, const LatticeTuple& tuple,
                         const PrimeFamily& family);
int moment(const CharacterTuple& chars, const LatticeTuple& tuple, const PrimeFamily& family,
           uint32_t subset_mask);

// joint cumulant of the full index set from a moment table (exact integer)
int64_t cumulant_from_moments(const MomentTable& moments, uint32_t subset_mask);
int64_t cumulant(const CharacterTuple& chars, const LatticeTuple& tuple, const PrimeFamily& family);

// moments from a cumulant table s (indexed by subset bitmask, s[0] unused)
MomentTable moments_from_cumulants(const std::vector<int64_t>& s, int r);
// inverse direction: full cumulant table from a moment table
std::vector<int64_t> cumulants_from_moments(const MomentTable& moments);

struct GammaCounts {
    std::vector<int64_t> counts;     // gamma(p, r) for p = 1..r
    bool alternating_sum_zero = false;
    __int128 alternating_sum = 0;
};
GammaCounts gamma_counts(int r);

uint64_t count_nonzero_cumulants(const CharacterTuple& chars, const PrimeFamily& family,
                                 const BoxDomain& box, int r, uint64_t budget = 1ull << 33,
                                 int threads = 1);

struct WeightedCumulantSum {
    double value = 0.0;        // sum over support^r of w(l_1)...w(l_r) C(l_1..l_r)
    double weight_l2 = 0.0;    // sum of w^2
    double leonov_ratio = 0.0; // value / (sum w^2)^(r/2)
};
// weights as a sparse map from lattice points; cumulants of the character
// orbit of a single observable character tuple entry applied at each point
WeightedCumulantSum weighted_cumulant_sum(const CharacterTuple& chars, const PrimeFamily& family,
                                          const std::map<LatticePoint, double>& weights, int r,
                                          uint64_t budget = 1ull << 33);

} // namespace fpmix

#endif
