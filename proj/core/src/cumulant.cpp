#include "fpmix/cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fpmix {
namespace {

constexpr int kMaxR = 10; // Bell(10) = 115975 partitions

int64_t factorial(int n) {
    int64_t r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// partitions of an explicit element list
void partitions_over(const std::vector<int>& elems, std::vector<PartitionSet>& out) {
    const int n = static_cast<int>(elems.size());
    std::vector<int> rgs(static_cast<size_t>(n), 0);
    std::vector<int> maxv(static_cast<size_t>(n), 0);
    // lexicographic restricted-growth strings
    while (true) {
        int blocks = 0;
        for (int i = 0; i < n; ++i) blocks = std::max(blocks, rgs[static_cast<size_t>(i)] + 1);
        PartitionSet part(static_cast<size_t>(blocks));
        for (int i = 0; i < n; ++i) part[static_cast<size_t>(rgs[static_cast<size_t>(i)])].push_back(elems[static_cast<size_t>(i)]);
        out.push_back(std::move(part));
        // advance
        int i = n - 1;
        while (i > 0) {
            int cap = 0;
            for (int j = 0; j < i; ++j) cap = std::max(cap, rgs[static_cast<size_t>(j)]);
            if (rgs[static_cast<size_t>(i)] <= cap) break;
            --i;
        }
        if (i == 0) return;
        ++rgs[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j) rgs[static_cast<size_t>(j)] = 0;
        (void)maxv;
    }
}

} // namespace

std::vector<PartitionSet> partitions_of(int r) {
    if (r < 1 || r > kMaxR) throw std::invalid_argument("partitions_of: r out of range");
    std::vector<int> elems(static_cast<size_t>(r));
    for (int i = 0; i < r; ++i) elems[static_cast<size_t>(i)] = i;
    std::vector<PartitionSet> out;
    partitions_over(elems, out);
    return out;
}

int moment(const CharacterTuple& chars, const LatticeTuple& tuple, const PrimeFamily& family,
           uint32_t subset_mask) {
    if (!subset_mask) return 1;
    std::vector<LaurentUniPoly> q;
    LatticeTuple sub;
    for (size_t j = 0; j < tuple.r(); ++j)
        if (subset_mask & (1u << j)) {
            q.push_back(chars.q[j]);
            sub.a.push_back(tuple.a[j]);
        }
    return is_nonmixing(sub, CharacterTuple(std::move(q)), family) ? 1 : 0;
}

MomentTable moment_table(const CharacterTuple& chars, const LatticeTuple& tuple,
                         const PrimeFamily& family) {
    const int r = static_cast<int>(tuple.r());
    if (r > kMaxR) throw std::invalid_argument("moment_table: r out of range");
    MomentTable t;
    t.r = r;
    t.m.assign(1u << r, 0);
    t.m[0] = 1;
    for (uint32_t mask = 1; mask < (1u << r); ++mask)
        t.m[mask] = moment(chars, tuple, family, mask);
    return t;
}

int64_t cumulant_from_moments(const MomentTable& moments, uint32_t subset_mask) {
    std::vector<int> elems;
    for (int j = 0; j < moments.r; ++j)
        if (subset_mask & (1u << j)) elems.push_back(j);
    if (elems.empty()) throw std::invalid_argument("cumulant_from_moments: empty subset");
    std::vector<PartitionSet> parts;
    partitions_over(elems, parts);
    int64_t acc = 0;
    for (const auto& part : parts) {
        int64_t prod = 1;
        for (const auto& block : part) {
            uint32_t bm = 0;
            for (int j : block) bm |= 1u << j;
            prod *= moments(bm);
            if (!prod) break;
        }
        if (!prod) continue;
        int k = static_cast<int>(part.size());
        int64_t term = factorial(k - 1) * prod;
        acc += (k % 2 == 1) ? term : -term;
    }
    return acc;
}

int64_t cumulant(const CharacterTuple& chars, const LatticeTuple& tuple, const PrimeFamily& family) {
    const int r = static_cast<int>(tuple.r());
    if (r > kMaxR) throw std::invalid_argument("cumulant: r out of range");
    MomentTable t = moment_table(chars, tuple, family);
    return cumulant_from_moments(t, (1u << r) - 1);
}

MomentTable moments_from_cumulants(const std::vector<int64_t>& s, int r) {
    if (s.size() != (1ull << r)) throw std::invalid_argument("moments_from_cumulants: table size");
    MomentTable t;
    t.r = r;
    t.m.assign(1u << r, 0);
    t.m[0] = 1;
    for (uint32_t mask = 1; mask < (1u << r); ++mask) {
        uint32_t low = mask & (~mask + 1); // block containing the lowest element
        uint32_t rest = mask ^ low;
        int64_t acc = 0;
        // sum over subsets S of rest: s[S | low] * m[mask \ (S|low)]
        uint32_t sub = rest;
        while (true) {
            acc += s[sub | low] * t.m[mask ^ (sub | low)];
            if (!sub) break;
            sub = (sub - 1) & rest;
        }
        t.m[mask] = acc;
    }
    return t;
}

std::vector<int64_t> cumulants_from_moments(const MomentTable& moments) {
    const int r = moments.r;
    std::vector<int64_t> s(1ull << r, 0);
    for (uint32_t mask = 1; mask < (1u << r); ++mask) {
        uint32_t low = mask & (~mask + 1);
        uint32_t rest = mask ^ low;
        int64_t acc = moments(mask);
        uint32_t sub = rest;
        while (true) {
            if ((sub | low) != mask) acc -= s[sub | low] * moments.m[mask ^ (sub | low)];
            if (!sub) break;
            sub = (sub - 1) & rest;
        }
        s[mask] = acc;
    }
    return s;
}

GammaCounts gamma_counts(int r) {
    if (r < 1 || r > 20) throw std::invalid_argument("gamma_counts: r out of range");
    // gamma(k, n) = gamma(k-1, n-1) + k * gamma(k, n-1)
    std::vector<std::vector<int64_t>> g(static_cast<size_t>(r) + 1,
                                        std::vector<int64_t>(static_cast<size_t>(r) + 1, 0));
    g[0][0] = 1;
    for (int n = 1; n <= r; ++n)
        for (int k = 1; k <= n; ++k)
            g[static_cast<size_t>(k)][static_cast<size_t>(n)] =
                g[static_cast<size_t>(k - 1)][static_cast<size_t>(n - 1)] +
                static_cast<int64_t>(k) * g[static_cast<size_t>(k)][static_cast<size_t>(n - 1)];
    GammaCounts out;
    __int128 sum = 0;
    __int128 fact = 1;
    for (int k = 1; k <= r; ++k) {
        out.counts.push_back(g[static_cast<size_t>(k)][static_cast<size_t>(r)]);
        if (k >= 2) fact *= (k - 1);
        __int128 term = fact * static_cast<__int128>(g[static_cast<size_t>(k)][static_cast<size_t>(r)]);
        sum += (k % 2 == 1) ? term : -term;
    }
    out.alternating_sum = sum;
    out.alternating_sum_zero = (sum == 0);
    return out;
}

uint64_t count_nonzero_cumulants(const CharacterTuple& chars, const PrimeFamily& family,
                                 const BoxDomain& box, int r, uint64_t budget, int threads) {
    if (r > kMaxR) throw std::invalid_argument("count_nonzero_cumulants: r out of range");
    // a nonzero cumulant forces the full character sum to vanish, so only
    // vanishing tuples are candidates
    auto filter = [&](const LatticeTuple& t) { return cumulant(chars, t, family) != 0; };
    return enumerate_nonmixing(chars, family, box, r, budget, false, filter, threads).count;
}

WeightedCumulantSum weighted_cumulant_sum(const CharacterTuple& chars, const PrimeFamily& family,
                                          const std::map<LatticePoint, double>& weights, int r,
                                          uint64_t budget) {
    if (r > kMaxR) throw std::invalid_argument("weighted_cumulant_sum: r out of range");
    if (weights.empty()) throw std::invalid_argument("weighted_cumulant_sum: empty weights");
    std::vector<LatticePoint> pts;
    pts.reserve(weights.size());
    for (const auto& [pt, w] : weights) pts.push_back(pt);

    WeightedCumulantSum out;
    for (const auto& [pt, w] : weights) out.weight_l2 += w * w;

    auto res = enumerate_nonmixing_points(chars, family, pts, r, budget, true);
    for (const auto& t : res.tuples) {
        int64_t c = cumulant(chars, t, family);
        if (!c) continue;
        double wprod = 1.0;
        for (const auto& a : t.a) wprod *= weights.at(a);
        out.value += wprod * static_cast<double>(c);
    }
    out.leonov_ratio = out.value / std::pow(out.weight_l2, static_cast<double>(r) / 2.0);
    return out;
}

} // namespace fpmix
