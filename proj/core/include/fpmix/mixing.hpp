#ifndef FPMIX_MIXING_HPP
#define FPMIX_MIXING_HPP

#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "fpmix/errors.hpp"
#include "fpmix/prime_family.hpp"
#include "fpmix/unipoly.hpp"

namespace fpmix {

// r nonzero Laurent characters Q_1..Q_r
struct CharacterTuple {
    std::vector<LaurentUniPoly> q;

    CharacterTuple(std::vector<LaurentUniPoly> chars) : q(std::move(chars)) {
        if (q.size() < 1) throw std::invalid_argument("CharacterTuple: empty");
        for (const auto& c : q)
            if (c.is_zero()) throw std::invalid_argument("CharacterTuple: zero character");
    }
    size_t r() const { return q.size(); }
};

using LatticePoint = std::vector<int64_t>;

struct LatticeTuple {
    std::vector<LatticePoint> a;
    size_t r() const { return a.size(); }
};

// product of per-axis integer ranges [lo, hi)
struct BoxDomain {
    std::vector<std::pair<int64_t, int64_t>> axes;

    explicit BoxDomain(std::vector<std::pair<int64_t, int64_t>> ranges) : axes(std::move(ranges)) {
        for (auto [lo, hi] : axes)
            if (lo >= hi) throw std::invalid_argument("BoxDomain: empty range");
    }
    int dim() const { return static_cast<int>(axes.size()); }
    uint64_t size() const {
        uint64_t s = 1;
        for (auto [lo, hi] : axes) s *= static_cast<uint64_t>(hi - lo);
        return s;
    }
    int64_t diameter() const {
        int64_t d = 0;
        for (auto [lo, hi] : axes) d = std::max(d, hi - 1 - lo);
        return d;
    }
    static BoxDomain parse(const std::string& text); // "0..32x0..32"
};

// whether sum_j Q_j prod_i R_i^(a_{j,i}) = 0 exactly (negative exponents are
// cleared by a common unit monomial first)
bool is_nonmixing(const LatticeTuple& tuple, const CharacterTuple& chars, const PrimeFamily& family);

struct EnumerateResult {
    std::vector<LatticeTuple> tuples; // lexicographic in row-major coordinate order
    uint64_t count = 0;
};

// All r-tuples over box^r satisfying the vanishing relation. Meet in the
// middle on packed canonical forms of partial sums; throws BudgetExceeded
// before starting when the work estimate is over budget.
EnumerateResult enumerate_nonmixing(const CharacterTuple& chars, const PrimeFamily& family,
                                    const BoxDomain& box, int r, uint64_t budget = 1ull << 33,
                                    bool keep_tuples = true,
                                    const std::function<bool(const LatticeTuple&)>& filter = {},
                                    int threads = 1);

// same search over an explicit point set instead of a box
EnumerateResult enumerate_nonmixing_points(const CharacterTuple& chars, const PrimeFamily& family,
                                           const std::vector<LatticePoint>& points, int r,
                                           uint64_t budget = 1ull << 33, bool keep_tuples = true,
                                           const std::function<bool(const LatticeTuple&)>& filter = {},
                                           int threads = 1);

struct WhCount {
    uint64_t count = 0;
    std::vector<int64_t> witnesses; // sorted members of W_h in [-N, N]
};
// members of [-N, N] expressible as sum_{i<=h} v_i p^(t_i), v_i in F
WhCount wh_count(const std::vector<int64_t>& f, int h, uint32_t p, int64_t n,
                 uint64_t budget = 1ull << 27);

struct GrowthReport {
    std::vector<uint64_t> box_sizes; // |D|
    std::vector<uint64_t> counts;
    double fitted_exponent = 0.0; // least-squares slope of log count vs log |D|
};
GrowthReport growth_report(const CharacterTuple& chars, const PrimeFamily& family, int r,
                           const std::vector<int64_t>& sides, uint64_t budget = 1ull << 33,
                           bool cumulant_counts = false, int threads = 1);

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

} // namespace fpmix

#endif
