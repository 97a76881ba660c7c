#include "fpmix/mixing.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

#include "fpmix/rng.hpp"

namespace fpmix {
namespace {

// common shift moving a box into the nonnegative orthant; the vanishing
// relation is invariant under shifting every tuple entry by the same vector
BoxDomain normalized_box(const BoxDomain& box, LatticePoint& shift) {
    std::vector<std::pair<int64_t, int64_t>> axes = box.axes;
    shift.assign(axes.size(), 0);
    for (size_t i = 0; i < axes.size(); ++i) {
        if (axes[i].first < 0) {
            shift[i] = -axes[i].first;
            axes[i].first += shift[i];
            axes[i].second += shift[i];
        }
    }
    return BoxDomain(axes);
}

std::vector<LatticePoint> box_points(const BoxDomain& box) {
    std::vector<LatticePoint> pts;
    pts.reserve(box.size());
    LatticePoint cur(box.axes.size());
    for (size_t i = 0; i < box.axes.size(); ++i) cur[i] = box.axes[i].first;
    while (true) {
        pts.push_back(cur);
        size_t i = box.axes.size();
        while (i > 0) {
            --i;
            if (++cur[i] < box.axes[i].second) break;
            cur[i] = box.axes[i].first;
            if (i == 0) return pts;
        }
    }
}

UniPoly char_at_point(const LaurentUniPoly& q, const LatticePoint& a, const PrimeFamily& family,
                      int* offset) {
    UniPoly prod = q.base;
    int off = q.offset;
    const uint32_t p = family.modulus();
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0) throw std::logic_error("char_at_point: negative exponent after normalization");
        if (family.at(static_cast<int>(i)) == UniPoly::x(p))
            off += static_cast<int>(a[i]);
        else if (a[i] > 0)
            prod = prod * family.at(static_cast<int>(i)).pow(static_cast<uint64_t>(a[i]));
    }
    *offset = off;
    return prod;
}

constexpr size_t kKeyWords = 8;
using Key = std::array<uint64_t, kKeyWords>;

struct KeyHash {
    uint64_t operator()(const Key& k) const {
        uint64_t h = 0x9e3779b97f4a7c15ull;
        for (uint64_t w : k) {
            h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            h *= 0xbf58476d1ce4e5b9ull;
            h ^= h >> 29;
        }
        return h;
    }
};

// packing of window coefficients: one bit per coefficient for p = 2,
// otherwise 4 bits (p <= 13)
struct Packer {
    uint32_t p;
    int lo;   // lowest exponent of the window
    int width;

    int bits() const { return p == 2 ? 1 : 4; }
    int capacity() const { return static_cast<int>(kKeyWords * 64) / bits(); }

    Key pack(const UniPoly& u, int offset) const {
        Key k{};
        for (size_t i = 0; i < u.coeffs().size(); ++i) {
            uint32_t c = u.coeff(i);
            if (!c) continue;
            int pos = static_cast<int>(i) + offset - lo;
            if (pos < 0 || pos >= capacity()) throw std::logic_error("Packer: coefficient outside window");
            set(k, pos, c);
        }
        return k;
    }
    void set(Key& k, int pos, uint32_t c) const {
        int b = bits();
        int w = pos * b / 64, s = pos * b % 64;
        k[static_cast<size_t>(w)] |= static_cast<uint64_t>(c) << s;
    }
    uint32_t get(const Key& k, int pos) const {
        int b = bits();
        int w = pos * b / 64, s = pos * b % 64;
        return static_cast<uint32_t>((k[static_cast<size_t>(w)] >> s) & ((1u << b) - 1));
    }
    Key add(const Key& a, const Key& b) const {
        Key r{};
        if (p == 2) {
            for (size_t i = 0; i < kKeyWords; ++i) r[i] = a[i] ^ b[i];
            return r;
        }
        for (int pos = 0; pos < width; ++pos) {
            uint32_t c = (get(a, pos) + get(b, pos)) % p;
            if (c) set(r, pos, c);
        }
        return r;
    }
    Key neg(const Key& a) const {
        if (p == 2) return a;
        Key r{};
        for (int pos = 0; pos < width; ++pos) {
            uint32_t c = get(a, pos);
            if (c) set(r, pos, p - c);
        }
        return r;
    }
};

} // namespace

BoxDomain BoxDomain::parse(const std::string& text) {
    std::vector<std::pair<int64_t, int64_t>> axes;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t x = text.find('x', pos);
        std::string part = text.substr(pos, x == std::string::npos ? std::string::npos : x - pos);
        size_t dots = part.find("..");
        if (dots == std::string::npos) throw std::invalid_argument("box: expected lo..hi");
        int64_t lo = std::stoll(part.substr(0, dots));
        int64_t hi = std::stoll(part.substr(dots + 2));
        axes.emplace_back(lo, hi);
        if (x == std::string::npos) break;
        pos = x + 1;
    }
    return BoxDomain(axes);
}

bool is_nonmixing(const LatticeTuple& tuple, const CharacterTuple& chars, const PrimeFamily& family) {
    if (tuple.r() != chars.r()) throw std::invalid_argument("is_nonmixing: tuple/character arity mismatch");
    const uint32_t p = family.modulus();
    // clear negative exponents with a common shift per axis
    LatticePoint mins(static_cast<size_t>(family.size()), 0);
    for (const auto& a : tuple.a) {
        if (a.size() != static_cast<size_t>(family.size()))
            throw std::invalid_argument("is_nonmixing: point dimension mismatch");
        for (size_t i = 0; i < a.size(); ++i) mins[i] = std::min(mins[i], a[i]);
    }
    LaurentUniPoly acc = LaurentUniPoly::zero(p);
    for (size_t j = 0; j < tuple.r(); ++j) {
        LatticePoint shifted = tuple.a[j];
        for (size_t i = 0; i < shifted.size(); ++i) shifted[i] -= mins[i];
        int off = 0;
        UniPoly prod = char_at_point(chars.q[j], shifted, family, &off);
        acc = acc + LaurentUniPoly(prod, off);
    }
    return acc.is_zero();
}

namespace {

EnumerateResult enumerate_core(const CharacterTuple& chars, const PrimeFamily& family,
                               std::vector<LatticePoint> pts, const LatticePoint& unshift, int r,
                               uint64_t budget, bool keep_tuples,
                               const std::function<bool(const LatticeTuple&)>& filter, int threads) {
    if (r < 2) throw std::invalid_argument("enumerate_nonmixing: r must be at least 2");
    if (static_cast<size_t>(r) != chars.r())
        throw std::invalid_argument("enumerate_nonmixing: character count must equal r");
    const uint32_t p = family.modulus();
    if (p != 2 && p > 13) throw BudgetExceeded("enumerate_nonmixing: modulus too large for packing");
    const uint64_t nd = pts.size();
    const int left = (r + 1) / 2, right = r - left;

    double work = 1.0;
    for (int i = 0; i < left; ++i) work *= static_cast<double>(nd);
    if (work > static_cast<double>(budget))
        throw BudgetExceeded("enumerate_nonmixing: |D|^ceil(r/2) exceeds the work budget");

    // evaluate every character at every point once, tracking the exponent
    // window of the whole batch
    std::vector<std::vector<UniPoly>> polys(static_cast<size_t>(r));
    std::vector<std::vector<int>> offs(static_cast<size_t>(r));
    int window_lo = 0, window_hi = 0;
    bool first = true;
    for (int j = 0; j < r; ++j) {
        polys[static_cast<size_t>(j)].reserve(nd);
        offs[static_cast<size_t>(j)].reserve(nd);
        for (uint64_t i = 0; i < nd; ++i) {
            int o = 0;
            UniPoly u = char_at_point(chars.q[static_cast<size_t>(j)], pts[i], family, &o);
            int lo = o, hi = o + u.degree_or(0);
            if (first || lo < window_lo) window_lo = lo;
            if (first || hi > window_hi) window_hi = hi;
            first = false;
            polys[static_cast<size_t>(j)].push_back(std::move(u));
            offs[static_cast<size_t>(j)].push_back(o);
        }
    }
    Packer packer{p, window_lo, window_hi - window_lo + 1};
    if (packer.width > packer.capacity())
        throw BudgetExceeded("enumerate_nonmixing: exponent window exceeds the packing capacity");

    std::vector<std::vector<Key>> charkeys(static_cast<size_t>(r));
    for (int j = 0; j < r; ++j) {
        charkeys[static_cast<size_t>(j)].resize(nd);
        for (uint64_t i = 0; i < nd; ++i)
            charkeys[static_cast<size_t>(j)][i] =
                packer.pack(polys[static_cast<size_t>(j)][i], offs[static_cast<size_t>(j)][i]);
        polys[static_cast<size_t>(j)].clear();
        polys[static_cast<size_t>(j)].shrink_to_fit();
    }

    uint64_t left_total = 1, right_total = 1;
    for (int i = 0; i < left; ++i) left_total *= nd;
    for (int i = 0; i < right; ++i) right_total *= nd;

    int nbuckets = 1;
    while (static_cast<double>(left_total) * 40.0 / nbuckets > 64.0 * 1024 * 1024 && nbuckets < 256)
        nbuckets *= 2;

    KeyHash hasher;
    auto left_key = [&](uint64_t code, Key& out) {
        Key acc{};
        for (int j = 0; j < left; ++j) {
            uint64_t idx = code % nd;
            code /= nd;
            acc = packer.add(acc, charkeys[static_cast<size_t>(j)][idx]);
        }
        out = acc;
    };
    auto right_key = [&](uint64_t code, Key& out) {
        Key acc{};
        for (int j = 0; j < right; ++j) {
            uint64_t idx = code % nd;
            code /= nd;
            acc = packer.add(acc, charkeys[static_cast<size_t>(left + j)][idx]);
        }
        out = packer.neg(acc);
    };

    struct BucketOut {
        uint64_t count = 0;
        std::vector<LatticeTuple> tuples;
    };
    std::vector<BucketOut> bucket_out(static_cast<size_t>(nbuckets));

    auto reconstruct = [&](uint64_t lcode, uint64_t rcode) {
        LatticeTuple t;
        t.a.resize(static_cast<size_t>(r));
        uint64_t c = lcode;
        for (int j = 0; j < left; ++j) {
            t.a[static_cast<size_t>(j)] = pts[c % nd];
            c /= nd;
        }
        c = rcode;
        for (int j = 0; j < right; ++j) {
            t.a[static_cast<size_t>(left + j)] = pts[c % nd];
            c /= nd;
        }
        for (auto& a : t.a)
            for (size_t i = 0; i < a.size(); ++i) a[i] -= unshift[i];
        return t;
    };

    auto run_bucket = [&](int b) {
        std::vector<std::pair<Key, uint64_t>> table;
        for (uint64_t code = 0; code < left_total; ++code) {
            Key k;
            left_key(code, k);
            if (static_cast<int>(hasher(k) % static_cast<uint64_t>(nbuckets)) == b)
                table.emplace_back(k, code);
        }
        std::sort(table.begin(), table.end());
        BucketOut& out = bucket_out[static_cast<size_t>(b)];
        for (uint64_t rcode = 0; rcode < right_total; ++rcode) {
            Key k;
            right_key(rcode, k);
            if (static_cast<int>(hasher(k) % static_cast<uint64_t>(nbuckets)) != b) continue;
            auto lo = std::lower_bound(table.begin(), table.end(), std::make_pair(k, uint64_t(0)));
            for (auto it = lo; it != table.end() && it->first == k; ++it) {
                if (filter || keep_tuples) {
                    LatticeTuple t = reconstruct(it->second, rcode);
                    if (filter && !filter(t)) continue;
                    ++out.count;
                    if (keep_tuples) out.tuples.push_back(std::move(t));
                } else {
                    ++out.count;
                }
            }
        }
    };

    if (threads <= 1 || nbuckets == 1) {
        for (int b = 0; b < nbuckets; ++b) run_bucket(b);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        int nt = std::min(threads, nbuckets);
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                for (int b = next.fetch_add(1); b < nbuckets; b = next.fetch_add(1)) run_bucket(b);
            });
        for (auto& th : pool) th.join();
    }

    EnumerateResult result;
    for (auto& b : bucket_out) {
        result.count += b.count;
        for (auto& t : b.tuples) result.tuples.push_back(std::move(t));
    }
    std::sort(result.tuples.begin(), result.tuples.end(),
              [](const LatticeTuple& a, const LatticeTuple& b) { return a.a < b.a; });
    return result;
}

} // namespace

EnumerateResult enumerate_nonmixing(const CharacterTuple& chars, const PrimeFamily& family,
                                    const BoxDomain& box, int r, uint64_t budget, bool keep_tuples,
                                    const std::function<bool(const LatticeTuple&)>& filter,
                                    int threads) {
    if (box.dim() != family.size())
        throw std::invalid_argument("enumerate_nonmixing: box dimension must match the family");
    LatticePoint unshift;
    BoxDomain nbox = normalized_box(box, unshift);
    return enumerate_core(chars, family, box_points(nbox), unshift, r, budget, keep_tuples, filter,
                          threads);
}

EnumerateResult enumerate_nonmixing_points(const CharacterTuple& chars, const PrimeFamily& family,
                                           const std::vector<LatticePoint>& points, int r,
                                           uint64_t budget, bool keep_tuples,
                                           const std::function<bool(const LatticeTuple&)>& filter,
                                           int threads) {
    if (points.empty()) return {};
    LatticePoint unshift(points.front().size(), 0);
    for (const auto& a : points) {
        if (a.size() != static_cast<size_t>(family.size()))
            throw std::invalid_argument("enumerate_nonmixing_points: point dimension mismatch");
        for (size_t i = 0; i < a.size(); ++i) unshift[i] = std::max(unshift[i], -a[i]);
    }
    std::vector<LatticePoint> shifted = points;
    for (auto& a : shifted)
        for (size_t i = 0; i < a.size(); ++i) a[i] += unshift[i];
    std::sort(shifted.begin(), shifted.end());
    return enumerate_core(chars, family, std::move(shifted), unshift, r, budget, keep_tuples, filter,
                          threads);
}

WhCount wh_count(const std::vector<int64_t>& f, int h, uint32_t p, int64_t n, uint64_t budget) {
    if (h < 1) throw std::invalid_argument("wh_count: h must be at least 1");
    if (f.empty()) throw std::invalid_argument("wh_count: empty value set");
    int64_t maxf = 0;
    for (int64_t v : f) {
        if (v == 0) throw std::invalid_argument("wh_count: values must be nonzero");
        maxf = std::max(maxf, std::abs(v));
    }
    int tcap = 1;
    {
        long double bound = static_cast<long double>(n) * h * maxf;
        long double acc = 1;
        while (acc < bound) {
            acc *= p;
            ++tcap;
        }
    }
    long double work = 1;
    for (int i = 0; i < h; ++i) work *= static_cast<long double>(f.size()) * (tcap + 1);
    if (work > static_cast<long double>(budget)) throw BudgetExceeded("wh_count: enumeration too large");

    std::vector<int64_t> powers(static_cast<size_t>(tcap) + 1);
    powers[0] = 1;
    for (int t = 1; t <= tcap; ++t) powers[static_cast<size_t>(t)] = powers[static_cast<size_t>(t - 1)] * p;

    std::set<int64_t> seen;
    // odometer over h slots of (value index, exponent)
    const uint64_t slot = f.size() * static_cast<uint64_t>(tcap + 1);
    std::vector<uint64_t> code(static_cast<size_t>(h), 0);
    while (true) {
        __int128 sum = 0;
        for (int i = 0; i < h; ++i) {
            uint64_t c = code[static_cast<size_t>(i)];
            int64_t v = f[c % f.size()];
            int t = static_cast<int>(c / f.size());
            sum += static_cast<__int128>(v) * powers[static_cast<size_t>(t)];
        }
        if (sum >= -static_cast<__int128>(n) && sum <= static_cast<__int128>(n))
            seen.insert(static_cast<int64_t>(sum));
        size_t i = code.size();
        bool done = true;
        while (i > 0) {
            --i;
            if (++code[i] < slot) {
                done = false;
                break;
            }
            code[i] = 0;
        }
        if (done) break;
    }
    WhCount out;
    out.witnesses.assign(seen.begin(), seen.end());
    out.count = out.witnesses.size();
    return out;
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: need at least two points");
    double xb = 0, yb = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        xb += xs[i];
        yb += ys[i];
    }
    xb /= static_cast<double>(xs.size());
    yb /= static_cast<double>(xs.size());
    double num = 0, den = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        num += (xs[i] - xb) * (ys[i] - yb);
        den += (xs[i] - xb) * (xs[i] - xb);
    }
    return num / den;
}

GrowthReport growth_report(const CharacterTuple& chars, const PrimeFamily& family, int r,
                           const std::vector<int64_t>& sides, uint64_t budget, bool, int threads) {
    if (sides.size() < 3) throw std::invalid_argument("growth_report: need at least three box sizes");
    for (size_t i = 1; i < sides.size(); ++i)
        if (sides[i] <= sides[i - 1]) throw std::invalid_argument("growth_report: sizes must increase");
    GrowthReport rep;
    std::vector<double> xs, ys;
    for (int64_t n : sides) {
        BoxDomain box(std::vector<std::pair<int64_t, int64_t>>(static_cast<size_t>(family.size()),
                                                               {0, n}));
        auto res = enumerate_nonmixing(chars, family, box, r, budget, false, {}, threads);
        rep.box_sizes.push_back(box.size());
        rep.counts.push_back(res.count);
        xs.push_back(std::log(static_cast<double>(box.size())));
        ys.push_back(std::log(static_cast<double>(std::max<uint64_t>(res.count, 1))));
    }
    rep.fitted_exponent = fit_loglog_slope(xs, ys);
    return rep;
}

} // namespace fpmix
