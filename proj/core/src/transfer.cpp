#include "fpmix/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace fpmix {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void add_term(std::map<LaurentUniPoly, std::complex<double>>& acc, const LaurentUniPoly& q,
              std::complex<double> c) {
    auto [it, fresh] = acc.try_emplace(q, c);
    if (!fresh) it->second += c;
}

TrigPoly from_map(uint32_t p, const std::map<LaurentUniPoly, std::complex<double>>& acc) {
    TrigPoly out{p, {}};
    for (const auto& [q, c] : acc)
        if (std::abs(c) != 0.0) out.terms.emplace_back(c, q);
    return out;
}

} // namespace

TrigPoly compose_apply(const TransferSpec& spec, const TrigPoly& f) {
    std::map<LaurentUniPoly, std::complex<double>> acc;
    for (const auto& [c, q] : f.terms)
        add_term(acc, LaurentUniPoly(q.base * spec.r, q.offset), c);
    return from_map(f.p, acc);
}

TrigPoly transfer_apply(const TransferSpec& spec, const TrigPoly& f, int n) {
    if (n < 0) throw std::invalid_argument("transfer_apply: negative iteration count");
    if (n == 0) return f;
    // normalized parts: R = x^e rhat with rhat(0) != 0; x powers are units in
    // the Laurent ring, so divisibility is decided by rhat alone
    auto nf = normalize_laurent(LaurentUniPoly(spec.r, 0));
    const UniPoly rhat_n = nf.tilde.is_one() ? UniPoly::one(spec.r.modulus()) : nf.tilde.pow(static_cast<uint64_t>(n));
    std::map<LaurentUniPoly, std::complex<double>> acc;
    for (const auto& [c, q] : f.terms) {
        UniPoly base = q.base;
        int off = q.offset - n * nf.shift;
        if (!rhat_n.is_one()) {
            auto dr = base.divrem(rhat_n);
            if (!dr.r.is_zero()) continue; // character outside the image: drops
            base = dr.q;
        }
        add_term(acc, LaurentUniPoly(base, off), c);
    }
    return from_map(f.p, acc);
}

int exactness_index(const TransferSpec& spec, const LaurentUniPoly& q) {
    if (q.is_zero()) throw std::invalid_argument("exactness_index: zero character");
    if (spec.monomial) throw std::domain_error("exactness_index: monomial polynomial is not exact");
    auto nf = normalize_laurent(LaurentUniPoly(spec.r, 0));
    return q.base.multiplicity_of(nf.tilde) + 1;
}

namespace {

struct Egcd {
    UniPoly g, u, v; // u a + v b = g
};
Egcd extended_gcd(const UniPoly& a, const UniPoly& b) {
    const uint32_t p = a.modulus();
    UniPoly r0 = a, r1 = b;
    UniPoly u0 = UniPoly::one(p), u1 = UniPoly::zero(p);
    UniPoly v0 = UniPoly::zero(p), v1 = UniPoly::one(p);
    while (!r1.is_zero()) {
        auto dr = r0.divrem(r1);
        UniPoly r2 = dr.r;
        UniPoly u2 = u0 - dr.q * u1;
        UniPoly v2 = v0 - dr.q * v1;
        r0 = r1; r1 = r2;
        u0 = u1; u1 = u2;
        v0 = v1; v1 = v2;
    }
    if (!r0.is_zero() && !r0.is_monic()) {
        uint32_t inv = fp_inv(r0.leading(), p);
        r0 = r0.scaled(inv);
        u0 = u0.scaled(inv);
        v0 = v0.scaled(inv);
    }
    return {r0, u0, v0};
}

} // namespace

CommutationResult complete_commutation(const UniPoly& r1, const UniPoly& r2, int char_degree_bound) {
    if (r1.is_zero() || r2.is_zero()) throw std::invalid_argument("complete_commutation: zero input");
    const uint32_t p = r1.modulus();
    auto e = extended_gcd(r1, r2);
    CommutationResult out;
    out.gcd_poly = e.g;
    out.bezout_u = e.u;
    out.bezout_v = e.v;
    out.commuting = e.g.is_one();

    // operator identity on every character of bounded degree:
    // T2 Pi1 chi_Q = Pi1 T2 chi_Q
    out.char_level_ok = true;
    uint64_t total = 1;
    for (int i = 0; i <= char_degree_bound; ++i) total *= p;
    for (uint64_t code = 1; code < total; ++code) {
        std::vector<uint32_t> c;
        uint64_t t = code;
        for (int i = 0; i <= char_degree_bound; ++i) {
            c.push_back(static_cast<uint32_t>(t % p));
            t /= p;
        }
        UniPoly q(p, std::move(c));
        auto d1 = q.divrem(r1);
        bool lhs_def = d1.r.is_zero();
        UniPoly lhs = lhs_def ? d1.q * r2 : UniPoly::zero(p);
        UniPoly qr2 = q * r2;
        auto d2 = qr2.divrem(r1);
        bool rhs_def = d2.r.is_zero();
        UniPoly rhs = rhs_def ? d2.q : UniPoly::zero(p);
        ++out.chars_checked;
        if (lhs_def != rhs_def || !(lhs == rhs)) {
            out.char_level_ok = false;
            break;
        }
    }
    return out;
}

namespace {

// evaluation frame: distinct coordinate positions read by the observable
struct Frame {
    std::vector<int> positions;
    std::vector<std::vector<std::pair<size_t, uint32_t>>> phases; // per term: (slot, coeff)
};

Frame build_frame(const TrigPoly& f) {
    Frame fr;
    std::map<int, size_t> slot;
    for (const auto& [c, q] : f.terms) {
        std::vector<std::pair<size_t, uint32_t>> ph;
        for (size_t k = 0; k < q.base.coeffs().size(); ++k) {
            uint32_t ck = q.base.coeff(k);
            if (!ck) continue;
            int pos = q.offset + static_cast<int>(k);
            auto [it, fresh] = slot.try_emplace(pos, slot.size());
            ph.emplace_back(it->second, ck);
        }
        fr.phases.push_back(std::move(ph));
    }
    fr.positions.resize(slot.size());
    for (const auto& [pos, idx] : slot) fr.positions[idx] = pos;
    return fr;
}

std::complex<double> eval_frame(const TrigPoly& f, const Frame& fr, const std::vector<uint8_t>& z) {
    std::complex<double> acc = 0;
    for (size_t j = 0; j < f.terms.size(); ++j) {
        uint32_t phase = 0;
        for (const auto& [slot, ck] : fr.phases[j]) phase = fp_add(phase, fp_mul(ck, z[slot], f.p), f.p);
        double a = kTwoPi * static_cast<double>(phase) / static_cast<double>(f.p);
        acc += f.terms[j].first * std::complex<double>(std::cos(a), std::sin(a));
    }
    return acc;
}

} // namespace

double sup_norm(const TrigPoly& f, uint64_t budget) {
    if (f.terms.empty()) return 0.0;
    Frame fr = build_frame(f);
    const uint32_t p = f.p;
    uint64_t total = 1;
    for (size_t i = 0; i < fr.positions.size(); ++i) {
        total *= p;
        if (total > budget) throw BudgetExceeded("sup_norm: window too large");
    }
    double best = 0;
    std::vector<uint8_t> z(fr.positions.size(), 0);
    for (uint64_t code = 0; code < total; ++code) {
        uint64_t t = code;
        for (size_t i = 0; i < z.size(); ++i) {
            z[i] = static_cast<uint8_t>(t % p);
            t /= p;
        }
        best = std::max(best, std::abs(eval_frame(f, fr, z)));
    }
    return best;
}

std::complex<double> char_inner(const TrigPoly& a, const TrigPoly& b) {
    std::complex<double> acc = 0;
    for (const auto& [ca, qa] : a.terms)
        for (const auto& [cb, qb] : b.terms)
            if (qa == qb) acc += ca * std::conj(cb);
    return acc;
}

double variation_profile(const TrigPoly& f, int n, uint64_t budget) {
    if (f.terms.empty()) return 0.0;
    Frame fr = build_frame(f);
    const uint32_t p = f.p;
    // coordinates inside [-n, n] are pinned, the rest flip freely
    std::vector<size_t> fixed, free_slots;
    for (size_t i = 0; i < fr.positions.size(); ++i)
        (std::abs(fr.positions[i]) <= n ? fixed : free_slots).push_back(i);
    uint64_t fixed_total = 1, free_total = 1;
    for (size_t i = 0; i < fixed.size(); ++i) {
        fixed_total *= p;
        if (fixed_total > budget) throw BudgetExceeded("variation_profile: window too large");
    }
    for (size_t i = 0; i < free_slots.size(); ++i) {
        free_total *= p;
        if (free_total > budget) throw BudgetExceeded("variation_profile: window too large");
    }
    double best = 0;
    std::vector<uint8_t> z(fr.positions.size(), 0);
    for (uint64_t fc = 0; fc < fixed_total; ++fc) {
        uint64_t t = fc;
        for (size_t i : fixed) {
            z[i] = static_cast<uint8_t>(t % p);
            t /= p;
        }
        std::vector<std::complex<double>> values;
        values.reserve(free_total);
        for (uint64_t gc = 0; gc < free_total; ++gc) {
            uint64_t u = gc;
            for (size_t i : free_slots) {
                z[i] = static_cast<uint8_t>(u % p);
                u /= p;
            }
            values.push_back(eval_frame(f, fr, z));
        }
        for (size_t i = 0; i < values.size(); ++i)
            for (size_t j = i + 1; j < values.size(); ++j)
                best = std::max(best, std::abs(values[i] - values[j]));
    }
    return best;
}

DecayReport regularity_check(const TrigPoly& f, const UniPoly& r, double lambda, int nmax,
                             double slope_tol) {
    if (lambda >= 1.0 / static_cast<double>(f.p))
        throw std::invalid_argument("regularity_check: lambda must be below 1/p");
    TransferSpec spec(r);
    DecayReport rep;
    for (int n = 1; n <= nmax; ++n) rep.vn.push_back(variation_profile(f, n));
    std::vector<double> xs, ys;
    for (int n = 0; n <= nmax; ++n) {
        double s = sup_norm(transfer_apply(spec, f, n));
        rep.pin_sup.push_back(s);
        if (s > 0) {
            xs.push_back(static_cast<double>(n));
            ys.push_back(std::log(s));
        }
    }
    if (xs.size() >= 2) {
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
        rep.fitted_rate = num / den;
        rep.fitted_c = std::exp(yb - rep.fitted_rate * xb);
        rep.rate_ok = std::abs(rep.fitted_rate - std::log(lambda)) <=
                      slope_tol * std::abs(std::log(lambda));
    }
    return rep;
}

} // namespace fpmix
