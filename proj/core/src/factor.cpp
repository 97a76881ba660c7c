#include "fpmix/factor.hpp"

#include <algorithm>
#include <map>

#include "fpmix/rng.hpp"

namespace fpmix {
namespace {

UniPoly powmod(const UniPoly& base, uint64_t e, const UniPoly& mod) {
    UniPoly r = UniPoly::one(base.modulus());
    UniPoly b = base.divrem(mod).r;
    while (e) {
        if (e & 1) r = (r * b).divrem(mod).r;
        if (e >>= 1) b = (b * b).divrem(mod).r;
    }
    return r;
}

// x^(p^k) mod f, iterated Frobenius
UniPoly xq_pow(const UniPoly& f, unsigned k) {
    const uint32_t p = f.modulus();
    UniPoly r = UniPoly::x(p).divrem(f).r;
    for (unsigned i = 0; i < k; ++i) r = powmod(r, p, f);
    return r;
}

void add_factor(std::map<UniPoly, int>& out, const UniPoly& prime, int mult) {
    out[prime] += mult;
}

// trial division over all monic polynomials of ascending degree
void factor_trial(UniPoly u, int outer_mult, std::map<UniPoly, int>& out) {
    const uint32_t p = u.modulus();
    int d = 1;
    while (!u.is_constant() && d <= *u.degree() / 2) {
        bool found = false;
        uint64_t total = 1;
        for (int i = 0; i < d; ++i) total *= p;
        for (uint64_t code = 0; code < total; ++code) {
            std::vector<uint32_t> c(static_cast<size_t>(d) + 1, 0);
            uint64_t t = code;
            for (int i = 0; i < d; ++i) {
                c[i] = static_cast<uint32_t>(t % p);
                t /= p;
            }
            c[d] = 1;
            UniPoly cand(p, std::move(c));
            auto dr = u.divrem(cand);
            if (dr.r.is_zero()) {
                int m = 0;
                do {
                    u = dr.q;
                    ++m;
                    if (u.is_constant()) break;
                    dr = u.divrem(cand);
                } while (dr.r.is_zero());
                add_factor(out, cand, m * outer_mult);
                found = true;
                break;
            }
        }
        if (!found) ++d;
    }
    if (!u.is_constant()) add_factor(out, u.monic_part(), outer_mult);
}

void factor_equal_degree(const UniPoly& f, int d, int mult, std::map<UniPoly, int>& out, SplitRng& rng);

// distinct-degree stage on a monic squarefree input
void factor_squarefree(const UniPoly& f0, int mult, std::map<UniPoly, int>& out, SplitRng& rng) {
    const uint32_t p = f0.modulus();
    UniPoly f = f0;
    if (f.is_constant()) return;
    if (*f.degree() == 1) {
        add_factor(out, f, mult);
        return;
    }
    UniPoly h = UniPoly::x(p).divrem(f).r;
    for (int d = 1; 2 * d <= *f.degree(); ++d) {
        h = powmod(h, p, f);
        UniPoly g = gcd(h - UniPoly::x(p).divrem(f).r, f);
        if (!g.is_zero() && !g.is_one()) {
            factor_equal_degree(g, d, mult, out, rng);
            f = f.divrem(g).q;
            if (f.is_constant()) return;
            h = h.divrem(f).r;
        }
    }
    if (!f.is_constant()) add_factor(out, f.monic_part(), mult);
}

// Cantor-Zassenhaus split of a product of distinct primes of equal degree d
void factor_equal_degree(const UniPoly& f, int d, int mult, std::map<UniPoly, int>& out, SplitRng& rng) {
    const uint32_t p = f.modulus();
    if (*f.degree() == d) {
        add_factor(out, f.monic_part(), mult);
        return;
    }
    const int n = *f.degree();
    uint64_t qd_half = 0; // (p^d - 1) / 2 for odd p
    if (p != 2) {
        uint64_t q = 1;
        for (int i = 0; i < d; ++i) q *= p;
        qd_half = (q - 1) / 2;
    }
    while (true) {
        std::vector<uint32_t> c(static_cast<size_t>(n), 0);
        for (auto& ci : c) ci = static_cast<uint32_t>(rng.next_below(p));
        UniPoly a(p, std::move(c));
        if (a.is_zero()) continue;
        UniPoly g = gcd(a, f);
        if (!g.is_one() && *g.degree() < n) {
            factor_equal_degree(g, d, mult, out, rng);
            factor_equal_degree(f.divrem(g).q, d, mult, out, rng);
            return;
        }
        UniPoly b;
        if (p == 2) {
            // trace map a + a^2 + ... + a^(2^(d-1)) mod f
            b = a.divrem(f).r;
            UniPoly t = b;
            for (int i = 1; i < d; ++i) {
                t = powmod(t, 2, f);
                b = b + t;
            }
        } else {
            b = powmod(a, qd_half, f) - UniPoly::one(p);
        }
        g = gcd(b, f);
        if (!g.is_zero() && !g.is_one() && *g.degree() < n) {
            factor_equal_degree(g, d, mult, out, rng);
            factor_equal_degree(f.divrem(g).q, d, mult, out, rng);
            return;
        }
    }
}

// characteristic-p squarefree decomposition, then DDF/EDF per layer
void factor_monic(const UniPoly& u, int mult, std::map<UniPoly, int>& out, SplitRng& rng) {
    const uint32_t p = u.modulus();
    if (u.is_constant()) return;
    if (*u.degree() <= 8) {
        factor_trial(u, mult, out);
        return;
    }
    UniPoly der = u.derivative();
    if (der.is_zero()) {
        factor_monic(*u.pth_root(), mult * static_cast<int>(p), out, rng);
        return;
    }
    UniPoly g = gcd(u, der);
    UniPoly w = u.divrem(g).q; // product of primes with multiplicity not divisible by p
    int i = 1;
    while (!w.is_one()) {
        UniPoly y = gcd(w, g);
        UniPoly layer = w.divrem(y).q; // primes of multiplicity exactly i
        if (!layer.is_one()) factor_squarefree(layer, mult * i, out, rng);
        w = y;
        g = g.divrem(y).q;
        ++i;
    }
    if (!g.is_one()) factor_monic(*g.pth_root(), mult * static_cast<int>(p), out, rng);
}

} // namespace

Factorization factor_monic_primes(const UniPoly& u) {
    if (u.is_zero()) throw std::domain_error("factor_monic_primes: zero input");
    Factorization f;
    f.unit = u.leading();
    if (u.is_constant()) return f;
    SplitRng rng(0x5eed0f5eedull); // module-fixed seed: deterministic splitting
    std::map<UniPoly, int> out;
    factor_monic(u.monic_part(), 1, out, rng);
    f.primes.assign(out.begin(), out.end());
    return f;
}

bool is_irreducible(const UniPoly& u) {
    if (u.is_zero() || u.is_constant()) return false;
    if (*u.degree() == 1) return true;
    const uint32_t p = u.modulus();
    const int n = *u.degree();
    // Rabin: x^(p^n) = x mod u, and gcd(x^(p^(n/q)) - x, u) = 1 for primes q | n
    UniPoly xq = xq_pow(u, static_cast<unsigned>(n));
    if (!(xq - UniPoly::x(p).divrem(u).r).is_zero()) return false;
    for (int q = 2; q <= n; ++q) {
        if (n % q) continue;
        bool prime_q = true;
        for (int t = 2; t * t <= q; ++t)
            if (q % t == 0) prime_q = false;
        if (!prime_q) continue;
        UniPoly h = xq_pow(u, static_cast<unsigned>(n / q));
        UniPoly g = gcd(h - UniPoly::x(p).divrem(u).r, u);
        if (!g.is_one()) return false;
    }
    return true;
}

UniPoly expand(const Factorization& f, uint32_t p) {
    UniPoly r = UniPoly::constant(p, f.unit);
    for (const auto& [prime, m] : f.primes) r = r * prime.pow(static_cast<uint64_t>(m));
    return r;
}

} // namespace fpmix
