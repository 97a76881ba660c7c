#include "fpmix/specialpoly.hpp"

#include <algorithm>
#include <cassert>
#include <set>

#include "fpmix/gf_linsolve.hpp"

namespace fpmix {
namespace {

int64_t ipow(int64_t b, unsigned e) {
    int64_t r = 1;
    while (e--) r *= b;
    return r;
}

UniPoly family_power(const PrimeFamily& fam, const std::vector<int>& exps) {
    UniPoly r = UniPoly::one(fam.modulus());
    for (size_t i = 0; i < exps.size(); ++i)
        if (exps[i]) r = r * fam.at(static_cast<int>(i)).pow(static_cast<uint64_t>(exps[i]));
    return r;
}

std::vector<int> to_ints(const std::vector<uint8_t>& a) {
    return std::vector<int>(a.begin(), a.end());
}

// integer component sum: entries may reach 2(p-1); exponents hitting a
// multiple of p make the product a p-th power, killing its derivative
std::vector<int> add_exps(const std::vector<uint8_t>& a, const std::vector<uint8_t>& b) {
    std::vector<int> r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = static_cast<int>(a[i]) + static_cast<int>(b[i]);
    return r;
}

bool all_zero(const std::vector<uint8_t>& a) {
    for (uint8_t v : a)
        if (v) return false;
    return true;
}

} // namespace

LaurentUniPoly substitute(const MultiLaurent& gamma, const PrimeFamily& family) {
    if (gamma.nvars() != family.size())
        throw std::invalid_argument("substitute: arity does not match family size");
    const uint32_t p = gamma.modulus();
    const UniPoly x = UniPoly::x(p);
    std::vector<std::map<int32_t, UniPoly>> pow_cache(static_cast<size_t>(family.size()));
    LaurentUniPoly acc = LaurentUniPoly::zero(p);
    for (const auto& [e, c] : gamma.terms()) {
        UniPoly prod = UniPoly::constant(p, c);
        int offset = 0;
        for (int i = 0; i < gamma.nvars(); ++i) {
            int32_t k = e[static_cast<size_t>(i)];
            if (k == 0) continue;
            if (family.at(i) == x) {
                offset += k;
                continue;
            }
            if (k < 0)
                throw std::domain_error("substitute: negative exponent on a non-monomial direction");
            auto& cache = pow_cache[static_cast<size_t>(i)];
            auto it = cache.find(k);
            if (it == cache.end()) it = cache.emplace(k, family.at(i).pow(static_cast<uint64_t>(k))).first;
            prod = prod * it->second;
        }
        acc = acc + LaurentUniPoly(prod, offset);
    }
    return acc;
}

bool is_special(const MultiLaurent& gamma, const PrimeFamily& family) {
    if (gamma.is_zero()) return true;
    Exps mins = gamma.min_exponents();
    for (auto& m : mins) m = m < 0 ? -m : 0;
    MultiLaurent shifted = gamma.shifted(mins); // unit multiple, same vanishing
    return substitute(shifted, family).is_zero();
}

std::map<std::vector<uint8_t>, MultiLaurent> homogeneous_split(const MultiLaurent& gamma) {
    const uint32_t p = gamma.modulus();
    std::map<std::vector<uint8_t>, MultiLaurent> out;
    for (const auto& [e, c] : gamma.terms()) {
        std::vector<uint8_t> alpha(e.size());
        for (size_t i = 0; i < e.size(); ++i)
            alpha[i] = static_cast<uint8_t>(((e[i] % static_cast<int32_t>(p)) + p) % p);
        auto it = out.find(alpha);
        if (it == out.end()) it = out.emplace(alpha, MultiLaurent(p, gamma.nvars())).first;
        it->second.add_term(e, c);
    }
    return out;
}

MultiLaurent bar_component(const MultiLaurent& comp, const std::vector<uint8_t>& alpha) {
    Exps neg(alpha.size());
    for (size_t i = 0; i < alpha.size(); ++i) neg[i] = -static_cast<int32_t>(alpha[i]);
    return comp.shifted(neg);
}

std::vector<uint8_t> u_complement(const std::vector<uint8_t>& beta, uint32_t p) {
    std::vector<uint8_t> r(beta.size());
    for (size_t i = 0; i < beta.size(); ++i)
        r[i] = beta[i] == 0 ? 0 : static_cast<uint8_t>(p - beta[i]);
    return r;
}

MultiLaurent psi_map(const UniPoly& u, PrimeFamily& family) {
    if (u.is_zero()) throw std::domain_error("psi_map: zero polynomial");
    Factorization f = factor_monic_primes(u);
    std::vector<std::pair<int, int>> idx;
    idx.reserve(f.primes.size());
    for (const auto& [prime, m] : f.primes) idx.emplace_back(family.extend(prime), m);
    Exps e(static_cast<size_t>(family.size()), 0);
    for (auto [i, m] : idx) e[static_cast<size_t>(i)] += m;
    return MultiLaurent::monomial(u.modulus(), std::move(e), f.unit);
}

MultiLaurent psi_map(const QOnePoly& q, PrimeFamily& family) {
    // extend the family first so every term is built at the final arity
    std::vector<MultiLaurent> monos;
    monos.reserve(q.terms().size());
    for (const auto& [e, u] : q.terms()) monos.push_back(psi_map(u, family));
    MultiLaurent r(q.modulus(), family.size());
    size_t k = 0;
    for (const auto& [e, u] : q.terms()) {
        Exps e2(static_cast<size_t>(family.size()), 0);
        for (size_t i = 0; i < e.size(); ++i) e2[i] = e[i];
        r = r + monos[k++].embedded(family.size()).shifted(e2);
    }
    return r;
}

std::vector<BsTerm> basic_shift_decompose(const UniPoly& u, PrimeFamily& family) {
    if (u.is_zero()) throw std::domain_error("basic_shift_decompose: zero polynomial");
    if (!u.is_monic()) throw std::invalid_argument("basic_shift_decompose: input must be monic");
    const uint32_t p = u.modulus();
    Factorization f = factor_monic_primes(u);
    std::vector<int> idx;
    for (const auto& [prime, m] : f.primes) idx.push_back(family.extend(prime));
    const int n = family.size();

    std::vector<BsTerm> out;
    // psi(prod) - prod telescoped over factors: prefix psi-monomials, suffix
    // univariate cofactors
    Exps prefix(static_cast<size_t>(n), 0);
    for (size_t i = 0; i < f.primes.size(); ++i) {
        const auto& [rho, b] = f.primes[i];
        UniPoly suffix = UniPoly::one(p);
        for (size_t j = i + 1; j < f.primes.size(); ++j)
            suffix = suffix * f.primes[j].first.pow(static_cast<uint64_t>(f.primes[j].second));
        // x_rho^b - rho^b = sum_k x_rho^(b-1-k) rho^k (x_rho - rho)
        for (int k = 0; k < b; ++k) {
            BsTerm t;
            t.coeff = 1;
            t.shift = prefix;
            t.shift[static_cast<size_t>(idx[i])] += b - 1 - k;
            t.prime = idx[i];
            t.cofactor = suffix * rho.pow(static_cast<uint64_t>(k));
            out.push_back(std::move(t));
        }
        prefix[static_cast<size_t>(idx[i])] += b;
    }
    return out;
}

DerivedOperators derived_operators(const MultiLaurent& gamma, const PrimeFamily& family,
                                   const std::vector<uint8_t>& beta) {
    if (gamma.nvars() != family.size() || beta.size() != static_cast<size_t>(family.size()))
        throw std::invalid_argument("derived_operators: arity mismatch");
    const uint32_t p = gamma.modulus();
    const int n = gamma.nvars();
    auto comps = homogeneous_split(gamma);

    QOnePoly a(p, n), sum_b(p, n), pi(p, n);
    UniPoly d_beta0 = family_power(family, to_ints(beta));
    UniPoly d_beta1 = d_beta0.derivative();
    for (const auto& [alpha, comp] : comps) {
        MultiLaurent bar = bar_component(comp, alpha);
        UniPoly d_ba1 = family_power(family, add_exps(beta, alpha)).derivative();
        UniPoly d_a1 = family_power(family, to_ints(alpha)).derivative();
        UniPoly d_a0 = family_power(family, to_ints(alpha));
        for (const auto& [e, c] : bar.terms()) {
            if (!d_ba1.is_zero()) a.add_term(e, d_ba1.scaled(c));
            if (!d_a1.is_zero()) sum_b.add_term(e, d_a1.scaled(c));
            if (!d_beta1.is_zero()) pi.add_term(e, (d_beta1 * d_a0).scaled(c));
        }
    }
    QOnePoly b(p, n);
    for (const auto& [e, u] : sum_b.terms()) b.add_term(e, -(d_beta0 * u));
    return {a, b, pi};
}

PrimeFamily zeta_family(const PrimeFamily& family, uint64_t budget) {
    const uint32_t p = family.modulus();
    const int d = family.size();
    uint64_t total = 1;
    for (int i = 0; i < d; ++i) {
        total *= p;
        if (total > budget) throw BudgetExceeded("zeta_family: p^d exceeds the work budget");
    }
    std::set<UniPoly> found;
    std::vector<uint8_t> beta(static_cast<size_t>(d), 0);
    // exponents stay below p here: zeta only ranges over reduced residues
    for (uint64_t code = 1; code < total; ++code) {
        uint64_t t = code;
        for (int i = 0; i < d; ++i) {
            beta[static_cast<size_t>(i)] = static_cast<uint8_t>(t % p);
            t /= p;
        }
        UniPoly der = family_power(family, to_ints(beta)).derivative();
        if (der.is_zero() || der.is_constant()) continue;
        for (const auto& [prime, m] : factor_monic_primes(der).primes) found.insert(prime);
    }
    PrimeFamily out = family;
    for (const auto& prime : found) out.extend(prime);
    return out;
}

QOnePoly expand_part(const GbsPart& g, const PrimeFamily& family, int nvars) {
    const uint32_t p = family.modulus();
    QOnePoly r(p, nvars);
    int64_t q = ipow(p, static_cast<unsigned>(g.t));
    Exps top(static_cast<size_t>(nvars), 0);
    for (size_t i = 0; i < g.shift.size(); ++i) top[i] = g.shift[i];
    Exps low = top;
    top[static_cast<size_t>(g.prime)] += static_cast<int32_t>(q);
    // (x_rho - rho)^(p^t) = x_rho^(p^t) - rho^(p^t) in characteristic p
    r.add_term(std::move(top), UniPoly::constant(p, g.coeff));
    r.add_term(std::move(low), family.at(g.prime).frobenius(static_cast<unsigned>(g.t)).scaled(fp_neg(g.coeff, p)));
    return r;
}

QOnePoly expand_parts(const std::vector<GbsPart>& parts, const PrimeFamily& family, int nvars) {
    QOnePoly r(family.modulus(), nvars);
    for (const auto& g : parts) r = r + expand_part(g, family, nvars);
    return r;
}

namespace {

struct CandPart {
    Exps shift;
    int prime;
    int t;
};
bool operator<(const CandPart& a, const CandPart& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.prime != b.prime) return a.prime < b.prime;
    return a.shift < b.shift;
}

} // namespace

std::vector<GbsPart> strict_expand(const QOnePoly& target, PrimeFamily& family) {
    if (target.is_zero()) return {};
    const uint32_t p = target.modulus();
    const int n = target.nvars();
    if (n != family.size()) throw std::invalid_argument("strict_expand: arity mismatch");

    int maxdeg = 1;
    std::set<Exps> anchors;
    for (const auto& [e, u] : target.terms()) {
        anchors.insert(e);
        maxdeg = std::max(maxdeg, u.degree_or(0));
    }
    int tbase = 0;
    while (ipow(p, static_cast<unsigned>(tbase)) < maxdeg + 1) ++tbase;

    for (int attempt = 0; attempt < 3; ++attempt) {
        const int tmax = tbase + attempt;
        const int64_t degcap = std::max<int64_t>(maxdeg, 1) + ipow(p, static_cast<unsigned>(tmax));

        std::set<CandPart> cands;
        for (const auto& nu : anchors) {
            for (int rho = 0; rho < family.size(); ++rho) {
                int degr = *family.at(rho).degree();
                for (int t = 0; t <= tmax; ++t) {
                    int64_t q = ipow(p, static_cast<unsigned>(t));
                    if (q * degr > degcap) break;
                    cands.insert({nu, rho, t}); // univariate end at nu
                    Exps lo = nu;
                    lo[static_cast<size_t>(rho)] -= static_cast<int32_t>(q);
                    cands.insert({std::move(lo), rho, t}); // monomial end at nu
                }
            }
        }
        std::vector<CandPart> cv(cands.begin(), cands.end());

        // rows: one per (slot, x-degree) touched by the target or a candidate
        std::map<std::pair<Exps, int>, size_t> row_of;
        auto row = [&](const Exps& slot, int k) {
            return row_of.emplace(std::make_pair(slot, k), row_of.size()).first->second;
        };
        struct Entry {
            size_t r, c;
            uint32_t v;
        };
        std::vector<Entry> entries;
        for (size_t j = 0; j < cv.size(); ++j) {
            const auto& g = cv[j];
            int64_t q = ipow(p, static_cast<unsigned>(g.t));
            Exps top = g.shift;
            top[static_cast<size_t>(g.prime)] += static_cast<int32_t>(q);
            entries.push_back({row(top, 0), j, 1});
            UniPoly rq = family.at(g.prime).frobenius(static_cast<unsigned>(g.t));
            for (size_t k = 0; k < rq.coeffs().size(); ++k)
                if (rq.coeff(k)) entries.push_back({row(g.shift, static_cast<int>(k)), j, fp_neg(rq.coeff(k), p)});
        }
        std::map<std::pair<Exps, int>, uint32_t> rhs;
        for (const auto& [e, u] : target.terms())
            for (size_t k = 0; k < u.coeffs().size(); ++k)
                if (u.coeff(k)) {
                    row(e, static_cast<int>(k));
                    rhs[{e, static_cast<int>(k)}] = u.coeff(k);
                }

        GfMatrix m(p, row_of.size(), cv.size());
        for (const auto& en : entries) m.add_at(en.r, en.c, en.v);
        for (const auto& [key, v] : rhs) m.set_rhs(row_of.at(key), v);
        auto red = m.reduce();
        if (!red.consistent) {
            // widen the anchor set by the candidate far ends and retry
            for (const auto& g : cv) {
                Exps top = g.shift;
                top[static_cast<size_t>(g.prime)] += static_cast<int32_t>(ipow(p, static_cast<unsigned>(g.t)));
                anchors.insert(top);
                anchors.insert(g.shift);
            }
            continue;
        }
        auto sol = m.particular_solution(red);
        std::vector<GbsPart> parts;
        for (size_t j = 0; j < cv.size(); ++j)
            if (sol[j]) parts.push_back({sol[j], cv[j].shift, cv[j].t, cv[j].prime});
        if (expand_parts(parts, family, n) == target) return parts;
        throw std::logic_error("strict_expand: solver produced an invalid expansion");
    }
    throw std::logic_error("strict_expand: no gbs expansion found within search bounds");
}

OneStepResult one_step(const MultiLaurent& gamma, PrimeFamily& family,
                       const std::vector<uint8_t>& beta) {
    const uint32_t p = gamma.modulus();
    const int d0 = gamma.nvars();
    if (d0 != family.size() || beta.size() != static_cast<size_t>(d0))
        throw std::invalid_argument("one_step: arity mismatch");
    if (gamma.is_zero()) throw std::invalid_argument("one_step: zero input");

    auto comps = homogeneous_split(gamma);
    if (comps.size() < 2)
        throw std::domain_error("one_step: single homogeneous component; extract the p-th root first");
    const std::vector<uint8_t> zero(static_cast<size_t>(d0), 0);
    if (!comps.count(zero))
        throw std::domain_error("one_step: constant component is empty; shift by a monomial first");
    const std::vector<uint8_t> beta1 = u_complement(beta, p);
    if (all_zero(beta1) || !comps.count(beta1))
        throw std::invalid_argument("one_step: beta is not the complement of a nonzero component");

    UniPoly d_beta0 = family_power(family, to_ints(beta));
    UniPoly d_beta1 = d_beta0.derivative();
    if (d_beta1.is_zero())
        throw std::logic_error("one_step: derivative multiplier vanished (family not prime?)");

    // phase 1: extend the family by every prime the psi images will need
    struct CompData {
        std::vector<uint8_t> alpha;
        MultiLaurent bar;
        UniPoly d_ba1, d_a1, d_a0;
    };
    std::vector<CompData> cd;
    for (const auto& [alpha, comp] : comps) {
        CompData c{alpha, bar_component(comp, alpha), UniPoly::zero(p), UniPoly::zero(p), UniPoly::zero(p)};
        c.d_ba1 = family_power(family, add_exps(beta, alpha)).derivative();
        c.d_a1 = family_power(family, to_ints(alpha)).derivative();
        c.d_a0 = family_power(family, to_ints(alpha));
        cd.push_back(std::move(c));
    }
    MultiLaurent mult = psi_map(d_beta1, family);
    std::vector<MultiLaurent> psi_ba1(cd.size(), MultiLaurent(p, 0)), psi_a1(cd.size(), MultiLaurent(p, 0));
    for (size_t i = 0; i < cd.size(); ++i) {
        if (!cd[i].d_ba1.is_zero()) psi_ba1[i] = psi_map(cd[i].d_ba1, family);
        if (!cd[i].d_a1.is_zero()) psi_a1[i] = psi_map(cd[i].d_a1, family);
    }
    const int n1 = family.size();
    mult = mult.embedded(n1);

    // phase 2: build everything at the extended arity
    MultiLaurent a_tilde(p, n1), b_sum(p, n1);
    for (size_t i = 0; i < cd.size(); ++i) {
        MultiLaurent bar = cd[i].bar.embedded(n1);
        if (!cd[i].d_ba1.is_zero()) a_tilde = a_tilde + psi_ba1[i].embedded(n1) * bar;
        if (!all_zero(cd[i].alpha) && !cd[i].d_a1.is_zero())
            b_sum = b_sum + psi_a1[i].embedded(n1) * bar;
    }
    Exps beta_exp(static_cast<size_t>(n1), 0);
    for (size_t i = 0; i < beta.size(); ++i) beta_exp[i] = beta[i];
    MultiLaurent b_tilde = b_sum.shifted(beta_exp).negated();

    // correction generators (coef, monomial, W) for coef*mono*(psi(W) - W),
    // merged so that duplicate contributions cancel mod p
    std::map<std::pair<Exps, UniPoly>, uint32_t> gens;
    size_t gen_instances = 0;
    auto add_gen = [&](uint32_t coef, const Exps& mono, const UniPoly& w) {
        if (w.is_constant()) return; // psi(W) - W vanishes for constants
        ++gen_instances;
        auto key = std::make_pair(mono, w);
        auto [it, fresh] = gens.try_emplace(key, coef);
        if (!fresh) {
            it->second = fp_add(it->second, coef, p);
            if (!it->second) gens.erase(it);
        }
    };
    for (size_t i = 0; i < cd.size(); ++i) {
        MultiLaurent bar = cd[i].bar.embedded(n1);
        UniPoly w1 = d_beta1 * cd[i].d_a0;
        UniPoly w2 = cd[i].d_ba1;
        UniPoly w3 = all_zero(cd[i].alpha) ? UniPoly::zero(p) : d_beta0 * cd[i].d_a1;
        for (const auto& [e, c] : bar.terms()) {
            add_gen(c, e, w1);
            if (!w2.is_zero()) add_gen(fp_neg(c, p), e, w2);
            if (!w3.is_zero()) add_gen(c, e, w3);
        }
    }

    std::vector<GbsPart> corrections;
    QOnePoly residual(p, n1);
    for (const auto& [key, coef] : gens) {
        const auto& [mono, w] = key;
        Factorization f = factor_monic_primes(w);
        bool fast = f.primes.size() == 1;
        int t = 0;
        if (fast) {
            int m = f.primes[0].second;
            while (m % static_cast<int>(p) == 0) {
                m /= static_cast<int>(p);
                ++t;
            }
            fast = (m == 1);
        }
        if (fast) {
            int rho = family.extend(f.primes[0].first);
            if (rho >= n1) throw std::logic_error("one_step: correction prime outside the extended family");
            corrections.push_back({fp_mul(coef, f.unit, p), mono, t, rho});
        } else {
            MultiLaurent psi_w = psi_map(w, family);
            if (family.size() != n1)
                throw std::logic_error("one_step: psi of a correction introduced an unexpected prime");
            for (const auto& [pe, pc] : psi_w.terms()) {
                Exps e2(mono);
                for (size_t i = 0; i < pe.size(); ++i) e2[i] += pe[i];
                residual.add_term(std::move(e2), UniPoly::constant(p, fp_mul(coef, pc, p)));
            }
            residual.add_term(mono, w.scaled(fp_neg(coef, p)));
        }
    }
    if (!residual.is_zero()) {
        auto extra = strict_expand(residual, family);
        corrections.insert(corrections.end(), extra.begin(), extra.end());
    }

    OneStepResult out{a_tilde, b_tilde, mult, std::move(corrections), 1};
    size_t weight = 0;
    for (const auto& g : out.corrections) weight += g.coeff;
    if (gen_instances)
        out.measured_c = static_cast<int>((weight + gen_instances - 1) / gen_instances);
    out.measured_c = std::max(out.measured_c, 1);

    // exact balance check: multiplier * gamma == a~ + b~ + corrections
    QOnePoly lhs(QOnePoly(mult * gamma.embedded(n1)));
    QOnePoly rhs = QOnePoly(a_tilde) + QOnePoly(b_tilde) + expand_parts(out.corrections, family, n1);
    if (!(lhs == rhs)) throw std::logic_error("one_step: balance identity failed");
    return out;
}

namespace {

struct RecResult {
    std::vector<GbsPart> parts;
    size_t bound = 0;
};

struct DecomposeCtx {
    PrimeFamily& registry;
    Decomposition& out;
    int depth_cap;
};

RecResult decompose_rec(DecomposeCtx& ctx, MultiLaurent gamma, int depth) {
    const uint32_t p = gamma.modulus();
    if (gamma.is_zero()) return {};
    if (gamma.nvars() < ctx.registry.size()) gamma = gamma.embedded(ctx.registry.size());
    if (depth > ctx.depth_cap)
        throw std::logic_error("decompose: recursion depth exceeded the input length");
    const size_t r = gamma.length();
    if (r <= 2)
        throw std::logic_error("decompose: nonzero special polynomial of length <= 2 (input was not special?)");

    // extract gamma = x^s * lambda^(p^t) with t maximal over all slot shifts
    const Exps& s = gamma.terms().begin()->first;
    int t = 0;
    {
        bool more = true;
        int64_t q = static_cast<int64_t>(p);
        while (more) {
            for (const auto& [e, c] : gamma.terms()) {
                for (size_t i = 0; i < e.size() && more; ++i)
                    if ((static_cast<int64_t>(e[i]) - s[i]) % q != 0) more = false;
                if (!more) break;
            }
            if (more) {
                ++t;
                q *= p;
            }
        }
    }
    Exps s_saved = s;
    MultiLaurent lambda(p, gamma.nvars());
    {
        int64_t q = ipow(p, static_cast<unsigned>(t));
        for (const auto& [e, c] : gamma.terms()) {
            Exps e2(e.size());
            for (size_t i = 0; i < e.size(); ++i)
                e2[i] = static_cast<int32_t>((static_cast<int64_t>(e[i]) - s_saved[i]) / q);
            lambda.add_term(std::move(e2), c); // c^(1/p^t) = c in F_p
        }
    }
    ctx.out.pth_root_log.emplace_back(s_saved, t);

    auto comps = homogeneous_split(lambda);
    if (comps.size() < 2)
        throw std::logic_error("decompose: single homogeneous component after maximal root extraction");

    // largest component by term count, ties to the lexicographically smallest
    // residue; shift it onto the constant component
    const std::vector<uint8_t>* beta0 = nullptr;
    size_t best = 0;
    for (const auto& [alpha, comp] : comps)
        if (comp.length() > best) {
            best = comp.length();
            beta0 = &alpha;
        }
    Exps m = comps.at(*beta0).terms().begin()->first; // lex-min slot of the big component
    Exps neg_m(m.size());
    for (size_t i = 0; i < m.size(); ++i) neg_m[i] = -m[i];
    MultiLaurent shifted = lambda.shifted(neg_m);

    auto comps2 = homogeneous_split(shifted);
    const std::vector<uint8_t>* beta1 = nullptr;
    best = 0;
    for (const auto& [alpha, comp] : comps2) {
        if (all_zero(alpha)) continue;
        if (comp.length() > best) {
            best = comp.length();
            beta1 = &alpha;
        }
    }
    if (!beta1) throw std::logic_error("decompose: no nonzero component after shifting");
    std::vector<uint8_t> beta = u_complement(*beta1, p);

    const int n_before = ctx.registry.size();
    OneStepResult os = one_step(shifted, ctx.registry, beta);
    (void)n_before;

    RecResult ra = decompose_rec(ctx, os.a_tilde, depth + 1);
    RecResult rb = decompose_rec(ctx, os.b_tilde, depth + 1);

    const int n_now = ctx.registry.size();
    auto embed_exps = [&](const Exps& e) {
        Exps e2(static_cast<size_t>(n_now), 0);
        for (size_t i = 0; i < e.size(); ++i) e2[i] = e[i];
        return e2;
    };

    // divide by the psi multiplier (a unit monomial), undo the shift and the
    // dilation: lambda' parts g become x^(s + p^t m) g^(p^t)
    const auto& [mult_exps_raw, mult_coeff] = *os.multiplier.terms().begin();
    Exps mult_exps = embed_exps(mult_exps_raw);
    uint32_t mult_inv = fp_inv(mult_coeff, p);
    ctx.out.monomial_divisors.push_back(os.multiplier);

    std::vector<GbsPart> parts;
    parts.reserve(ra.parts.size() + rb.parts.size() + os.corrections.size());
    for (const auto* src : {&ra.parts, &rb.parts, &os.corrections})
        for (const auto& g : *src) parts.push_back(g);

    int64_t q = ipow(p, static_cast<unsigned>(t));
    for (auto& g : parts) {
        Exps shift = embed_exps(g.shift);
        for (size_t i = 0; i < shift.size(); ++i) {
            int64_t v = shift[i] - mult_exps[i] + (i < m.size() ? m[i] : 0);
            v = v * q + (i < s_saved.size() ? s_saved[i] : 0);
            shift[i] = static_cast<int32_t>(v);
        }
        g.shift = std::move(shift);
        g.t += t;
        g.coeff = fp_mul(g.coeff, mult_inv, p);
    }
    size_t bound = ra.bound + rb.bound + 3 * static_cast<size_t>(os.measured_c) * r;
    return {std::move(parts), bound};
}

} // namespace

Decomposition decompose(const MultiLaurent& gamma, const PrimeFamily& family) {
    if (gamma.nvars() != family.size())
        throw std::invalid_argument("decompose: arity does not match family size");
    if (!is_special(gamma, family)) throw std::invalid_argument("decompose: input is not special");

    PrimeFamily registry = family;
    Decomposition out{{}, registry, {}, {}, false, 0};
    DecomposeCtx ctx{registry, out, std::max<int>(4, static_cast<int>(gamma.length())) + 2};
    RecResult r = decompose_rec(ctx, gamma, 0);
    out.parts = std::move(r.parts);
    out.recursion_bound = r.bound;
    out.closure_family = registry;

    QOnePoly resum = expand_parts(out.parts, registry, registry.size());
    out.certificate = resum == QOnePoly(gamma.embedded(registry.size()));
    if (!out.certificate) throw std::logic_error("decompose: resummation certificate failed");
    return out;
}

GeneralDecomposition decompose_general(const MultiLaurent& gamma,
                                       const std::vector<UniPoly>& members, uint32_t p) {
    bool all_prime = true;
    for (const auto& m : members)
        if (!is_irreducible(m)) all_prime = false;
    if (all_prime) {
        PrimeFamily fam(p, members);
        MultiLaurent g = gamma.nvars() < fam.size() ? gamma.embedded(fam.size()) : gamma;
        return {decompose(g, fam), {g, fam}};
    }
    SpecialCandidate reduced = check_map(gamma, members, p);
    return {decompose(reduced.gamma, reduced.family), reduced};
}

SpecialCandidate check_map(const MultiLaurent& gamma, const std::vector<UniPoly>& family, uint32_t p) {
    std::set<UniPoly> primes;
    std::vector<Factorization> facs;
    for (const auto& member : family) {
        if (member.is_zero()) throw std::invalid_argument("check_map: zero family member");
        if (!member.is_monic()) throw std::invalid_argument("check_map: family members must be monic");
        facs.push_back(factor_monic_primes(member));
        for (const auto& [prime, m] : facs.back().primes) primes.insert(prime);
    }
    PrimeFamily target(p, std::vector<UniPoly>(primes.begin(), primes.end()));
    if (gamma.nvars() != static_cast<int>(family.size()))
        throw std::invalid_argument("check_map: arity does not match family size");

    // b[i][rho]: multiplicity of target prime rho in member i
    std::vector<std::vector<int>> b(family.size(), std::vector<int>(static_cast<size_t>(target.size()), 0));
    for (size_t i = 0; i < family.size(); ++i)
        for (const auto& [prime, m] : facs[i].primes) b[i][static_cast<size_t>(*target.index_of(prime))] = m;

    MultiLaurent out(p, target.size());
    for (const auto& [e, c] : gamma.terms()) {
        Exps e2(static_cast<size_t>(target.size()), 0);
        for (size_t i = 0; i < e.size(); ++i)
            for (size_t rho = 0; rho < e2.size(); ++rho)
                e2[rho] += e[i] * b[i][rho];
        out.add_term(std::move(e2), c);
    }
    return {out, target};
}

std::vector<MultiLaurent> minimal_split(const MultiLaurent& gamma, const PrimeFamily& family,
                                        size_t max_len) {
    if (!is_special(gamma, family)) throw std::invalid_argument("minimal_split: input is not special");
    if (gamma.length() > max_len) throw BudgetExceeded("minimal_split: length cap exceeded");
    const uint32_t p = gamma.modulus();

    std::vector<MultiLaurent> out;
    MultiLaurent rest = gamma;
    while (!rest.is_zero()) {
        std::vector<std::pair<Exps, uint32_t>> terms(rest.terms().begin(), rest.terms().end());
        const size_t n = terms.size();
        MultiLaurent found(p, rest.nvars());
        bool have = false;
        for (size_t k = 1; k <= n && !have; ++k) {
            // subsets of size k in lexicographic index order
            std::vector<size_t> idx(k);
            for (size_t i = 0; i < k; ++i) idx[i] = i;
            while (true) {
                MultiLaurent cand(p, rest.nvars());
                for (size_t i : idx) cand.add_term(terms[i].first, terms[i].second);
                if (is_special(cand, family)) {
                    found = cand;
                    have = true;
                    break;
                }
                size_t j = k;
                while (j > 0 && idx[j - 1] == n - k + (j - 1)) --j;
                if (j == 0) break;
                --j;
                ++idx[j];
                for (size_t i = j + 1; i < k; ++i) idx[i] = idx[i - 1] + 1;
            }
        }
        if (!have) throw std::logic_error("minimal_split: no special subset found (input was not special?)");
        out.push_back(found);
        rest = rest - found;
    }
    return out;
}

} // namespace fpmix
