#include <doctest.h>

#include <set>

#include "fpmix/factor.hpp"
#include "fpmix/poly_text.hpp"
#include "fpmix/rng.hpp"
#include "fpmix/unipoly.hpp"

using namespace fpmix;

namespace {

UniPoly random_poly(SplitRng& rng, uint32_t p, int maxdeg, bool nonzero = false) {
    int deg = static_cast<int>(rng.next_below(static_cast<uint64_t>(maxdeg) + 1));
    std::vector<uint32_t> c(static_cast<size_t>(deg) + 1);
    for (auto& ci : c) ci = static_cast<uint32_t>(rng.next_below(p));
    UniPoly u(p, std::move(c));
    if (nonzero && u.is_zero()) return UniPoly::one(p);
    return u;
}

// independent irreducibility oracle: trial division by every monic
// polynomial of degree <= deg/2
bool irreducible_by_trial_division(const UniPoly& u) {
    const uint32_t p = u.modulus();
    if (u.is_constant()) return false;
    for (int d = 1; d <= *u.degree() / 2; ++d) {
        uint64_t total = 1;
        for (int i = 0; i < d; ++i) total *= p;
        for (uint64_t code = 0; code < total; ++code) {
            std::vector<uint32_t> c(static_cast<size_t>(d) + 1, 0);
            uint64_t t = code;
            for (int i = 0; i < d; ++i) {
                c[static_cast<size_t>(i)] = static_cast<uint32_t>(t % p);
                t /= p;
            }
            c[static_cast<size_t>(d)] = 1;
            if (UniPoly(p, std::move(c)).divides(u)) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("scalar arithmetic and primality guard") {
    CHECK(FpScalar(5, 3).value == 2);
    CHECK(FpScalar(-1, 7).value == 6);
    CHECK((FpScalar(4, 7) * FpScalar(2, 7)).value == 1);
    CHECK(FpScalar(3, 7).inv().value == 5);
    CHECK_THROWS_AS(FpScalar(1, 6), std::invalid_argument);
}

TEST_CASE("multiplication basics over F_2") {
    UniPoly one_plus_x = parse_unipoly("1+x", 2);
    CHECK(one_plus_x * one_plus_x == parse_unipoly("1+x^2", 2));
    UniPoly p = parse_unipoly("1+x+x^3", 2);
    CHECK(p * UniPoly::one(2) == p);
    // (1+x)^4 via repeated squaring oracle
    UniPoly sq = one_plus_x * one_plus_x;
    CHECK(sq * sq == parse_unipoly("1+x^4", 2));
    CHECK(one_plus_x.pow(4) == parse_unipoly("1+x^4", 2));
}

TEST_CASE("modulus mismatch is rejected") {
    CHECK_THROWS_AS(UniPoly::one(2) * UniPoly::one(3), std::invalid_argument);
}

TEST_CASE("frobenius identity (A+B)^(p^t) = A^(p^t) + B^(p^t)") {
    SplitRng rng(11);
    for (uint32_t p : {2u, 3u, 5u}) {
        for (unsigned t = 0; t <= 3; ++t) {
            for (int rep = 0; rep < 8; ++rep) {
                UniPoly a = random_poly(rng, p, 6), b = random_poly(rng, p, 6);
                uint64_t e = 1;
                for (unsigned i = 0; i < t; ++i) e *= p;
                CHECK((a + b).pow(e) == a.pow(e) + b.pow(e));
                CHECK(a.pow(e) == a.frobenius(t));
            }
        }
    }
}

TEST_CASE("derivative term rules") {
    CHECK(parse_unipoly("x^3+x^5", 2).derivative() == parse_unipoly("x^2+x^4", 2));
    CHECK(parse_unipoly("x^2", 2).derivative().is_zero());
    SplitRng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        uint32_t p = rep % 2 ? 2 : 3;
        UniPoly a = random_poly(rng, p, 5), b = random_poly(rng, p, 4);
        // (A B^p)' = A' B^p
        CHECK((a * b.pow(p)).derivative() == a.derivative() * b.pow(p));
    }
}

TEST_CASE("p-th root round trip") {
    CHECK(*parse_unipoly("1+x^2", 2).pth_root() == parse_unipoly("1+x", 2));
    CHECK(!parse_unipoly("1+x", 2).pth_root().has_value());
    SplitRng rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        uint32_t p = rep % 2 ? 2 : 3;
        UniPoly u = random_poly(rng, p, 6);
        CHECK(*u.pow(p).pth_root() == u);
    }
}

TEST_CASE("derivative zero iff p-th power") {
    SplitRng rng(14);
    for (int rep = 0; rep < 30; ++rep) {
        uint32_t p = rep % 2 ? 2 : 3;
        UniPoly u = random_poly(rng, p, 8, true);
        CHECK((u.derivative().is_zero()) == u.pth_root().has_value());
    }
}

TEST_CASE("factorization worked example over F_2") {
    // x^3 + x^5 = x^3 (1+x)^2
    auto f = factor_monic_primes(parse_unipoly("x^3+x^5", 2));
    CHECK(f.unit == 1);
    REQUIRE(f.primes.size() == 2);
    CHECK(f.primes[0].first == parse_unipoly("x", 2));
    CHECK(f.primes[0].second == 3);
    CHECK(f.primes[1].first == parse_unipoly("1+x", 2));
    CHECK(f.primes[1].second == 2);
}

TEST_CASE("prime input factors as itself") {
    UniPoly rho = parse_unipoly("1+x+x^2", 2);
    auto f = factor_monic_primes(rho);
    REQUIRE(f.primes.size() == 1);
    CHECK(f.primes[0].first == rho);
    CHECK(f.primes[0].second == 1);
}

TEST_CASE("factorization reconstructs and factors are irreducible") {
    SplitRng rng(15);
    for (int rep = 0; rep < 40; ++rep) {
        uint32_t p = rep % 3 == 0 ? 5 : (rep % 3 == 1 ? 3 : 2);
        UniPoly u = random_poly(rng, p, 12, true);
        auto f = factor_monic_primes(u);
        CHECK(expand(f, p) == u);
        for (const auto& [prime, m] : f.primes) {
            CHECK(prime.is_monic());
            CHECK(m >= 1);
            CHECK(irreducible_by_trial_division(prime));
            CHECK(is_irreducible(prime));
        }
    }
}

TEST_CASE("factor of zero is an error") {
    CHECK_THROWS_AS(factor_monic_primes(UniPoly::zero(2)), std::domain_error);
}

TEST_CASE("unique factorization: multiply then factor is the identity") {
    SplitRng rng(16);
    for (int rep = 0; rep < 20; ++rep) {
        uint32_t p = rep % 2 ? 2 : 3;
        // build a product of random small irreducibles
        std::vector<std::pair<UniPoly, int>> chosen;
        UniPoly prod = UniPoly::one(p);
        std::set<UniPoly> used;
        for (int i = 0; i < 3; ++i) {
            UniPoly c = random_poly(rng, p, 3, true).monic_part();
            if (c.is_constant() || !is_irreducible(c) || used.count(c)) continue;
            used.insert(c);
            int m = 1 + static_cast<int>(rng.next_below(2));
            chosen.emplace_back(c, m);
            prod = prod * c.pow(static_cast<uint64_t>(m));
        }
        auto f = factor_monic_primes(prod);
        std::map<UniPoly, int> want(chosen.begin(), chosen.end());
        std::map<UniPoly, int> got(f.primes.begin(), f.primes.end());
        CHECK(want == got);
    }
}

TEST_CASE("pairwise coprime product is a p-th power iff each factor is") {
    SplitRng rng(17);
    for (int rep = 0; rep < 20; ++rep) {
        uint32_t p = rep % 2 ? 2 : 3;
        UniPoly a = parse_unipoly("x", p), b = parse_unipoly("1+x", p);
        int ea = 1 + static_cast<int>(rng.next_below(2 * p));
        int eb = 1 + static_cast<int>(rng.next_below(2 * p));
        UniPoly prod = a.pow(static_cast<uint64_t>(ea)) * b.pow(static_cast<uint64_t>(eb));
        bool each = (ea % p == 0) && (eb % p == 0);
        CHECK(prod.pth_root().has_value() == each);
    }
    // coprime non-p-th-powers have a nonzero product derivative
    for (uint32_t p : {2u, 3u}) {
        UniPoly v1 = parse_unipoly("x", p).pow(p + 1);
        UniPoly v2 = parse_unipoly("1+x", p);
        CHECK(!(v1 * v2).derivative().is_zero());
    }
}

TEST_CASE("laurent normalization") {
    LaurentUniPoly r(parse_unipoly("1+x", 2), -2);
    auto nf = normalize_laurent(r);
    CHECK(nf.shift == -2);
    CHECK(nf.tilde == parse_unipoly("1+x", 2));

    LaurentUniPoly cube(parse_unipoly("x^3", 2), 0);
    auto nf2 = normalize_laurent(cube);
    CHECK(nf2.shift == 3);
    CHECK(nf2.tilde == UniPoly::one(2));

    CHECK_THROWS_AS(normalize_laurent(LaurentUniPoly::zero(2)), std::domain_error);

    SplitRng rng(18);
    for (int rep = 0; rep < 20; ++rep) {
        UniPoly base = random_poly(rng, 3, 6, true);
        int off = static_cast<int>(rng.next_below(9)) - 4;
        LaurentUniPoly l(base, off);
        auto nf3 = normalize_laurent(l);
        CHECK(LaurentUniPoly(nf3.tilde, nf3.shift) == l);
        CHECK(nf3.tilde.constant_term() != 0);
    }
}

TEST_CASE("polynomial text round trips") {
    for (const char* s : {"0", "1", "x", "1+x^2+x^5", "2*x^3+x", "1+x+x^2"}) {
        UniPoly u = parse_unipoly(s, 3);
        CHECK(parse_unipoly(u.to_string(), 3) == u);
    }
    MultiLaurent m = parse_multilaurent("x1^2*x2+x1", 2, 2);
    CHECK(m.length() == 2);
    CHECK(parse_multilaurent(m.to_string(), 2, 2) == m);
    CHECK(parse_multilaurent("(1+x1)^2", 2, 2) ==
          parse_multilaurent("1+x1^2", 2, 2));
}
