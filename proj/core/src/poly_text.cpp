#include "fpmix/poly_text.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

#include "fpmix/prime_family.hpp"

namespace fpmix {
namespace {

// Parses into a multivariate Laurent polynomial; variable index -1 encodes
// the bare univariate x so both grammars share one parser.
struct Parser {
    const std::string& s;
    size_t i = 0;
    uint32_t p;
    int nvars; // 0 for univariate mode

    Parser(const std::string& text, uint32_t modulus, int vars) : s(text), p(modulus), nvars(vars) {}

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        skip();
        if (i < s.size() && s[i] == c) {
            ++i;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("polynomial parse error at position " + std::to_string(i) + ": " + what);
    }

    int arity() const { return nvars == 0 ? 1 : nvars; }

    MultiLaurent parse() {
        MultiLaurent r = expr();
        skip();
        if (i != s.size()) fail("trailing input");
        return r;
    }

    MultiLaurent expr() {
        MultiLaurent r = term();
        while (true) {
            skip();
            if (eat('+'))
                r = r + term();
            else if (eat('-'))
                r = r - term();
            else
                return r;
        }
    }

    MultiLaurent term() {
        MultiLaurent r = factor();
        while (true) {
            skip();
            if (eat('*'))
                r = r * factor();
            else if (i < s.size() && (s[i] == 'x' || s[i] == '(')) // implicit product: 2x, x1x2
                r = r * factor();
            else
                return r;
        }
    }

    MultiLaurent factor() {
        MultiLaurent a = atom();
        skip();
        if (eat('^')) {
            long e = integer();
            if (e < 0) { // Laurent power of a monomial only
                if (a.length() != 1) fail("negative power of a non-monomial");
                const auto& [exps, c] = *a.terms().begin();
                if (c != 1) fail("negative power of a non-monic monomial");
                Exps ne(exps.size());
                for (size_t k = 0; k < exps.size(); ++k) ne[k] = static_cast<int32_t>(exps[k] * e);
                return MultiLaurent::monomial(p, std::move(ne), 1);
            }
            MultiLaurent r = MultiLaurent::monomial(p, Exps(static_cast<size_t>(arity()), 0), 1);
            for (long k = 0; k < e; ++k) r = r * a;
            return r;
        }
        return a;
    }

    MultiLaurent atom() {
        skip();
        if (i >= s.size()) fail("unexpected end of input");
        if (s[i] == '(') {
            ++i;
            MultiLaurent r = expr();
            if (!eat(')')) fail("expected ')'");
            return r;
        }
        if (s[i] == 'x') {
            ++i;
            int var = 0;
            if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                if (nvars == 0) fail("indexed variable in univariate context");
                size_t j = i;
                while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
                var = std::stoi(s.substr(i, j - i)) - 1;
                if (var < 0 || var >= nvars) fail("variable index out of range");
                i = j;
            } else if (nvars > 1) {
                fail("bare x in multivariate context; use x1..xN");
            }
            Exps e(static_cast<size_t>(arity()), 0);
            e[static_cast<size_t>(var)] = 1;
            return MultiLaurent::monomial(p, std::move(e), 1);
        }
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            long v = integer();
            uint32_t c = static_cast<uint32_t>(((v % p) + p) % p);
            return MultiLaurent::monomial(p, Exps(static_cast<size_t>(arity()), 0), c);
        }
        fail("expected integer, variable or '('");
    }

    long integer() {
        skip();
        bool neg = eat('-');
        skip();
        if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) fail("expected integer");
        size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        long v = std::stol(s.substr(i, j - i));
        i = j;
        return neg ? -v : v;
    }
};

std::string var_name(size_t idx, const std::vector<std::string>& names, size_t nvars) {
    if (idx < names.size()) return names[idx];
    if (nvars == 1) return "x";
    return "x" + std::to_string(idx + 1);
}

} // namespace

UniPoly parse_unipoly(const std::string& text, uint32_t p) {
    Parser ps(text, p, 0);
    MultiLaurent m = ps.parse();
    int maxdeg = 0;
    for (const auto& [e, c] : m.terms()) {
        if (e[0] < 0) throw std::invalid_argument("parse_unipoly: negative exponent");
        maxdeg = std::max(maxdeg, e[0]);
    }
    std::vector<uint32_t> coeffs(static_cast<size_t>(maxdeg) + 1, 0);
    for (const auto& [e, c] : m.terms()) coeffs[static_cast<size_t>(e[0])] = c;
    return UniPoly(p, std::move(coeffs));
}

MultiLaurent parse_multilaurent(const std::string& text, uint32_t p, int nvars) {
    Parser ps(text, p, nvars);
    return ps.parse();
}

std::string to_string(const UniPoly& u, const std::string& var) {
    if (u.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (size_t k = 0; k < u.coeffs().size(); ++k) {
        uint32_t c = u.coeff(k);
        if (!c) continue;
        if (!first) os << "+";
        first = false;
        if (k == 0)
            os << c;
        else {
            if (c != 1) os << c << "*";
            os << var;
            if (k != 1) os << "^" << k;
        }
    }
    return os.str();
}

std::string to_string(const MultiLaurent& m, const std::vector<std::string>& names) {
    if (m.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : m.terms()) {
        if (!first) os << "+";
        first = false;
        bool any = false;
        std::ostringstream mono;
        for (size_t i = 0; i < e.size(); ++i) {
            if (!e[i]) continue;
            if (any) mono << "*";
            any = true;
            mono << var_name(i, names, e.size());
            if (e[i] != 1) mono << "^" << e[i];
        }
        if (!any)
            os << c;
        else {
            if (c != 1) os << c << "*";
            os << mono.str();
        }
    }
    return os.str();
}

std::string UniPoly::to_string(const std::string& var) const { return fpmix::to_string(*this, var); }

std::string LaurentUniPoly::to_string(const std::string& var) const {
    if (is_zero()) return "0";
    std::string b = fpmix::to_string(base, var);
    if (offset == 0) return b;
    return var + "^" + std::to_string(offset) + "*(" + b + ")";
}

std::string MultiLaurent::to_string(const std::vector<std::string>& names) const {
    return fpmix::to_string(*this, names);
}

std::vector<std::string> PrimeFamily::labels() const {
    std::vector<std::string> r;
    r.reserve(members_.size());
    for (const auto& m : members_) r.push_back(fpmix::to_string(m));
    return r;
}

} // namespace fpmix
