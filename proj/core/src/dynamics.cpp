#include "fpmix/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fpmix/gf_linsolve.hpp"

namespace fpmix {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::complex<double> root_of_unity(uint32_t p, uint32_t k) {
    double a = kTwoPi * static_cast<double>(k % p) / static_cast<double>(p);
    return {std::cos(a), std::sin(a)};
}

// window positions read by character Q shifted to lattice offset ell:
// coefficient k of Q sits at (k + ell_1, ell_2, ..., ell_dim)
LatticePoint char_site(const LaurentUniPoly& q, size_t k, const LatticePoint& ell) {
    LatticePoint pt = ell;
    pt[0] += q.offset + static_cast<int64_t>(k);
    return pt;
}

} // namespace

bool TrigPoly::is_real_valued(double tol) const {
    // closed under conjugation: conj(c) chi_{-Q} pairs with c chi_Q
    for (const auto& [c, q] : terms) {
        LaurentUniPoly negq(-q.base, q.offset);
        bool found = false;
        for (const auto& [c2, q2] : terms)
            if (q2 == negq && std::abs(c2 - std::conj(c)) < tol) found = true;
        if (!found) return false;
    }
    return true;
}

double SummationWeights::sum() const {
    double s = 0;
    for (const auto& [pt, v] : w) s += v;
    return s;
}
double SummationWeights::sum_sq() const {
    double s = 0;
    for (const auto& [pt, v] : w) s += v * v;
    return s;
}

GroupSpec GroupSpec::from_family(const PrimeFamily& family) {
    const uint32_t p = family.modulus();
    GroupSpec spec{p, family.size(), {}};
    auto xi = family.index_of(UniPoly::x(p));
    if (!xi) throw std::invalid_argument("GroupSpec::from_family: family must contain x");
    for (int i = 0; i < family.size(); ++i) {
        if (i == *xi) continue;
        MultiLaurent g(p, family.size());
        Exps e(static_cast<size_t>(family.size()), 0);
        e[static_cast<size_t>(i)] = 1;
        g.add_term(e, 1);
        const UniPoly& r = family.at(i);
        for (size_t k = 0; k < r.coeffs().size(); ++k) {
            if (!r.coeff(k)) continue;
            Exps e2(static_cast<size_t>(family.size()), 0);
            e2[static_cast<size_t>(*xi)] = static_cast<int32_t>(k);
            g.add_term(std::move(e2), fp_neg(r.coeff(k), p));
        }
        spec.generators.push_back(std::move(g));
    }
    return spec;
}

LaurentUniPoly act_on_character(const LatticePoint& ell, const LaurentUniPoly& q,
                                const PrimeFamily& family) {
    if (ell.size() != static_cast<size_t>(family.size()))
        throw std::invalid_argument("act_on_character: dimension mismatch");
    const uint32_t p = family.modulus();
    UniPoly prod = q.base;
    int off = q.offset;
    for (size_t i = 0; i < ell.size(); ++i) {
        if (ell[i] == 0) continue;
        if (family.at(static_cast<int>(i)) == UniPoly::x(p)) {
            off += static_cast<int>(ell[i]);
            continue;
        }
        if (ell[i] < 0)
            throw std::domain_error("act_on_character: negative exponent on a non-monomial direction");
        prod = prod * family.at(static_cast<int>(i)).pow(static_cast<uint64_t>(ell[i]));
    }
    return LaurentUniPoly(prod, off);
}

namespace {

// canonical two-dimensional sweep form: one generator with a single cell on
// the second axis level 1 and the rest on level 0
struct SweepForm {
    int64_t a0;                  // column offset of the determined cell
    uint32_t lead_inv;           // inverse of its coefficient
    std::vector<std::pair<int64_t, uint32_t>> row0; // (column, coefficient)
};

bool sweep_form(const GroupSpec& spec, SweepForm& out) {
    if (spec.dim != 2 || spec.generators.size() != 1) return false;
    const MultiLaurent& g = spec.generators[0];
    Exps mins = g.min_exponents();
    MultiLaurent norm = g.shifted({-mins[0], -mins[1]});
    int count1 = 0;
    out.row0.clear();
    for (const auto& [e, c] : norm.terms()) {
        if (e[1] == 1) {
            ++count1;
            out.a0 = e[0];
            out.lead_inv = fp_inv(c, spec.p);
        } else if (e[1] == 0) {
            out.row0.emplace_back(e[0], c);
        } else {
            return false;
        }
    }
    return count1 == 1 && !out.row0.empty();
}

WindowSample sweep_sample(const GroupSpec& spec, const SweepForm& form, const Window& window,
                          SplitRng& rng) {
    const uint32_t p = spec.p;
    WindowSample s;
    s.window = window;
    s.zeta.assign(window.size(), 0);
    const int64_t xlo = window.axes[0].first, xhi = window.axes[0].second;
    const int64_t ylo = window.axes[1].first, yhi = window.axes[1].second;
    int64_t span = 0;
    for (const auto& [col, c] : form.row0) span = std::max(span, col);
    auto cell = [&](int64_t x, int64_t y) -> uint8_t& { return s.zeta[window.index({x, y})]; };
    // base row fully random
    for (int64_t x = xlo; x <= xhi; ++x) cell(x, ylo) = static_cast<uint8_t>(rng.next_below(p));
    for (int64_t y = ylo + 1; y <= yhi; ++y) {
        for (int64_t x = xlo; x <= xhi; ++x) {
            // cell (x, y) is determined when the level-0 cells it needs are
            // in-window: columns x - a0 + [0, span] on row y-1
            int64_t base = x - form.a0;
            if (base >= xlo && base + span <= xhi) {
                uint32_t acc = 0;
                for (const auto& [col, c] : form.row0)
                    acc = fp_add(acc, fp_mul(c, cell(base + col, y - 1), p), p);
                cell(x, y) = static_cast<uint8_t>(fp_mul(fp_neg(acc, p), form.lead_inv, p));
            } else {
                cell(x, y) = static_cast<uint8_t>(rng.next_below(p));
            }
        }
    }
    return s;
}

struct ConstraintSystem {
    GfMatrix mat;
    GfMatrix::Reduced red;
};

// all generator shifts fully supported in the window
ConstraintSystem build_system(const GroupSpec& spec, const Window& window, uint64_t budget) {
    const size_t cells = window.size();
    if (cells > budget) throw BudgetExceeded("sample_haar_window: window too large");
    std::vector<std::vector<std::pair<size_t, uint32_t>>> rows;
    for (const auto& g : spec.generators) {
        if (g.is_zero()) throw std::invalid_argument("sample_haar_window: zero generator");
        // iterate shifts k with k + supp(g) inside the window
        std::vector<std::pair<int64_t, int64_t>> kaxes(static_cast<size_t>(spec.dim));
        Exps mins = g.min_exponents();
        Exps maxs = mins;
        for (const auto& [e, c] : g.terms())
            for (size_t i = 0; i < e.size(); ++i) maxs[i] = std::max(maxs[i], e[i]);
        bool any = true;
        for (int i = 0; i < spec.dim; ++i) {
            kaxes[static_cast<size_t>(i)] = {window.axes[static_cast<size_t>(i)].first - mins[static_cast<size_t>(i)],
                                             window.axes[static_cast<size_t>(i)].second - maxs[static_cast<size_t>(i)]};
            if (kaxes[static_cast<size_t>(i)].first > kaxes[static_cast<size_t>(i)].second) any = false;
        }
        if (!any) continue;
        LatticePoint k(static_cast<size_t>(spec.dim));
        for (int i = 0; i < spec.dim; ++i) k[static_cast<size_t>(i)] = kaxes[static_cast<size_t>(i)].first;
        while (true) {
            std::vector<std::pair<size_t, uint32_t>> row;
            for (const auto& [e, c] : g.terms()) {
                LatticePoint pt(k);
                for (size_t i = 0; i < pt.size(); ++i) pt[i] += e[i];
                row.emplace_back(window.index(pt), c);
            }
            rows.push_back(std::move(row));
            if (rows.size() * cells > budget * 8)
                throw BudgetExceeded("sample_haar_window: constraint system too large");
            size_t i = k.size();
            bool done = true;
            while (i > 0) {
                --i;
                if (++k[i] <= kaxes[i].second) {
                    done = false;
                    break;
                }
                k[i] = kaxes[i].first;
            }
            if (done) break;
        }
    }
    GfMatrix mat(spec.p, rows.size(), cells);
    for (size_t r = 0; r < rows.size(); ++r)
        for (const auto& [c, v] : rows[r]) mat.add_at(r, c, v);
    auto red = mat.reduce();
    if (!red.consistent) throw std::logic_error("sample_haar_window: homogeneous system inconsistent");
    return {std::move(mat), std::move(red)};
}

} // namespace

std::vector<WindowSample> sample_haar_window(const GroupSpec& spec, const Window& window,
                                             size_t count, uint64_t seed, uint64_t budget) {
    if (window.dim() != spec.dim) throw std::invalid_argument("sample_haar_window: dimension mismatch");
    std::vector<WindowSample> out;
    out.reserve(count);
    SplitRng rng(seed, 0x47726f7570ull);

    if (spec.generators.empty()) {
        for (size_t i = 0; i < count; ++i) {
            WindowSample s;
            s.window = window;
            s.seed = seed;
            s.draw = i;
            s.zeta.resize(window.size());
            for (auto& z : s.zeta) z = static_cast<uint8_t>(rng.next_below(spec.p));
            out.push_back(std::move(s));
        }
        return out;
    }

    SweepForm form;
    if (sweep_form(spec, form)) {
        for (size_t i = 0; i < count; ++i) {
            WindowSample s = sweep_sample(spec, form, window, rng);
            s.seed = seed;
            s.draw = i;
            out.push_back(std::move(s));
        }
        return out;
    }

    ConstraintSystem sys = build_system(spec, window, budget);
    for (size_t i = 0; i < count; ++i) {
        WindowSample s;
        s.window = window;
        s.seed = seed;
        s.draw = i;
        auto sol = sys.mat.sample_solution(sys.red, rng);
        s.zeta.assign(sol.begin(), sol.end());
        out.push_back(std::move(s));
    }
    return out;
}

bool satisfies_relations(const GroupSpec& spec, const WindowSample& s) {
    for (const auto& g : spec.generators) {
        Exps mins = g.min_exponents();
        Exps maxs = mins;
        for (const auto& [e, c] : g.terms())
            for (size_t i = 0; i < e.size(); ++i) maxs[i] = std::max(maxs[i], e[i]);
        std::vector<std::pair<int64_t, int64_t>> kaxes(static_cast<size_t>(spec.dim));
        bool any = true;
        for (int i = 0; i < spec.dim; ++i) {
            kaxes[static_cast<size_t>(i)] = {s.window.axes[static_cast<size_t>(i)].first - mins[static_cast<size_t>(i)],
                                             s.window.axes[static_cast<size_t>(i)].second - maxs[static_cast<size_t>(i)]};
            if (kaxes[static_cast<size_t>(i)].first > kaxes[static_cast<size_t>(i)].second) any = false;
        }
        if (!any) continue;
        LatticePoint k(static_cast<size_t>(spec.dim));
        for (int i = 0; i < spec.dim; ++i) k[static_cast<size_t>(i)] = kaxes[static_cast<size_t>(i)].first;
        while (true) {
            uint32_t acc = 0;
            for (const auto& [e, c] : g.terms()) {
                LatticePoint pt(k);
                for (size_t i = 0; i < pt.size(); ++i) pt[i] += e[i];
                acc = fp_add(acc, fp_mul(c, s.at(pt), spec.p), spec.p);
            }
            if (acc) return false;
            size_t i = k.size();
            bool done = true;
            while (i > 0) {
                --i;
                if (++k[i] <= kaxes[i].second) {
                    done = false;
                    break;
                }
                k[i] = kaxes[i].first;
            }
            if (done) break;
        }
    }
    return true;
}

std::complex<double> evaluate(const TrigPoly& f, const LatticePoint& ell, const WindowSample& s) {
    std::complex<double> acc = 0;
    for (const auto& [c, q] : f.terms) {
        uint32_t phase = 0;
        for (size_t k = 0; k < q.base.coeffs().size(); ++k) {
            uint32_t ck = q.base.coeff(k);
            if (!ck) continue;
            phase = fp_add(phase, fp_mul(ck, s.at(char_site(q, k, ell)), f.p), f.p);
        }
        acc += c * root_of_unity(f.p, phase);
    }
    return acc;
}

std::complex<double> correlation(const TrigPoly& f, const LatticePoint& ell,
                                 const PrimeFamily& family) {
    // <T^ell f, f> = sum c_j conj(c_k) [R^ell Q_j == Q_k]
    const uint32_t p = family.modulus();
    std::complex<double> acc = 0;
    for (const auto& [cj, qj] : f.terms)
        for (const auto& [ck, qk] : f.terms) {
            // compare R^(ell+) Q_j == R^(ell-) Q_k without negative powers
            LaurentUniPoly lhs = qj, rhs = qk;
            bool ok = true;
            for (size_t i = 0; i < ell.size() && ok; ++i) {
                if (!ell[i]) continue;
                const UniPoly& r = family.at(static_cast<int>(i));
                LatticePoint unit(ell.size(), 0);
                unit[i] = std::abs(ell[i]);
                try {
                    if (ell[i] > 0)
                        lhs = act_on_character(unit, lhs, family);
                    else
                        rhs = act_on_character(unit, rhs, family);
                } catch (const std::domain_error&) {
                    ok = false;
                }
                (void)r;
            }
            if (ok && lhs == rhs) acc += cj * std::conj(ck);
        }
    return acc;
}

namespace {

int prime_order(const LaurentUniPoly& q, const UniPoly& prime, uint32_t p) {
    if (prime == UniPoly::x(p)) return q.offset; // base has nonzero constant term
    return q.base.multiplicity_of(prime);
}

} // namespace

std::map<LatticePoint, std::complex<double>> correlation_support(const TrigPoly& f,
                                                                 const PrimeFamily& family) {
    std::map<LatticePoint, std::complex<double>> out;
    for (const auto& [cj, qj] : f.terms)
        for (const auto& [ck, qk] : f.terms) {
            LatticePoint ell(static_cast<size_t>(family.size()), 0);
            for (int i = 0; i < family.size(); ++i)
                ell[static_cast<size_t>(i)] =
                    prime_order(qk, family.at(i), family.modulus()) -
                    prime_order(qj, family.at(i), family.modulus());
            // verify exactly
            LaurentUniPoly lhs = qj, rhs = qk;
            for (size_t i = 0; i < ell.size(); ++i) {
                if (!ell[i]) continue;
                LatticePoint unit(ell.size(), 0);
                unit[i] = std::abs(ell[i]);
                if (ell[i] > 0)
                    lhs = act_on_character(unit, lhs, family);
                else
                    rhs = act_on_character(unit, rhs, family);
            }
            if (lhs == rhs) out[ell] += cj * std::conj(ck);
        }
    for (auto it = out.begin(); it != out.end();)
        it = std::abs(it->second) == 0.0 ? out.erase(it) : std::next(it);
    return out;
}

double spectral_density(const TrigPoly& f, const PrimeFamily& family,
                        const std::vector<double>& theta) {
    auto corr = correlation_support(f, family);
    std::complex<double> acc = 0;
    for (const auto& [ell, v] : corr) {
        double dot = 0;
        for (size_t i = 0; i < ell.size(); ++i) dot += static_cast<double>(ell[i]) * theta[i];
        acc += v * std::exp(std::complex<double>(0, -kTwoPi * dot));
    }
    return acc.real();
}

double sigma2(const TrigPoly& f, const PrimeFamily& family) {
    return spectral_density(f, family, std::vector<double>(static_cast<size_t>(family.size()), 0.0));
}

double kernel_wtilde(const SummationWeights& weights, const std::vector<double>& theta) {
    std::complex<double> acc = 0;
    for (const auto& [pt, w] : weights.w) {
        double dot = 0;
        for (size_t i = 0; i < pt.size(); ++i) dot += static_cast<double>(pt[i]) * theta[i];
        acc += w * std::exp(std::complex<double>(0, kTwoPi * dot));
    }
    double denom = weights.sum_sq();
    if (denom == 0) throw std::invalid_argument("kernel_wtilde: zero weights");
    return std::norm(acc) / denom;
}

double kernel_coefficient(const SummationWeights& weights, const LatticePoint& q) {
    double denom = weights.sum_sq();
    if (denom == 0) throw std::invalid_argument("kernel_coefficient: zero weights");
    double acc = 0;
    for (const auto& [pt, w] : weights.w) {
        LatticePoint shifted = pt;
        for (size_t i = 0; i < q.size(); ++i) shifted[i] += q[i];
        auto it = weights.w.find(shifted);
        if (it != weights.w.end()) acc += w * it->second;
    }
    return acc / denom;
}

RegularityReport zeta_regularity_check(const std::vector<SummationWeights>& seq, int radius,
                                       double tol) {
    RegularityReport rep;
    if (seq.empty()) throw std::invalid_argument("zeta_regularity_check: empty sequence");
    size_t dim = seq.front().w.begin()->first.size();
    // lattice points with sup-norm <= radius
    std::vector<LatticePoint> pts;
    LatticePoint cur(dim, -radius);
    while (true) {
        pts.push_back(cur);
        size_t i = dim;
        bool done = true;
        while (i > 0) {
            --i;
            if (++cur[i] <= radius) {
                done = false;
                break;
            }
            cur[i] = -radius;
        }
        if (done) break;
    }
    rep.points = pts;
    rep.coefficients.resize(seq.size());
    for (size_t s = 0; s < seq.size(); ++s)
        for (const auto& q : pts) rep.coefficients[s].push_back(kernel_coefficient(seq[s], q));
    rep.converging = true;
    for (double c : rep.coefficients.back())
        if (std::abs(c - 1.0) > tol) rep.converging = false;
    return rep;
}

std::vector<double> folner_sums(const TrigPoly& f, const GroupSpec& spec, const PrimeFamily& family,
                                int64_t n, size_t samples, uint64_t seed) {
    if (!f.is_real_valued()) throw std::invalid_argument("folner_sums: observable must be real-valued");
    if (spec.dim != family.size()) throw std::invalid_argument("folner_sums: dimension mismatch");
    // window: box [0, n) in every direction, first axis extended by the
    // character supports
    int64_t lo0 = 0, hi0 = n - 1;
    for (const auto& [c, q] : f.terms) {
        lo0 = std::min<int64_t>(lo0, q.offset);
        hi0 = std::max<int64_t>(hi0, n - 1 + q.offset + q.base.degree_or(0));
    }
    Window win;
    win.axes.emplace_back(lo0, hi0);
    for (int i = 1; i < spec.dim; ++i) win.axes.emplace_back(0, n - 1);

    auto draws = sample_haar_window(spec, win, samples, seed);
    std::vector<double> out;
    out.reserve(samples);
    const double norm = std::pow(static_cast<double>(n), static_cast<double>(spec.dim) / 2.0);
    LatticePoint ell(static_cast<size_t>(spec.dim), 0);
    for (const auto& s : draws) {
        double acc = 0;
        std::fill(ell.begin(), ell.end(), 0);
        while (true) {
            acc += evaluate(f, ell, s).real();
            size_t i = ell.size();
            bool done = true;
            while (i > 0) {
                --i;
                if (++ell[i] < n) {
                    done = false;
                    break;
                }
                ell[i] = 0;
            }
            if (done) break;
        }
        out.push_back(acc / norm);
    }
    return out;
}

StepLaw StepLaw::lazy_nearest_neighbor() {
    return {{{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}}};
}
StepLaw StepLaw::box(int radius) {
    StepLaw law;
    for (int64_t a = -radius; a <= radius; ++a)
        for (int64_t b = -radius; b <= radius; ++b) law.steps.push_back({a, b});
    return law;
}

SummationWeights random_walk_weights(const StepLaw& law, int64_t n, uint64_t seed) {
    if (law.steps.size() < 2) throw std::invalid_argument("random_walk_weights: degenerate step law");
    // support must span Z^2: the gcd of all 2x2 step determinants is 1
    int64_t g = 0;
    for (size_t i = 0; i < law.steps.size(); ++i)
        for (size_t j = i + 1; j < law.steps.size(); ++j) {
            int64_t det = law.steps[i][0] * law.steps[j][1] - law.steps[i][1] * law.steps[j][0];
            g = std::gcd(g, det);
        }
    if (g != 1) throw std::invalid_argument("random_walk_weights: step law is not reduced aperiodic");

    SplitRng rng(seed, 0x57616c6bull);
    SummationWeights w;
    int64_t x = 0, y = 0;
    for (int64_t k = 0; k < n; ++k) {
        w.w[{x, y}] += 1.0;
        const auto& s = law.steps[rng.next_below(law.steps.size())];
        x += s[0];
        y += s[1];
    }
    return w;
}

std::vector<double> rw_sums_with_weights(const TrigPoly& f, const GroupSpec& spec,
                                         const PrimeFamily& family, const SummationWeights& w,
                                         size_t samples, uint64_t group_seed) {
    if (!f.is_real_valued()) throw std::invalid_argument("rw_sums: observable must be real-valued");
    if (spec.dim != 2) throw std::invalid_argument("rw_sums: two-dimensional walks only");
    // window: bounding box of the visited sites, first axis padded by the
    // character supports
    int64_t lo0 = 0, hi0 = 0, lo1 = 0, hi1 = 0;
    for (const auto& [pt, v] : w.w) {
        lo0 = std::min(lo0, pt[0]);
        hi0 = std::max(hi0, pt[0]);
        lo1 = std::min(lo1, pt[1]);
        hi1 = std::max(hi1, pt[1]);
    }
    int64_t pad_lo = 0, pad_hi = 0;
    for (const auto& [c, q] : f.terms) {
        pad_lo = std::min<int64_t>(pad_lo, q.offset);
        pad_hi = std::max<int64_t>(pad_hi, q.offset + q.base.degree_or(0));
    }
    Window win;
    win.axes.emplace_back(lo0 + pad_lo, hi0 + pad_hi);
    win.axes.emplace_back(lo1, hi1);

    const double denom = std::sqrt(w.sum_sq() * sigma2(f, family));
    if (denom == 0) throw std::invalid_argument("rw_sums: zero normalization");
    auto draws = sample_haar_window(spec, win, samples, group_seed);
    std::vector<double> out;
    out.reserve(samples);
    for (const auto& s : draws) {
        double acc = 0;
        for (const auto& [pt, v] : w.w) acc += v * evaluate(f, pt, s).real();
        out.push_back(acc / denom);
    }
    return out;
}

std::vector<double> rw_sums(const TrigPoly& f, const GroupSpec& spec, const PrimeFamily& family,
                            int64_t n, size_t samples, uint64_t walk_seed, uint64_t group_seed) {
    SummationWeights w = random_walk_weights(StepLaw::box(3), n, walk_seed);
    return rw_sums_with_weights(f, spec, family, w, samples, group_seed);
}

KsResult ks_test(std::vector<double> samples, double sigma2v, double threshold) {
    if (samples.size() < 100) throw std::invalid_argument("ks_test: need at least 100 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0;
    if (sigma2v == 0.0) {
        // reference: point mass at zero
        double below = 0, at_or_below = 0;
        for (size_t i = 0; i < samples.size(); ++i) {
            if (samples[i] < 0) below = static_cast<double>(i + 1);
            if (samples[i] <= 0) at_or_below = static_cast<double>(i + 1);
        }
        d = std::max(below / n, 1.0 - at_or_below / n);
    } else {
        const double sd = std::sqrt(sigma2v);
        for (size_t i = 0; i < samples.size(); ++i) {
            double cdf = 0.5 * std::erfc(-samples[i] / (sd * std::sqrt(2.0)));
            double hi = static_cast<double>(i + 1) / n - cdf;
            double lo = cdf - static_cast<double>(i) / n;
            d = std::max({d, hi, lo});
        }
    }
    return {d, threshold, d <= threshold};
}

double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}
double variance(const std::vector<double>& v) {
    double m = mean(v), s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

} // namespace fpmix
