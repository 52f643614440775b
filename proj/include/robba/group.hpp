#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "laurent.hpp"
#include "padic.hpp"

namespace robba {

struct ChartError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One monomial c * p^pexp * prod x_i^xe_i * prod y_i^ye_i of a coordinate
/// polynomial.
struct LawTerm {
    std::int64_t c = 0;
    int pexp = 0;
    std::vector<int> xe;
    std::vector<int> ye;
};

/// Coordinates of psi(x) psi(y) as integer polynomials in x, y (and p).
struct PolynomialLaw {
    int dim = 0;
    std::vector<std::vector<LawTerm>> coords;

    template <class T, class Lift>
    std::vector<T> evaluate(const std::vector<T>& x, const std::vector<T>& y, int p, Lift lift) const {
        if (static_cast<int>(x.size()) != dim || static_cast<int>(y.size()) != dim)
            throw std::invalid_argument("law evaluated at a point of wrong dimension");
        std::vector<T> z;
        z.reserve(dim);
        for (const auto& poly : coords) {
            T acc = lift(BigInt(0));
            for (const auto& t : poly) {
                BigInt k = t.c;
                for (int i = 0; i < t.pexp; ++i) k *= p;
                T term = lift(k);
                for (int i = 0; i < dim; ++i) {
                    for (int e = 0; e < t.xe[i]; ++e) term = term * x[i];
                    for (int e = 0; e < t.ye[i]; ++e) term = term * y[i];
                }
                acc = acc + term;
            }
            z.push_back(acc);
        }
        return z;
    }
};

/// A uniform pro-p group given by its coordinate law on Z_p^d.
class GroupChart {
public:
    GroupChart() = default;
    GroupChart(std::string name, int p, PolynomialLaw law) : name_(std::move(name)), p_(p), law_(std::move(law)) {
        validate(PrecisionPolicy{p_, 1});
        for (const auto& poly : law_.coords)
            for (const auto& t : poly)
                if (static_cast<int>(t.xe.size()) != law_.dim || static_cast<int>(t.ye.size()) != law_.dim ||
                    t.pexp < 0)
                    throw ChartError("malformed law term in chart '" + name_ + "'");
        if (static_cast<int>(law_.coords.size()) != law_.dim)
            throw ChartError("chart '" + name_ + "' needs one polynomial per coordinate");
    }

    const std::string& name() const { return name_; }
    int dim() const { return law_.dim; }
    int p() const { return p_; }
    const PolynomialLaw& law() const { return law_; }

    std::vector<BigInt> law_int(const std::vector<BigInt>& x, const std::vector<BigInt>& y) const {
        return law_.evaluate(x, y, p_, [](const BigInt& k) { return k; });
    }
    std::vector<PadicScalar> law_padic(const std::vector<PadicScalar>& x, const std::vector<PadicScalar>& y) const {
        int prec = max_precision(p_);
        return law_.evaluate(x, y, p_, [&](const BigInt& k) { return PadicScalar::from_int(p_, k, prec); });
    }

    /// Identity, associativity on random integer triples and uniformity of
    /// commutators; throws ChartError on the first failure.
    void self_test(std::uint64_t seed = 1, int triples = 20) const {
        const int d = dim();
        const std::vector<BigInt> zero(d, 0);
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> coord(-50, 50);
        auto rnd = [&] {
            std::vector<BigInt> v(d);
            for (auto& c : v) c = coord(rng);
            return v;
        };
        for (int k = 0; k < triples; ++k) {
            auto x = rnd(), y = rnd(), z = rnd();
            if (law_int(x, zero) != x || law_int(zero, x) != x)
                throw ChartError("chart '" + name_ + "': 0 is not the identity");
            if (law_int(law_int(x, y), z) != law_int(x, law_int(y, z)))
                throw ChartError("chart '" + name_ + "': law is not associative");
        }
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                auto u = law_int(unit(i), unit(j)), w = law_int(unit(j), unit(i));
                for (int k = 0; k < d; ++k)
                    if ((u[k] - w[k]) % p_ != 0)
                        throw ChartError("chart '" + name_ + "': commutator of generators " + std::to_string(i + 1) +
                                         "," + std::to_string(j + 1) + " is not divisible by p");
            }
    }

    std::vector<BigInt> unit(int i) const {
        std::vector<BigInt> e(dim(), 0);
        e[i] = 1;
        return e;
    }

private:
    std::string name_;
    int p_ = 3;
    PolynomialLaw law_;
};

inline LawTerm law_term(int d, std::int64_t c, int pexp, std::vector<int> xe, std::vector<int> ye) {
    if (xe.empty()) xe.assign(d, 0);
    if (ye.empty()) ye.assign(d, 0);
    return {c, pexp, std::move(xe), std::move(ye)};
}

/// Z_p^d: componentwise addition.
inline GroupChart abelian_chart(int d, int p) {
    PolynomialLaw law{d, {}};
    for (int i = 0; i < d; ++i) {
        std::vector<int> e(d, 0);
        e[i] = 1;
        law.coords.push_back({law_term(d, 1, 0, e, {}), law_term(d, 1, 0, {}, e)});
    }
    return GroupChart("abelian:" + std::to_string(d), p, law);
}

/// 1 + p (strictly upper triangular 3x3) with h1 = I + pE12, h2 = I + pE23,
/// h3 = I + pE13 and psi(x) = h1^x1 h2^x2 h3^x3:
/// law(x, y) = (x1 + y1, x2 + y2, x3 + y3 - p y1 x2).
inline GroupChart heisenberg_chart(int p) {
    const int d = 3;
    PolynomialLaw law{d, {}};
    for (int i = 0; i < 2; ++i) {
        std::vector<int> e(d, 0);
        e[i] = 1;
        law.coords.push_back({law_term(d, 1, 0, e, {}), law_term(d, 1, 0, {}, e)});
    }
    law.coords.push_back({law_term(d, 1, 0, {0, 0, 1}, {}), law_term(d, 1, 0, {}, {0, 0, 1}),
                          law_term(d, -1, 1, {0, 1, 0}, {1, 0, 0})});
    return GroupChart("heisenberg", p, law);
}

/// Exact expansion prod_i (1+b_i)^x_i = sum_a prod_i C(x_i, a_i) b^a over a
/// in N_0^d with deg a <= D. has_tail reports whether terms of higher degree
/// are nonzero.
struct ExactExpansion {
    std::map<Monomial, BigInt> terms;
    bool has_tail = false;
};

inline ExactExpansion exact_dirac_terms(const std::vector<BigInt>& x, int D) {
    const int d = static_cast<int>(x.size());
    ExactExpansion r;
    int reach = 0;
    for (const auto& xi : x) {
        if (xi < 0) r.has_tail = true;
        else reach += xi > D ? D + 1 : static_cast<int>(xi);
    }
    if (reach > D) r.has_tail = true;
    std::vector<std::vector<BigInt>> binom(d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k <= D; ++k) binom[i].push_back(binomial(x[i], k));
    Monomial a(d, 0);
    std::function<void(int, int, BigInt)> rec = [&](int i, int left, BigInt c) {
        if (c == 0) return;
        if (i == d) {
            r.terms.emplace(a, c);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            a[i] = k;
            rec(i + 1, left - k, c * binom[i][k]);
        }
        a[i] = 0;
    };
    rec(0, D, BigInt(1));
    return r;
}

/// Truncated expansion of the Dirac distribution at psi(x), x integral.
inline LaurentSeries dirac_expand(const GroupChart& chart, const std::vector<BigInt>& x, const TruncationPolicy& pol) {
    if (static_cast<int>(x.size()) != chart.dim()) throw std::invalid_argument("point of wrong dimension");
    ExactExpansion ex = exact_dirac_terms(x, pol.mhi);
    LaurentSeries::TermMap raw;
    for (const auto& [a, c] : ex.terms) raw.emplace(a, PadicScalar::from_int(pol.p, c, pol.N));
    ErrorLedger led;
    if (ex.has_tail) led.add_outside(pol.mhi + 1, 0);
    return LaurentSeries::from_terms(chart.dim(), pol, raw, led);
}

/// Same for x in Z_p^d known to finite precision; binomials follow the
/// precision of x.
inline LaurentSeries dirac_expand(const GroupChart& chart, const std::vector<PadicScalar>& x,
                                  const TruncationPolicy& pol) {
    const int d = chart.dim();
    if (static_cast<int>(x.size()) != d) throw std::invalid_argument("point of wrong dimension");
    std::vector<std::vector<PadicScalar>> binom(d);
    for (int i = 0; i < d; ++i)
        for (int k = 0; k <= pol.mhi; ++k) binom[i].push_back(binomial(x[i], k, pol.N));
    LaurentSeries::TermMap raw;
    Monomial a(d, 0);
    std::function<void(int, int, PadicScalar)> rec = [&](int i, int left, PadicScalar c) {
        if (c.is_exact_zero()) return;
        if (i == d) {
            raw.emplace(a, c);
            return;
        }
        for (int k = 0; k <= left; ++k) {
            a[i] = k;
            rec(i + 1, left - k, c * binom[i][k]);
        }
        a[i] = 0;
    };
    rec(0, pol.mhi, PadicScalar::one(pol.p, max_precision(pol.p)));
    ErrorLedger led;
    led.add_outside(pol.mhi + 1, 0);
    return LaurentSeries::from_terms(d, pol, raw, led);
}

/// Exact expansion of b_i b_j - b_j b_i (0-based i > j) up to degree D.
inline ExactExpansion exact_commutator(const GroupChart& chart, int i, int j, int D) {
    if (!(0 <= j && j < i && i < chart.dim())) throw std::invalid_argument("commutator needs 1 <= j < i <= d");
    auto u = chart.law_int(chart.unit(i), chart.unit(j));
    auto w = chart.law_int(chart.unit(j), chart.unit(i));
    ExactExpansion r;
    if (u == w) return r;
    ExactExpansion eu = exact_dirac_terms(u, D), ew = exact_dirac_terms(w, D);
    r.terms = eu.terms;
    for (const auto& [a, c] : ew.terms) {
        BigInt& t = r.terms[a];
        t -= c;
        if (t == 0) r.terms.erase(a);
    }
    r.has_tail = eu.has_tail || ew.has_tail;
    return r;
}

/// Truncated expansion of b_i b_j - b_j b_i for 1 <= j < i <= d.
inline LaurentSeries commutator_series(const GroupChart& chart, int i, int j, const TruncationPolicy& pol) {
    ExactExpansion ex = exact_commutator(chart, i - 1, j - 1, pol.mhi);
    LaurentSeries::TermMap raw;
    for (const auto& [a, c] : ex.terms) raw.emplace(a, PadicScalar::from_int(pol.p, c, pol.N));
    ErrorLedger led;
    if (ex.has_tail) led.add_outside(pol.mhi + 1, 0);
    return LaurentSeries::from_terms(chart.dim(), pol, raw, led);
}

}  // namespace robba
