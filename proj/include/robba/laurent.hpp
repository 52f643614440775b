#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/container/small_vector.hpp>

#include "ledger.hpp"
#include "padic.hpp"
#include "rational.hpp"

namespace robba {

/// Exponent vector; stored inline for d <= 4.
using Monomial = boost::container::small_vector<int, 4>;

inline int degree(const Monomial& a) {
    int s = 0;
    for (int x : a) s += x;
    return s;
}

inline Monomial operator+(const Monomial& a, const Monomial& b) {
    Monomial r(a);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}
inline Monomial operator-(const Monomial& a) {
    Monomial r(a);
    for (int& x : r) x = -x;
    return r;
}

struct MonomialHash {
    std::size_t operator()(const Monomial& a) const noexcept {
        std::uint64_t h = 0x9e3779b97f4a7c15ull;
        for (int x : a) h = (h ^ static_cast<std::uint32_t>(x)) * 0x100000001b3ull + (h >> 29);
        return static_cast<std::size_t>(h);
    }
};

inline std::string monomial_str(const Monomial& a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += "b" + std::to_string(i + 1);
        if (a[i] != 1) s += "^" + std::to_string(a[i]);
    }
    return s.empty() ? "1" : s;
}

struct TruncationPolicy {
    int p = 3;
    int N = 8;
    int mlo = -6;
    int mhi = 6;
    int A = 8;
    Rational T = 8;
    Rational eref{1, 2};

    void validate() const {
        robba::validate(PrecisionPolicy{p, N});
        if (N > max_precision(p))
            throw std::invalid_argument("precision N exceeds " + std::to_string(max_precision(p)) + " digits for p = " +
                                        std::to_string(p));
        if (mlo > 0 || mhi < 0) throw std::invalid_argument("degree window must contain 0");
        if (A < std::max(-mlo, mhi)) throw std::invalid_argument("cap A must be at least max(|mlo|, mhi)");
        if (!(Rational(0) < T)) throw std::invalid_argument("threshold T must be positive");
        RadiusExponent{eref};
    }

    Rational ref_exponent(int val, int deg) const { return Rational(val) + Rational(deg) * eref; }

    bool representable(const Monomial& a) const {
        int d = degree(a);
        if (d < mlo || d > mhi) return false;
        return std::all_of(a.begin(), a.end(), [&](int x) { return std::abs(x) <= A; });
    }

    friend bool operator==(const TruncationPolicy&, const TruncationPolicy&) = default;
};

inline TruncationPolicy intersect(const TruncationPolicy& a, const TruncationPolicy& b) {
    if (a.p != b.p) throw std::invalid_argument("series over different primes");
    if (a.eref != b.eref) throw std::invalid_argument("series with different reference radii");
    TruncationPolicy r = a;
    r.N = std::min(a.N, b.N);
    r.mlo = std::max(a.mlo, b.mlo);
    r.mhi = std::min(a.mhi, b.mhi);
    r.A = std::min(a.A, b.A);
    r.T = min(a.T, b.T);
    return r;
}

/// Norm of a series together with how much of it is actually known.
struct CertifiedNorm {
    NormValue value;        // from the stored terms
    NormValue uncertainty;  // bound on everything not known exactly
    bool certified() const { return uncertainty < value; }
    /// Upper bound on the true norm.
    NormValue upper() const { return max(value, uncertainty); }
};

/// A finite sum of terms d_a b^a over a in Z^d plus the ledger of what was
/// discarded.
class LaurentSeries {
public:
    using TermMap = std::map<Monomial, PadicScalar>;

    LaurentSeries() = default;
    LaurentSeries(int d, TruncationPolicy pol) : d_(d), pol_(pol) {}

    /// Builds a series from raw terms and applies the policy.
    static LaurentSeries from_terms(int d, const TruncationPolicy& pol, const TermMap& raw, ErrorLedger ledger = {}) {
        LaurentSeries s(d, pol);
        s.ledger_ = std::move(ledger);
        for (const auto& [a, c] : raw) s.place(a, c);
        return s;
    }
    static LaurentSeries monomial(int d, const TruncationPolicy& pol, const Monomial& a, const PadicScalar& c) {
        return from_terms(d, pol, TermMap{{a, c}});
    }
    static LaurentSeries one(int d, const TruncationPolicy& pol) {
        return monomial(d, pol, Monomial(d, 0), PadicScalar::one(pol.p, pol.N));
    }

    int dim() const { return d_; }
    int p() const { return pol_.p; }
    const TruncationPolicy& policy() const { return pol_; }
    const TermMap& terms() const { return terms_; }
    const ErrorLedger& ledger() const { return ledger_; }
    ErrorLedger& ledger() { return ledger_; }
    bool is_zero() const { return terms_.empty(); }
    bool exact() const { return ledger_.empty(); }

    PadicScalar coefficient(const Monomial& a) const {
        auto it = terms_.find(a);
        return it == terms_.end() ? PadicScalar::zero(pol_.p) : it->second;
    }

    /// The coefficient at a with its precision cut to what the ledger allows.
    PadicScalar certified_coefficient(const Monomial& a) const {
        int fl = ledger_.coefficient_floor(degree(a), !pol_.representable(a));
        return coefficient(a).reduced_to(fl);
    }

    /// Stored terms as a degree profile.
    DegreeProfile profile() const {
        DegreeProfile prof;
        for (const auto& [a, c] : terms_) profile_insert(prof, degree(a), c.valuation());
        return prof;
    }
    /// Stored terms together with all ledger content.
    DegreeProfile full_profile() const {
        DegreeProfile prof = profile();
        for (auto [m, v] : ledger_.all()) profile_insert(prof, m, v);
        return prof;
    }

    /// Max over stored terms of |d_a| p^(-deg(a) e).
    NormValue norm_rho(const RadiusExponent& rho) const { return norm_at(rho.value()); }
    NormValue norm_at(const Rational& e) const {
        NormValue best = NormValue::zero();
        for (const auto& [a, c] : terms_)
            best = max(best, NormValue::from_exponent(Rational(c.valuation()) + Rational(degree(a)) * e));
        return best;
    }

    /// Bound on the part of the element not known exactly at radius p^(-e):
    /// the ledger plus the unknown digits of every stored coefficient.
    NormValue uncertainty_at(const Rational& e) const {
        std::optional<Rational> best = ledger_.exponent_at(e);
        for (const auto& [a, c] : terms_) {
            Rational x = Rational(c.absolute_precision()) + Rational(degree(a)) * e;
            if (!best || x < *best) best = x;
        }
        return best ? NormValue::from_exponent(*best) : NormValue::zero();
    }
    CertifiedNorm certified_norm(const Rational& e) const { return {norm_at(e), uncertainty_at(e)}; }

    /// The argmax terms of the stored norm at radius p^(-e).
    std::vector<Monomial> argmax(const Rational& e) const {
        NormValue n = norm_at(e);
        std::vector<Monomial> r;
        for (const auto& [a, c] : terms_)
            if (NormValue::from_exponent(Rational(c.valuation()) + Rational(degree(a)) * e) == n) r.push_back(a);
        return r;
    }

    /// Terms in output order: reference norm descending, then degree, then
    /// lexicographic exponent.
    std::vector<std::pair<Monomial, PadicScalar>> ordered_terms() const {
        std::vector<std::pair<Monomial, PadicScalar>> v(terms_.begin(), terms_.end());
        std::stable_sort(v.begin(), v.end(), [&](const auto& x, const auto& y) {
            Rational ex = pol_.ref_exponent(x.second.valuation(), degree(x.first));
            Rational ey = pol_.ref_exponent(y.second.valuation(), degree(y.first));
            if (ex != ey) return ex < ey;
            int dx = degree(x.first), dy = degree(y.first);
            if (dx != dy) return dx < dy;
            return x.first < y.first;
        });
        return v;
    }

    /// "p^1*3 * b1^2*b2^-1 + ..." in output order; "0" for the zero series.
    std::string str() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (const auto& [a, c] : ordered_terms()) {
            if (!s.empty()) s += " + ";
            s += c.str() + " * " + monomial_str(a);
        }
        return s;
    }

    /// Inserts a term under the policy: cancelled coefficients, out-of-range
    /// monomials and below-threshold terms go to the ledger.
    void place(const Monomial& a, const PadicScalar& c0) {
        if (static_cast<int>(a.size()) != d_) throw std::invalid_argument("monomial of wrong dimension");
        if (c0.is_exact_zero()) return;
        const int deg = degree(a);
        if (c0.is_zero()) {
            if (pol_.representable(a))
                ledger_.add_inside(deg, c0.valuation());
            else
                ledger_.add_outside(deg, c0.valuation());
            return;
        }
        PadicScalar c = c0.with_relative_precision(pol_.N);
        if (!pol_.representable(a)) {
            ledger_.add_outside(deg, c.valuation());
            return;
        }
        if (pol_.ref_exponent(c.valuation(), deg) >= pol_.T) {
            ledger_.add_inside(deg, c.valuation());
            return;
        }
        terms_[a] = c;
    }

    friend bool operator==(const LaurentSeries& x, const LaurentSeries& y) {
        return x.d_ == y.d_ && x.pol_ == y.pol_ && x.terms_ == y.terms_ && x.ledger_ == y.ledger_;
    }

private:
    int d_ = 1;
    TruncationPolicy pol_;
    TermMap terms_;
    ErrorLedger ledger_;
};

inline NormValue norm_rho(const LaurentSeries& x, const RadiusExponent& rho) { return x.norm_rho(rho); }

/// max(|x|_rho1, |x|_rho2) for rho1 < rho2.
inline NormValue norm_two_radius(const LaurentSeries& x, const RadiusExponent& rho1, const RadiusExponent& rho2) {
    if (!rho1.smaller_radius_than(rho2)) throw std::invalid_argument("two-radius norm needs rho1 < rho2");
    return max(x.norm_rho(rho1), x.norm_rho(rho2));
}

inline NormValue sup_norm(const LaurentSeries& x) { return x.norm_at(Rational(0)); }

/// |x|_{r,r} along r = p^(-1/k) for the given k.
inline std::vector<NormValue> radius_limit_check(const LaurentSeries& x, const std::vector<int>& ks) {
    std::vector<NormValue> r;
    for (int k : ks) r.push_back(x.norm_rho(RadiusExponent(Rational(1, k))));
    return r;
}

inline void check_compatible(const LaurentSeries& x, const LaurentSeries& y) {
    if (x.dim() != y.dim()) throw std::invalid_argument("series of different dimensions");
    if (x.p() != y.p()) throw std::invalid_argument("series over different primes");
}

inline LaurentSeries add_series(const LaurentSeries& x, const LaurentSeries& y) {
    check_compatible(x, y);
    LaurentSeries::TermMap raw = x.terms();
    for (const auto& [a, c] : y.terms()) {
        auto [it, fresh] = raw.emplace(a, c);
        if (!fresh) it->second += c;
    }
    ErrorLedger led = x.ledger();
    led.merge(y.ledger());
    return LaurentSeries::from_terms(x.dim(), intersect(x.policy(), y.policy()), raw, led);
}

inline LaurentSeries scale(const PadicScalar& c, const LaurentSeries& x) {
    LaurentSeries::TermMap raw;
    for (const auto& [a, d] : x.terms()) raw.emplace(a, c * d);
    ErrorLedger led;
    if (!c.is_exact_zero()) led = x.ledger().shifted(0, c.valuation());
    return LaurentSeries::from_terms(x.dim(), x.policy(), raw, led);
}

inline LaurentSeries negate(const LaurentSeries& x) {
    return scale(PadicScalar::from_int(x.p(), -1, max_precision(x.p())), x);
}

inline LaurentSeries sub_series(const LaurentSeries& x, const LaurentSeries& y) { return add_series(x, negate(y)); }

/// Raw expansion of a product of two monomials: canonical terms (not yet
/// truncated) and the inside content dropped while computing it.
struct MonomialExpansion {
    std::vector<std::pair<Monomial, PadicScalar>> terms;
    ErrorLedger ledger;
};

/// Error bound of a product from the ledgers of its factors: each factor's
/// discarded content times everything known about the other.
inline ErrorLedger product_ledger(const LaurentSeries& x, const LaurentSeries& y) {
    ErrorLedger r;
    DegreeProfile lx = x.ledger().all(), ly = y.ledger().all();
    if (!lx.empty()) r.absorb_inside(profile_product(lx, y.full_profile()));
    if (!ly.empty()) r.absorb_inside(profile_product(x.profile(), ly));
    return r;
}

/// Pair of stored terms of two factors, in the fixed pair order.
struct TermPair {
    const Monomial* a;
    const Monomial* b;
    PadicScalar c;  // product of the two coefficients
};

inline std::vector<TermPair> term_pairs(const LaurentSeries& x, const LaurentSeries& y) {
    std::vector<TermPair> r;
    r.reserve(x.terms().size() * y.terms().size());
    for (const auto& [a, ca] : x.terms())
        for (const auto& [b, cb] : y.terms()) r.push_back({&a, &b, ca * cb});
    return r;
}

/// Sums c * expansion over all pairs in pair order and truncates. Both the
/// commutative and the rewriting product go through here.
inline LaurentSeries assemble_product(const LaurentSeries& x, const LaurentSeries& y, const std::vector<TermPair>& pairs,
                                      const std::vector<const MonomialExpansion*>& expansions,
                                      const TruncationPolicy& pol) {
    LaurentSeries::TermMap acc;
    ErrorLedger led = product_ledger(x, y);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const PadicScalar& c = pairs[k].c;
        const MonomialExpansion& ex = *expansions[k];
        for (const auto& [g, a] : ex.terms) {
            PadicScalar t = c * a;
            auto [it, fresh] = acc.emplace(g, t);
            if (!fresh) it->second += t;
        }
        if (!ex.ledger.empty()) led.absorb(ex.ledger, 0, c.valuation());
    }
    return LaurentSeries::from_terms(x.dim(), pol, acc, led);
}

/// The product in the commutative ring: b^a b^b = b^(a+b).
inline LaurentSeries mul_commutative(const LaurentSeries& x, const LaurentSeries& y) {
    check_compatible(x, y);
    auto pairs = term_pairs(x, y);
    std::vector<MonomialExpansion> ex(pairs.size());
    std::vector<const MonomialExpansion*> ptr(pairs.size());
    const PadicScalar one = PadicScalar::one(x.p(), max_precision(x.p()));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        ex[k].terms.emplace_back(*pairs[k].a + *pairs[k].b, one);
        ptr[k] = &ex[k];
    }
    return assemble_product(x, y, pairs, ptr, intersect(x.policy(), y.policy()));
}

}  // namespace robba
