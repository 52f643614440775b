#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "laurent.hpp"
#include "rewriter.hpp"

namespace robba {

struct QuasiAbelianViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An element of S written as a product b^s_1 ... b^s_k with each s_j in
/// N_0^d; the empty product is 1.
using SWord = std::vector<Monomial>;

/// The truncated distribution algebra of a chart with a finite family of
/// norms |.|_rho and a quasi-abelian constant.
class NormedAlgebra {
public:
    NormedAlgebra(Multiplier m, std::vector<RadiusExponent> radii, NormValue gamma)
        : m_(std::move(m)), radii_(std::move(radii)), gamma_(gamma) {
        if (radii_.empty()) throw std::invalid_argument("a normed algebra needs at least one norm");
        if (!(gamma_ < NormValue::one())) throw QuasiAbelianViolation("quasi-abelian constant must be < 1");
    }

    const Multiplier& multiplier() const { return m_; }
    const TruncationPolicy& policy() const { return m_.policy(); }
    int dim() const { return m_.dim(); }
    int p() const { return m_.policy().p; }
    std::size_t norms() const { return radii_.size(); }
    const RadiusExponent& radius(std::size_t i) const { return radii_.at(i); }
    const NormValue& gamma() const { return gamma_; }

    LaurentSeries mul(const LaurentSeries& x, const LaurentSeries& y) const { return m_.series_product(x, y); }
    LaurentSeries sub(const LaurentSeries& x, const LaurentSeries& y) const { return sub_series(x, y); }
    LaurentSeries one() const { return LaurentSeries::one(dim(), policy()); }
    LaurentSeries zero() const { return LaurentSeries(dim(), policy()); }

    CertifiedNorm norm(std::size_t i, const LaurentSeries& x) const { return x.certified_norm(radius(i).value()); }

    LaurentSeries value(const SWord& s) const {
        LaurentSeries r = one();
        for (const auto& g : s) {
            if (std::any_of(g.begin(), g.end(), [](int x) { return x < 0; }))
                throw std::invalid_argument("elements of S have nonnegative exponents");
            r = mul(r, LaurentSeries::monomial(dim(), policy(), g, PadicScalar::one(p(), policy().N)));
        }
        return r;
    }
    /// |s|_i; exact since the norms are multiplicative.
    NormValue norm(std::size_t i, const SWord& s) const {
        int deg = 0;
        for (const auto& g : s) deg += degree(g);
        return NormValue::from_exponent(Rational(deg) * radius(i).value());
    }

private:
    Multiplier m_;
    std::vector<RadiusExponent> radii_;
    NormValue gamma_;
};

/// (s, a), standing for s^-1 a.
struct Fraction {
    SWord s;
    LaurentSeries a;
};

inline SWord s_power(const SWord& s, int k) {
    SWord r;
    for (int i = 0; i < k; ++i) r.insert(r.end(), s.begin(), s.end());
    return r;
}

inline SWord s_concat(const SWord& s, const SWord& t) {
    SWord r = s;
    r.insert(r.end(), t.begin(), t.end());
    return r;
}

inline std::string sword_str(const SWord& s) {
    if (s.empty()) return "1";
    std::string r;
    for (const auto& g : s) r += (r.empty() ? "" : " ") + ("(" + monomial_str(g) + ")");
    return r;
}

inline CertifiedNorm scaled(const CertifiedNorm& n, const NormValue& k) { return {n.value * k, n.uncertainty * k}; }

/// Delta_i(x, y) = |s|^-1 |t|^-1 |a t - s b| for x = (s, a), y = (t, b).
inline CertifiedNorm delta(const NormedAlgebra& A, std::size_t i, const Fraction& x, const Fraction& y) {
    LaurentSeries at = A.mul(x.a, A.value(y.s));
    LaurentSeries sb = A.mul(A.value(x.s), y.a);
    NormValue k = NormValue::one() / (A.norm(i, x.s) * A.norm(i, y.s));
    return scaled(A.norm(i, A.sub(at, sb)), k);
}

enum class OreStatus { certified, truncation_dominated, iteration_cap };

inline const char* status_str(OreStatus s) {
    switch (s) {
        case OreStatus::certified: return "certified";
        case OreStatus::truncation_dominated: return "truncation-dominated";
        case OreStatus::iteration_cap: return "iteration-cap";
    }
    return "?";
}

struct OreResult {
    SWord t;
    LaurentSeries b;
    int ell = 0;
    OreStatus status = OreStatus::certified;
    std::vector<CertifiedNorm> residual;  // |a t - s b|_i, recomputed
    std::vector<NormValue> target;        // eps |a|_i |t|_i
    std::vector<NormValue> eps_achieved;  // upper bound of residual / (|a|_i |t|_i)
    std::vector<CertifiedNorm> sb_norm;   // |s|_i |b|_i
    std::vector<NormValue> at_norm;       // |a|_i |t|_i
    /// |a t - s b|_i <= eps |a|_i |t|_i for every i, certified.
    bool residual_ok() const {
        for (std::size_t i = 0; i < residual.size(); ++i)
            if (residual[i].upper() > target[i]) return false;
        return true;
    }
    /// |s|_i |b|_i = |a|_i |t|_i for every i, certified.
    bool norms_equal() const {
        for (std::size_t i = 0; i < sb_norm.size(); ++i)
            if (!(sb_norm[i].value == at_norm[i]) || !(sb_norm[i].uncertainty < sb_norm[i].value)) return false;
        return true;
    }
};

/// (t, b) with a t - s b small: a_0 = a, a_n = a_(n-1) s - s a_(n-1) until
/// |a_l|_i <= eps |a|_i |s|_i^l for all i; then t = s^l and
/// b = sum_(j<l) C(l, j) s^(l-j-1) a_j, so that a t - s b = a_l.
inline OreResult ore_approx(const NormedAlgebra& A, const NormValue& eps, const SWord& s, const LaurentSeries& a,
                            int max_iter = 32) {
    if (eps.is_zero()) throw std::invalid_argument("ore_approx needs eps > 0");
    const std::size_t m = A.norms();
    const LaurentSeries sv = A.value(s);
    std::vector<NormValue> an(m);
    for (std::size_t i = 0; i < m; ++i) an[i] = A.norm(i, a).value;

    std::vector<LaurentSeries> chain{a};
    OreResult r;
    int first_stored = 0;
    for (int l = 1; l <= max_iter; ++l) {
        const LaurentSeries& prev = chain.back();
        chain.push_back(A.sub(A.mul(prev, sv), A.mul(sv, prev)));
        const LaurentSeries& cur = chain.back();
        bool stored_ok = true, certified = true;
        for (std::size_t i = 0; i < m; ++i) {
            NormValue target = eps * an[i] * A.norm(i, s).pow(l);
            CertifiedNorm n = A.norm(i, cur);
            if (n.value > target) stored_ok = false;
            if (n.upper() > target) certified = false;
        }
        if (certified) {
            r.ell = l;
            break;
        }
        if (stored_ok && first_stored == 0) first_stored = l;
        if (first_stored > 0 && l >= first_stored + 2) break;
    }
    if (r.ell == 0) {
        r.ell = first_stored > 0 ? first_stored : max_iter;
        r.status = first_stored > 0 ? OreStatus::truncation_dominated : OreStatus::iteration_cap;
    }
    const int l = r.ell;
    r.t = s_power(s, l);

    std::vector<LaurentSeries> spow{A.one()};
    for (int k = 1; k < l; ++k) spow.push_back(A.mul(spow.back(), sv));
    LaurentSeries b = A.zero();
    for (int j = 0; j < l; ++j) {
        PadicScalar c = PadicScalar::from_int(A.p(), binomial(BigInt(l), j), max_precision(A.p()));
        b = add_series(b, scale(c, A.mul(spow[l - j - 1], chain[j])));
    }
    r.b = b;

    LaurentSeries res = A.sub(A.mul(a, A.value(r.t)), A.mul(sv, b));
    for (std::size_t i = 0; i < m; ++i) {
        NormValue tn = A.norm(i, r.t);
        r.at_norm.push_back(an[i] * tn);
        r.target.push_back(eps * an[i] * tn);
        r.residual.push_back(A.norm(i, res));
        r.eps_achieved.push_back(an[i].is_zero() ? NormValue::zero() : r.residual.back().upper() / r.at_norm.back());
        r.sb_norm.push_back(scaled(A.norm(i, b), A.norm(i, s)));
    }
    if (r.status != OreStatus::iteration_cap)
        r.status = r.residual_ok() ? OreStatus::certified : OreStatus::truncation_dominated;
    return r;
}

struct DUpper {
    NormValue bound;                 // >= max_i d_i(x, y)
    std::vector<NormValue> per_norm;  // >= d_i(x, y)
    std::size_t candidates = 0;
};

/// Upper bound on max_i d_i(x, y): for every candidate xi, max(Delta_i(x, xi),
/// Delta_i(y, xi)) bounds d_i. Candidates are x, y and the Ore pairs (t, b) of
/// x and y for eps = p^-1, p^-2, ... up to the budget; for x = (s, a) such a
/// pair has Delta_i(x, (t, b)) <= eps |a|_i / |s|_i.
inline DUpper d_upper(const NormedAlgebra& A, const Fraction& x, const Fraction& y, int budget = 8) {
    std::vector<Fraction> cand{x, y};
    for (int k = 1; static_cast<int>(cand.size()) < budget; ++k) {
        NormValue eps = NormValue::from_exponent(Rational(k));
        for (const Fraction* z : {&x, &y}) {
            if (static_cast<int>(cand.size()) >= budget) break;
            OreResult o = ore_approx(A, eps, z->s, z->a);
            cand.push_back({o.t, o.b});
        }
        if (k > 64) break;
    }
    DUpper r;
    r.candidates = cand.size();
    for (std::size_t i = 0; i < A.norms(); ++i) {
        NormValue best;
        bool first = true;
        for (const auto& xi : cand) {
            NormValue v = max(delta(A, i, x, xi).upper(), delta(A, i, y, xi).upper());
            if (first || v < best) best = v;
            first = false;
        }
        r.per_norm.push_back(best);
        r.bound = i == 0 ? best : max(r.bound, best);
    }
    return r;
}

struct PermutationCheck {
    bool ok = false;
    CertifiedNorm product;
    CertifiedNorm permuted;
    CertifiedNorm difference;
};

/// |e_1...e_n - e_s(1)...e_s(n)| <= gamma |e_1...e_n| and equal norms of the
/// two products, in norm i.
inline PermutationCheck permutation_bound_check(const NormedAlgebra& A, const std::vector<LaurentSeries>& e,
                                                const std::vector<int>& sigma, std::size_t i) {
    if (e.empty() || sigma.size() != e.size()) throw std::invalid_argument("permutation of wrong length");
    std::vector<int> sorted = sigma;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t k = 0; k < sorted.size(); ++k)
        if (sorted[k] != static_cast<int>(k)) throw std::invalid_argument("not a permutation");
    LaurentSeries x = e[0], y = e[sigma[0]];
    for (std::size_t k = 1; k < e.size(); ++k) {
        x = A.mul(x, e[k]);
        y = A.mul(y, e[sigma[k]]);
    }
    PermutationCheck r;
    r.product = A.norm(i, x);
    r.permuted = A.norm(i, y);
    r.difference = A.norm(i, A.sub(x, y));
    r.ok = r.difference.upper() <= A.gamma() * r.product.value && r.product.certified() && r.permuted.certified() &&
           r.product.value == r.permuted.value;
    return r;
}

struct QaEstimate {
    NormValue gamma_hat;        // max |xy - yx| / |xy| over stored norms
    NormValue certified_bound;  // same with |xy - yx| replaced by its upper bound
    std::size_t worst = 0;
    std::size_t evaluated = 0;
};

/// Empirical quasi-abelian constant at radius rho.
inline QaEstimate qa_gamma_estimate(const Multiplier& m, const RadiusExponent& rho,
                                    const std::vector<std::pair<LaurentSeries, LaurentSeries>>& samples) {
    QaEstimate r;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& [x, y] = samples[k];
        LaurentSeries xy = m.series_product(x, y), yx = m.series_product(y, x);
        CertifiedNorm n = xy.certified_norm(rho.value());
        if (n.value.is_zero()) continue;
        CertifiedNorm c = sub_series(xy, yx).certified_norm(rho.value());
        NormValue g = c.value / n.value, gb = c.upper() / n.value;
        if (r.evaluated == 0 || g > r.gamma_hat) {
            r.gamma_hat = g;
            r.worst = k;
        }
        r.certified_bound = r.evaluated == 0 ? gb : max(r.certified_bound, gb);
        ++r.evaluated;
        if (!(g < NormValue::one()))
            throw QuasiAbelianViolation("|xy - yx| >= |xy| for sample " + std::to_string(k) + ": x = " + x.str() +
                                        ", y = " + y.str());
    }
    return r;
}

}  // namespace robba
