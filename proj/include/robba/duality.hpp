#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "laurent.hpp"
#include "padic.hpp"
#include "rewriter.hpp"

namespace robba {

/// Constant term of a raw expansion, cut to the digits its ledger allows.
inline PadicScalar certified_constant(const MonomialExpansion& ex, int p, int d) {
    const Monomial zero(d, 0);
    PadicScalar c = PadicScalar::zero(p);
    for (const auto& [g, a] : ex.terms)
        if (g == zero) c = a;
    return c.reduced_to(ex.ledger.coefficient_floor(0));
}

/// (x, y): the constant term of x y.
inline PadicScalar pairing(const Multiplier& m, const LaurentSeries& x, const LaurentSeries& y) {
    LaurentSeries xy = m.series_product(x, y);
    return xy.certified_coefficient(Monomial(x.dim(), 0));
}

/// (b^a, b^b) known mod p^T (T is the constant term's threshold).
inline PadicScalar monomial_pairing(const Multiplier& m, const Monomial& a, const Monomial& b, const Rational& T) {
    auto ex = m.expansion(a, b, T);
    return certified_constant(*ex, m.policy().p, m.dim()).with_relative_precision(m.policy().N);
}

/// Memoised (b^eta, b^beta) at a fixed number of digits.
class PairingTable {
public:
    PairingTable(const Multiplier& m, int digits) : m_(m), digits_(digits) {}

    int digits() const { return digits_; }
    const Multiplier& multiplier() const { return m_; }

    const PadicScalar& operator()(const Monomial& eta, const Monomial& beta) {
        auto k = std::make_pair(eta, beta);
        auto it = table_.find(k);
        if (it != table_.end()) return it->second;
        PadicScalar v = monomial_pairing(m_, eta, beta, Rational(digits_ + 1)).reduced_to(digits_ + 1);
        return table_.emplace(std::move(k), v).first->second;
    }

private:
    const Multiplier& m_;
    int digits_;
    std::map<std::pair<Monomial, Monomial>, PadicScalar> table_;
};

enum class DualStatus { converged, window_exhausted };

inline const char* status_str(DualStatus s) { return s == DualStatus::converged ? "converged" : "window-exhausted"; }

struct DualBasisElement {
    Monomial alpha;
    LaurentSeries series;
    int achieved = 0;       // defect <= p^-achieved on every grid point
    int target = 0;
    DualStatus status = DualStatus::converged;
    std::vector<Monomial> grid;
    std::vector<Monomial> skipped;  // grid points whose correction left the window
    int corrections = 0;
    /// Defect valuation per grid point, in grid order (kInfinite if zero).
    std::vector<int> defects;
};

/// All b with |b_i| <= cap and lo <= deg b <= hi.
inline std::vector<Monomial> monomial_grid(int d, int cap, int lo, int hi) {
    std::vector<Monomial> r;
    Monomial a(d, -cap);
    for (;;) {
        int deg = degree(a);
        if (deg >= lo && deg <= hi) r.push_back(a);
        int i = d - 1;
        while (i >= 0 && a[i] == cap) a[i--] = -cap;
        if (i < 0) break;
        ++a[i];
    }
    return r;
}

/// Iterative correction of b^-a towards the dual element f^(a). Stage n sweeps
/// the grid by descending degree (then lexicographically) and removes every
/// defect of valuation < n at g by subtracting defect / (b^-g, b^g) times
/// b^-g. Corrections update the defect vector in place.
inline DualBasisElement dual_basis(PairingTable& P, const Monomial& alpha, std::vector<Monomial> grid, int target) {
    const Multiplier& m = P.multiplier();
    const TruncationPolicy& pol = m.policy();
    const int p = pol.p, d = m.dim();
    if (static_cast<int>(alpha.size()) != d) throw std::invalid_argument("index of wrong dimension");
    if (!pol.representable(-alpha)) throw std::invalid_argument("b^-alpha is outside the truncation window");
    if (target > P.digits()) throw std::invalid_argument("pairing table has too few digits for the target");
    std::stable_sort(grid.begin(), grid.end(), [](const Monomial& x, const Monomial& y) {
        int dx = degree(x), dy = degree(y);
        if (dx != dy) return dx > dy;
        return x < y;
    });
    const int wide = max_precision(p);
    const PadicScalar one = PadicScalar::one(p, wide);

    DualBasisElement r;
    r.alpha = alpha;
    r.target = target;
    r.grid = grid;
    LaurentSeries::TermMap f{{-alpha, one}};

    std::vector<PadicScalar> defect(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        defect[k] = P(-alpha, grid[k]);
        if (grid[k] == alpha) defect[k] -= one;
    }
    std::vector<bool> skip(grid.size(), false);
    for (int n = 1; n <= target; ++n) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const PadicScalar& e = defect[k];
            if (e.is_zero() || e.valuation() >= n) continue;
            const Monomial eta = -grid[k];
            if (!pol.representable(eta)) {
                skip[k] = true;
                continue;
            }
            const PadicScalar& u = P(eta, grid[k]);
            if (u.is_zero() || u.valuation() != 0)
                throw std::logic_error("(b^-g, b^g) is not a unit for g = " + monomial_str(grid[k]));
            PadicScalar a = e / u;
            auto [it, fresh] = f.emplace(eta, -a);
            if (!fresh) it->second -= a;
            for (std::size_t q = 0; q < grid.size(); ++q) defect[q] -= a * P(eta, grid[q]);
            ++r.corrections;
        }
    }
    r.achieved = target;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const PadicScalar& e = defect[k];
        int v = e.is_exact_zero() ? PadicScalar::kInfinite : e.valuation();
        r.defects.push_back(v);
        if (skip[k]) r.skipped.push_back(grid[k]);
        r.achieved = std::min(r.achieved, std::min(v, P.digits()));
    }
    if (r.achieved < target) r.status = DualStatus::window_exhausted;
    TruncationPolicy out = pol;
    out.T = max(pol.T, Rational(P.digits() + 1) + Rational(std::max(-pol.mlo, pol.mhi)) * pol.eref);
    r.series = LaurentSeries::from_terms(d, out, f);
    return r;
}

/// Membership in L_x0 = { sum d_a b^a : |c_(-a)(x0)| |d_a| <= 1 }.
inline bool lattice_member(const LaurentSeries& x0, const LaurentSeries& x) {
    for (const auto& [a, c] : x.terms()) {
        PadicScalar c0 = x0.coefficient(-a);
        if (c0.is_zero() || c.is_zero()) continue;
        if (c0.valuation() + c.valuation() < 0) return false;
    }
    return true;
}

/// c X0^k X^a in the graded ring, c in F_p (c = 0 is the zero element).
struct GradedMonomial {
    int p = 3;
    int c = 1;
    int x0 = 0;
    Monomial alpha;

    bool is_zero() const { return c == 0; }
    friend bool operator==(const GradedMonomial&, const GradedMonomial&) = default;
};

inline GradedMonomial graded_zero(int p, int d) { return {p, 0, 0, Monomial(d, 0)}; }

/// X^a X^b = 0 when deg a and deg b have strictly opposite signs, else
/// X^(a+b); the F_p[X0^(+-1)] parts multiply.
inline GradedMonomial graded_mul(const GradedMonomial& u, const GradedMonomial& v) {
    if (u.p != v.p || u.alpha.size() != v.alpha.size()) throw std::invalid_argument("incompatible graded monomials");
    const int d = static_cast<int>(u.alpha.size());
    if (u.is_zero() || v.is_zero()) return graded_zero(u.p, d);
    int du = degree(u.alpha), dv = degree(v.alpha);
    if ((du < 0 && dv > 0) || (du > 0 && dv < 0)) return graded_zero(u.p, d);
    int c = (u.c * v.c) % u.p;
    if (c == 0) return graded_zero(u.p, d);
    return {u.p, c, u.x0 + v.x0, u.alpha + v.alpha};
}

inline std::string graded_str(const GradedMonomial& u) {
    if (u.is_zero()) return "0";
    return std::to_string(u.c) + "*X0^" + std::to_string(u.x0) + "*X^(" + monomial_str(u.alpha) + ")";
}

/// (1+Z)^x - 1 = ((1+Z)^(p^m) - 1) u with x = p^m y.
struct UnitDecomposition {
    int m = 0;
    LaurentSeries u;  // one variable, degrees 0..D
};

namespace detail {

/// Truncated product of power series in one variable.
inline std::vector<PadicScalar> poly_mul(const std::vector<PadicScalar>& a, const std::vector<PadicScalar>& b, int D) {
    std::vector<PadicScalar> r(D + 1, PadicScalar::zero(a.empty() ? b[0].p() : a[0].p()));
    for (std::size_t i = 0; i < a.size() && static_cast<int>(i) <= D; ++i)
        for (std::size_t j = 0; j < b.size() && static_cast<int>(i + j) <= D; ++j) r[i + j] += a[i] * b[j];
    return r;
}

}  // namespace detail

/// u = sum_(i>=1) C(y, i) W^(i-1), W = (1+Z)^(p^m) - 1, through degree D.
/// W has no constant term, so C(y, i) for i <= D+1 suffices.
inline UnitDecomposition unit_decompose(const PadicScalar& x, int D, int N) {
    const int p = x.p();
    if (x.is_zero()) throw std::invalid_argument("unit decomposition needs x != 0");
    if (x.valuation() < 0) throw std::domain_error("unit decomposition needs x in Z_p");
    if (D < 0) throw std::invalid_argument("degree bound must be nonnegative");
    UnitDecomposition r;
    r.m = x.valuation();
    const int wide = max_precision(p);
    PadicScalar y = PadicScalar::make(p, 0, x.relative_precision(), x.unit());

    BigInt pm = 1;
    for (int i = 0; i < r.m; ++i) pm *= p;
    std::vector<PadicScalar> W(D + 1, PadicScalar::zero(p));
    for (int k = 1; k <= D; ++k) W[k] = PadicScalar::from_int(p, binomial(pm, k), wide);

    std::vector<PadicScalar> u(D + 1, PadicScalar::zero(p));
    std::vector<PadicScalar> Wpow(D + 1, PadicScalar::zero(p));
    Wpow[0] = PadicScalar::one(p, wide);
    for (int i = 1; i <= D + 1; ++i) {
        PadicScalar c = binomial(y, i, N);
        for (int k = 0; k <= D; ++k) u[k] += c * Wpow[k];
        Wpow = detail::poly_mul(Wpow, W, D);
    }

    TruncationPolicy pol;
    pol.p = p;
    pol.N = N;
    pol.mlo = 0;
    pol.mhi = D;
    pol.A = std::max(D, 1);
    pol.T = Rational(N + D + 1);
    LaurentSeries::TermMap raw;
    for (int k = 0; k <= D; ++k) raw.emplace(Monomial{k}, u[k]);
    ErrorLedger led;
    led.add_outside(D + 1, 0);
    r.u = LaurentSeries::from_terms(1, pol, raw, led);
    return r;
}

}  // namespace robba
