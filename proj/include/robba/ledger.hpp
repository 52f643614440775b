#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "padic.hpp"
#include "rational.hpp"

namespace robba {

/// Degree -> least valuation among a set of terms. Read as the bound
/// p^(-(v + m e)) on the norm at radius p^(-e), minimised over entries.
using DegreeProfile = std::map<int, int>;

inline void profile_insert(DegreeProfile& prof, int deg, int val) {
    auto [it, fresh] = prof.emplace(deg, val);
    if (!fresh && val < it->second) it->second = val;
}

/// min over entries of v + m e; nullopt for an empty profile.
inline std::optional<Rational> profile_exponent(const DegreeProfile& prof, const Rational& e) {
    std::optional<Rational> best;
    for (auto [m, v] : prof) {
        Rational x = Rational(v) + Rational(m) * e;
        if (!best || x < *best) best = x;
    }
    return best;
}

/// Min-plus product: the profile bounding a product of two elements bounded
/// by a and b.
inline DegreeProfile profile_product(const DegreeProfile& a, const DegreeProfile& b) {
    DegreeProfile r;
    for (auto [m1, v1] : a)
        for (auto [m2, v2] : b) profile_insert(r, m1 + m2, v1 + v2);
    return r;
}

/// Accounting of everything a truncated series does not store. Each entry
/// (m, v) stands for discarded content of norm at most p^(-(v + m e)) at every
/// radius p^(-e), 0 <= e <= 1.
///
/// inside: content that may land on representable monomials (dropped bad
/// words, below-threshold terms, cancelled coefficients, propagated input
/// error). It limits how well stored coefficients are known.
/// outside: canonical monomials beyond the window or cap. They change the
/// element but never a representable coefficient.
class ErrorLedger {
public:
    void add_inside(int deg, int val) { add(inside_, deg, val); }
    void add_outside(int deg, int val) { add(outside_, deg, val); }

    bool empty() const { return inside_.empty() && outside_.empty(); }
    const DegreeProfile& inside() const { return inside_; }
    const DegreeProfile& outside() const { return outside_; }

    DegreeProfile all() const {
        DegreeProfile r = inside_;
        for (auto [m, v] : outside_) profile_insert(r, m, v);
        return r;
    }

    void merge(const ErrorLedger& o) {
        for (auto [m, v] : o.inside_) add_inside(m, v);
        for (auto [m, v] : o.outside_) add_outside(m, v);
    }
    /// Everything in o, shifted, becomes inside content here.
    void absorb_inside(const DegreeProfile& prof, int ddeg = 0, int dval = 0) {
        for (auto [m, v] : prof) add_inside(m + ddeg, v + dval);
    }
    /// o, shifted, keeping its inside/outside split.
    void absorb(const ErrorLedger& o, int ddeg = 0, int dval = 0) { merge(o.shifted(ddeg, dval)); }
    ErrorLedger shifted(int ddeg, int dval) const {
        ErrorLedger r;
        for (auto [m, v] : inside_) r.add_inside(m + ddeg, v + dval);
        for (auto [m, v] : outside_) r.add_outside(m + ddeg, v + dval);
        return r;
    }

    /// Exponent of the bound on all discarded content at radius p^(-e);
    /// nullopt when nothing was discarded.
    std::optional<Rational> exponent_at(const Rational& e) const {
        auto a = profile_exponent(inside_, e), b = profile_exponent(outside_, e);
        if (!a) return b;
        if (!b) return a;
        return min(*a, *b);
    }

    /// Least valuation any inside content can have at a monomial of degree
    /// d: the best of the bounds v + (m - d) e over 0 <= e <= 1, rounded up.
    /// PadicScalar::kInfinite when no inside content exists.
    int coefficient_floor(int d, bool include_outside = false) const {
        DegreeProfile prof = include_outside ? all() : inside_;
        if (prof.empty()) return PadicScalar::kInfinite;
        std::vector<std::pair<int, int>> lines(prof.begin(), prof.end());
        auto g = [&](const Rational& e) {
            Rational best = Rational(lines[0].second) + Rational(lines[0].first - d) * e;
            for (auto [m, v] : lines) best = min(best, Rational(v) + Rational(m - d) * e);
            return best;
        };
        Rational sup = max(g(Rational(0)), g(Rational(1)));
        for (std::size_t i = 0; i < lines.size(); ++i)
            for (std::size_t j = i + 1; j < lines.size(); ++j) {
                int dm = lines[i].first - lines[j].first;
                if (dm == 0) continue;
                Rational e(lines[j].second - lines[i].second, dm);
                if (Rational(0) < e && e < Rational(1)) sup = max(sup, g(e));
            }
        return static_cast<int>(sup.ceil());
    }

    friend bool operator==(const ErrorLedger&, const ErrorLedger&) = default;

private:
    /// Keeps only entries not dominated on [0,1] by another entry.
    static void add(DegreeProfile& prof, int deg, int val) {
        for (auto [m, v] : prof)
            if (v <= val && v + m <= val + deg) return;
        for (auto it = prof.begin(); it != prof.end();) {
            if (val <= it->second && val + deg <= it->second + it->first)
                it = prof.erase(it);
            else
                ++it;
        }
        prof.emplace(deg, val);
    }

    DegreeProfile inside_;
    DegreeProfile outside_;
};

}  // namespace robba
