#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "laurent.hpp"
#include "padic.hpp"

namespace robba {

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// A nonzero p-adic number p^v u with v in [vlo, vhi] and a random unit.
inline PadicScalar random_padic(Rng& rng, int p, int N, int vlo, int vhi) {
    std::uint64_t mod = detail::ppow(p, N);
    std::uint64_t u;
    do u = std::uniform_int_distribution<std::uint64_t>(1, mod - 1)(rng);
    while (u % static_cast<std::uint64_t>(p) == 0);
    return PadicScalar::make(p, uniform_int(rng, vlo, vhi), N, u);
}

/// Exponent with |a_i| <= cap and degree in [lo, hi] (rejection sampling).
inline Monomial random_monomial(Rng& rng, int d, int cap, int lo, int hi) {
    for (;;) {
        Monomial a(d, 0);
        for (int& x : a) x = uniform_int(rng, -cap, cap);
        int deg = degree(a);
        if (deg >= lo && deg <= hi) return a;
    }
}

struct SeriesShape {
    int max_terms = 3;
    int cap = 2;
    int deg_lo = -2;
    int deg_hi = 2;
    int val_lo = 0;
    int val_hi = 2;
};

/// A random nonzero Laurent polynomial with 1..max_terms terms.
inline LaurentSeries random_series(Rng& rng, int d, const TruncationPolicy& pol, const SeriesShape& sh) {
    LaurentSeries::TermMap raw;
    int n = uniform_int(rng, 1, sh.max_terms);
    while (static_cast<int>(raw.size()) < n)
        raw.emplace(random_monomial(rng, d, sh.cap, sh.deg_lo, sh.deg_hi),
                    random_padic(rng, pol.p, pol.N, sh.val_lo, sh.val_hi));
    return LaurentSeries::from_terms(d, pol, raw);
}

}  // namespace robba
