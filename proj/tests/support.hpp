#pragma once

// Generators and independent oracles shared by the test programs.

#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include <robba/group.hpp>
#include <robba/laurent.hpp>
#include <robba/padic.hpp>

namespace rt {

using robba::BigInt;
using robba::LaurentSeries;
using robba::Monomial;
using robba::PadicScalar;
using robba::Rational;
using robba::TruncationPolicy;
using Rng = std::mt19937_64;

inline int irand(Rng& g, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); }

inline BigInt ipow(int p, int n) {
    BigInt r = 1;
    for (int i = 0; i < n; ++i) r *= p;
    return r;
}

inline BigInt big_rand(Rng& g, const BigInt& bound) {
    BigInt r = 0;
    BigInt scale = 1;
    while (scale < bound) {
        r = r * BigInt(std::uint64_t{1} << 32) + BigInt(static_cast<std::uint32_t>(g()));
        scale *= BigInt(std::uint64_t{1} << 32);
    }
    return r % bound;
}

/// p^v * u with a random unit u mod p^N.
inline PadicScalar gen_padic(Rng& g, int p, int N, int vlo, int vhi) {
    BigInt mod = ipow(p, N);
    BigInt u;
    do u = big_rand(g, mod);
    while (u % p == 0);
    return PadicScalar::make(p, irand(g, vlo, vhi), N, static_cast<std::uint64_t>(u));
}

inline Monomial gen_monomial(Rng& g, int d, int cap, int lo, int hi) {
    for (;;) {
        Monomial a(d, 0);
        int s = 0;
        for (int& x : a) s += (x = irand(g, -cap, cap));
        if (s >= lo && s <= hi) return a;
    }
}

struct Shape {
    int terms = 3;
    int cap = 2;
    int dlo = -2, dhi = 2;
    int vlo = 0, vhi = 2;
};

inline LaurentSeries gen_series(Rng& g, int d, const TruncationPolicy& pol, const Shape& sh = {}) {
    LaurentSeries::TermMap raw;
    int n = irand(g, 1, sh.terms);
    while (static_cast<int>(raw.size()) < n)
        raw.emplace(gen_monomial(g, d, sh.cap, sh.dlo, sh.dhi), gen_padic(g, pol.p, pol.N, sh.vlo, sh.vhi));
    return LaurentSeries::from_terms(d, pol, raw);
}

/// x(x-1)...(x-k+1)/k!, written out.
inline BigInt choose(const BigInt& x, int k) {
    BigInt num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        num *= x - i;
        den *= i + 1;
    }
    return num / den;
}

/// Heisenberg group as upper unitriangular 3x3 integer matrices with
/// h1 = 1 + p E12, h2 = 1 + E23, h3 = 1 + E13. A point x is
/// h1^x1 h2^x2 h3^x3 = [[1, p x1, p x1 x2 + x3], [0, 1, x2], [0, 0, 1]].
struct HeisMatrix {
    BigInt a, c, b;  // entries (1,2), (1,3), (2,3)
};

inline HeisMatrix heis_point(int p, const std::vector<BigInt>& x) {
    return {p * x[0], p * x[0] * x[1] + x[2], x[1]};
}
inline HeisMatrix operator*(const HeisMatrix& m, const HeisMatrix& n) { return {m.a + n.a, m.c + n.c + m.a * n.b, m.b + n.b}; }
inline std::vector<BigInt> heis_coords(int p, const HeisMatrix& m) {
    BigInt x1 = m.a / p;
    return {x1, m.b, m.c - p * x1 * m.b};
}
inline std::vector<BigInt> heis_law(int p, const std::vector<BigInt>& x, const std::vector<BigInt>& y) {
    return heis_coords(p, heis_point(p, x) * heis_point(p, y));
}

/// Exact coefficients of b^a b^b through degree D for a, b >= 0, computed in
/// the group ring: b^a = prod (h_i - 1)^a_i is a finite signed sum of group
/// elements, each product of group elements is evaluated by the law, and
/// psi(z) = prod (1 + b_i)^z_i is expanded by binomials.
template <class Law>
std::map<Monomial, BigInt> group_ring_product(int d, const Monomial& a, const Monomial& b, int D, Law law) {
    auto points = [&](const Monomial& e) {
        std::vector<std::pair<std::vector<BigInt>, BigInt>> r;
        std::vector<BigInt> k(d, 0);
        std::function<void(int, BigInt)> rec = [&](int i, BigInt c) {
            if (i == d) {
                r.emplace_back(k, c);
                return;
            }
            for (int j = 0; j <= e[i]; ++j) {
                k[i] = j;
                BigInt s = ((e[i] - j) % 2) ? -1 : 1;
                rec(i + 1, c * s * choose(BigInt(e[i]), j));
            }
        };
        rec(0, BigInt(1));
        return r;
    };
    std::map<Monomial, BigInt> out;
    for (const auto& [k, ck] : points(a))
        for (const auto& [l, cl] : points(b)) {
            std::vector<BigInt> z = law(k, l);
            Monomial g(d, 0);
            std::function<void(int, int, BigInt)> rec = [&](int i, int left, BigInt c) {
                if (c == 0) return;
                if (i == d) {
                    out[g] += ck * cl * c;
                    return;
                }
                for (int j = 0; j <= left; ++j) {
                    g[i] = j;
                    rec(i + 1, left - j, c * choose(z[i], j));
                }
                g[i] = 0;
            };
            rec(0, D, BigInt(1));
        }
    for (auto it = out.begin(); it != out.end();) it = it->second == 0 ? out.erase(it) : std::next(it);
    return out;
}

/// The known digits of an integral coefficient agree with an exact integer.
inline bool agrees(const PadicScalar& c, const BigInt& exact) {
    if (c.is_exact_zero()) return exact == 0;
    const int k = c.absolute_precision();
    if (k <= 0) return true;
    BigInt mod = ipow(c.p(), k);
    BigInt e = exact % mod;
    if (e < 0) e += mod;
    return c.residue(k) == e;
}

}  // namespace rt
