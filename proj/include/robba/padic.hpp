#pragma once

#include <algorithm>
#include <array>
#include <climits>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace robba {

using BigInt = boost::multiprecision::cpp_int;

struct InsufficientPrecision : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct PrecisionPolicy {
    int p = 3;
    int N = 8;
};

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t q = 2; q * q <= n; ++q)
        if (n % q == 0) return false;
    return true;
}

inline void validate(const PrecisionPolicy& pp) {
    if (pp.p == 2) throw std::invalid_argument("p = 2 is not supported");
    if (!is_prime(pp.p)) throw std::invalid_argument("p must be an odd prime, got " + std::to_string(pp.p));
    if (pp.N < 1) throw std::invalid_argument("precision N must be at least 1");
}

namespace detail {

constexpr std::uint64_t kUnitBound = std::uint64_t{1} << 62;

/// p^n for p^n < 2^62; throws beyond.
inline std::uint64_t ppow(int p, int n) {
    thread_local int cached_p = 0;
    thread_local std::array<std::uint64_t, 63> table{};
    thread_local int top = 0;
    if (p != cached_p) {
        cached_p = 0;
        table[0] = 1;
        top = 0;
        while (top + 1 < 63 && static_cast<unsigned __int128>(table[top]) * p < kUnitBound) {
            table[top + 1] = table[top] * static_cast<std::uint64_t>(p);
            ++top;
        }
        cached_p = p;
    }
    if (n < 0 || n > top) throw std::overflow_error("p^n exceeds the 62-bit unit range");
    return table[n];
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
    __int128 r0 = m, r1 = a % m, s0 = 0, s1 = 1;
    while (r1 != 0) {
        __int128 q = r0 / r1, t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (r0 != 1) throw std::domain_error("not invertible modulo p^n");
    if (s0 < 0) s0 += m;
    return static_cast<std::uint64_t>(s0);
}

inline int vp(const BigInt& n, int p) {
    if (n == 0) throw std::domain_error("valuation of zero");
    BigInt m = n < 0 ? BigInt(-n) : n;
    int v = 0;
    while (m % p == 0) {
        m /= p;
        ++v;
    }
    return v;
}

inline int vp_factorial(std::int64_t i, int p) {
    int v = 0;
    for (std::int64_t q = p; q <= i; q *= p) v += static_cast<int>(i / q);
    return v;
}

}  // namespace detail

/// Largest relative precision representable for p.
inline int max_precision(int p) {
    int n = 0;
    std::uint64_t r = 1;
    while (static_cast<unsigned __int128>(r) * p < detail::kUnitBound) {
        r *= p;
        ++n;
    }
    return n;
}

/// An element of Q_p known to a finite number of digits: p^val * unit with
/// unit known mod p^prec. Zero comes in two kinds: the exact zero, and an
/// inexact zero O(p^k) whose true value is only known to lie in p^k Z_p.
class PadicScalar {
public:
    static constexpr int kInfinite = INT_MAX / 4;

    PadicScalar() = default;

    static PadicScalar zero(int p) {
        PadicScalar z;
        z.p_ = p;
        z.val_ = kInfinite;
        return z;
    }
    static PadicScalar inexact_zero(int p, int abs_prec) {
        PadicScalar z;
        z.p_ = p;
        z.val_ = abs_prec;
        z.prec_ = 0;
        return z;
    }
    /// p^val * unit with unit reduced mod p^prec; unit must be prime to p.
    static PadicScalar make(int p, int val, int prec, std::uint64_t unit) {
        if (prec < 1) return inexact_zero(p, val);
        if (unit % static_cast<std::uint64_t>(p) == 0) throw std::invalid_argument("unit part divisible by p");
        PadicScalar x;
        x.p_ = p;
        x.val_ = val;
        x.prec_ = prec;
        x.unit_ = unit % detail::ppow(p, prec);
        return x;
    }
    static PadicScalar from_int(int p, const BigInt& n, int prec) {
        if (n == 0) return zero(p);
        int v = detail::vp(n, p);
        BigInt m = n;
        for (int i = 0; i < v; ++i) m /= p;
        BigInt mod = BigInt(detail::ppow(p, prec));
        BigInt r = m % mod;
        if (r < 0) r += mod;
        return make(p, v, prec, static_cast<std::uint64_t>(r));
    }
    static PadicScalar from_int(int p, std::int64_t n, int prec) { return from_int(p, BigInt(n), prec); }
    static PadicScalar one(int p, int prec) { return make(p, 0, prec, 1); }

    int p() const { return p_; }
    bool is_exact_zero() const { return val_ == kInfinite; }
    /// True for both kinds of zero.
    bool is_zero() const { return prec_ == 0; }
    /// Valuation; for an inexact zero this is the known lower bound.
    int valuation() const { return val_; }
    int relative_precision() const { return prec_; }
    int absolute_precision() const { return is_exact_zero() ? kInfinite : val_ + prec_; }
    std::uint64_t unit() const { return unit_; }

    /// Drops digits so that the absolute precision is at most k.
    PadicScalar reduced_to(int k) const {
        if (k >= absolute_precision()) return *this;
        if (is_zero() || k <= val_) return inexact_zero(p_, is_exact_zero() ? k : std::min(k, val_ + prec_));
        return make(p_, val_, k - val_, unit_);
    }
    /// Keeps at most n digits of the unit.
    PadicScalar with_relative_precision(int n) const {
        if (is_zero() || n >= prec_) return *this;
        return make(p_, val_, n, unit_);
    }

    friend PadicScalar operator+(const PadicScalar& x, const PadicScalar& y) {
        check_same(x, y);
        if (x.is_exact_zero()) return y;
        if (y.is_exact_zero()) return x;
        const int A = std::min(x.absolute_precision(), y.absolute_precision());
        const int v = std::min(x.val_, y.val_);
        if (v >= A) return inexact_zero(x.p_, A);
        const std::uint64_t mod = detail::ppow(x.p_, A - v);
        auto lift = [&](const PadicScalar& z) -> std::uint64_t {
            if (z.is_zero() || z.val_ >= A) return 0;
            return detail::mulmod(z.unit_ % mod, detail::ppow(z.p_, z.val_ - v), mod);
        };
        std::uint64_t s = lift(x) + lift(y);
        if (s >= mod) s -= mod;
        if (s == 0) return inexact_zero(x.p_, A);
        int k = 0;
        const auto pp = static_cast<std::uint64_t>(x.p_);
        while (s % pp == 0) {
            s /= pp;
            ++k;
        }
        return make(x.p_, v + k, A - v - k, s);
    }
    PadicScalar operator-() const {
        if (is_zero()) return *this;
        const std::uint64_t mod = detail::ppow(p_, prec_);
        return make(p_, val_, prec_, mod - unit_);
    }
    friend PadicScalar operator-(const PadicScalar& x, const PadicScalar& y) { return x + (-y); }

    friend PadicScalar operator*(const PadicScalar& x, const PadicScalar& y) {
        check_same(x, y);
        if (x.is_exact_zero() || y.is_exact_zero()) return zero(x.p_);
        if (x.is_zero() || y.is_zero()) {
            // O(p^a) * p^v u = O(p^(a+v)); both inexact gives O(p^(a+b)).
            return inexact_zero(x.p_, x.val_ + y.val_);
        }
        const int n = std::min(x.prec_, y.prec_);
        const std::uint64_t mod = detail::ppow(x.p_, n);
        return make(x.p_, x.val_ + y.val_, n, detail::mulmod(x.unit_ % mod, y.unit_ % mod, mod));
    }
    PadicScalar inverse() const {
        if (is_zero()) throw std::domain_error("inverse of a p-adic zero");
        return make(p_, -val_, prec_, detail::invmod(unit_, detail::ppow(p_, prec_)));
    }
    friend PadicScalar operator/(const PadicScalar& x, const PadicScalar& y) { return x * y.inverse(); }

    PadicScalar& operator+=(const PadicScalar& o) { return *this = *this + o; }
    PadicScalar& operator-=(const PadicScalar& o) { return *this = *this - o; }
    PadicScalar& operator*=(const PadicScalar& o) { return *this = *this * o; }

    /// Structural equality: same representation, including precision.
    friend bool operator==(const PadicScalar& x, const PadicScalar& y) {
        return x.p_ == y.p_ && x.val_ == y.val_ && x.prec_ == y.prec_ && x.unit_ == y.unit_;
    }

    /// x - y is divisible by p^k (as far as either operand is known).
    bool congruent(const PadicScalar& y, int k) const {
        PadicScalar d = *this - y;
        return d.valuation() >= std::min(k, d.absolute_precision());
    }

    /// The integer representative in [0, p^k) of a value with valuation >= 0.
    BigInt residue(int k) const {
        if (is_zero() || val_ >= k) return 0;
        if (val_ < 0) throw std::domain_error("residue of a non-integral p-adic number");
        BigInt mod = 1;
        for (int i = 0; i < k; ++i) mod *= p_;
        BigInt r = BigInt(unit_);
        for (int i = 0; i < val_; ++i) r *= p_;
        return r % mod;
    }

    /// "0", "O(p^k)" or "p^v*u".
    std::string str() const {
        if (is_exact_zero()) return "0";
        if (is_zero()) return "O(p^" + std::to_string(val_) + ")";
        return "p^" + std::to_string(val_) + "*" + std::to_string(unit_);
    }

private:
    static void check_same(const PadicScalar& x, const PadicScalar& y) {
        if (x.p_ != y.p_) throw std::invalid_argument("p-adic operands with different primes");
    }

    int p_ = 3;
    int val_ = kInfinite;
    int prec_ = 0;
    std::uint64_t unit_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const PadicScalar& x) { return os << x.str(); }

/// Parses "0", "O(p^k)", "p^v*u" or a plain integer.
inline PadicScalar parse_padic(const std::string& text, int p, int prec) {
    try {
        if (text == "0") return PadicScalar::zero(p);
        if (text.rfind("O(p^", 0) == 0 && text.back() == ')')
            return PadicScalar::inexact_zero(p, std::stoi(text.substr(4, text.size() - 5)));
        if (text.rfind("p^", 0) == 0) {
            auto star = text.find('*');
            if (star == std::string::npos) return PadicScalar::from_int(p, 1, prec) * PadicScalar::make(p, std::stoi(text.substr(2)), prec, 1);
            int v = std::stoi(text.substr(2, star - 2));
            BigInt u(text.substr(star + 1));
            PadicScalar r = PadicScalar::from_int(p, u, prec);
            return r * PadicScalar::make(p, v, prec, 1);
        }
        return PadicScalar::from_int(p, BigInt(text), prec);
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument("malformed p-adic literal '" + text + "'");
    }
}

/// Exact C(x, i) for an integer x (negative x allowed).
inline BigInt binomial(const BigInt& x, int i) {
    if (i < 0) return 0;
    BigInt num = 1, den = 1;
    for (int k = 0; k < i; ++k) {
        num *= x - k;
        den *= k + 1;
    }
    return num / den;
}

/// C(x, i) for x in Z_p, correct mod p^N. Each factor x - k is formed with
/// the precision of x, so the digits lost to i! are tracked rather than
/// assumed; if fewer than N digits survive this reports InsufficientPrecision.
inline PadicScalar binomial(const PadicScalar& x, int i, int N) {
    const int p = x.p();
    if (i < 0) throw std::invalid_argument("binomial index must be nonnegative");
    if (!x.is_zero() && x.valuation() < 0) throw std::domain_error("binomial needs x in Z_p");
    const int wide = max_precision(p);
    if (i == 0) return PadicScalar::one(p, N);
    if (x.is_exact_zero()) return PadicScalar::zero(p);
    PadicScalar num = PadicScalar::one(p, wide);
    for (int k = 0; k < i; ++k) num *= x - PadicScalar::from_int(p, k, wide);
    BigInt fact = 1;
    for (int k = 2; k <= i; ++k) fact *= k;
    PadicScalar r = num.is_zero() ? PadicScalar::inexact_zero(p, num.valuation() - detail::vp_factorial(i, p))
                                  : num / PadicScalar::from_int(p, fact, wide);
    if (r.absolute_precision() < N)
        throw InsufficientPrecision("binomial(x, " + std::to_string(i) + ") known only mod p^" +
                                    std::to_string(r.absolute_precision()) + ", need p^" + std::to_string(N));
    return r.with_relative_precision(N);
}

/// Guard digits needed on x so that binomial(x, i) survives to N digits.
inline int binomial_guard(int N, int i, int p) { return N + i / (p - 1); }

}  // namespace robba
