#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace robba {

/// Small exact rational with 64-bit numerator and denominator. Every
/// intermediate is formed in 128 bits and overflow is reported, never wrapped.
class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(implicit)
    Rational(std::int64_t n, std::int64_t d) { assign(n, d); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }

    /// Largest integer not exceeding the value.
    std::int64_t floor() const {
        std::int64_t q = num_ / den_;
        if ((num_ % den_) != 0 && num_ < 0) --q;
        return q;
    }
    std::int64_t ceil() const { return -Rational(-num_, den_).floor(); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = static_cast<__int128>(a.num_) * b.den_ + static_cast<__int128>(b.num_) * a.den_;
        __int128 d = static_cast<__int128>(a.den_) * b.den_;
        return from_wide(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return from_wide(static_cast<__int128>(a.num_) * b.num_, static_cast<__int128>(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return from_wide(static_cast<__int128>(a.num_) * b.den_, static_cast<__int128>(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
        __int128 l = static_cast<__int128>(a.num_) * b.den_;
        __int128 r = static_cast<__int128>(b.num_) * a.den_;
        if (l < r) return std::strong_ordering::less;
        if (l > r) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    /// Accepts "a", "-a" or "a/b".
    static Rational parse(std::string_view text) {
        auto slash = text.find('/');
        try {
            if (slash == std::string_view::npos) return Rational(std::stoll(std::string(text)));
            return Rational(std::stoll(std::string(text.substr(0, slash))),
                            std::stoll(std::string(text.substr(slash + 1))));
        } catch (const std::logic_error&) {
            throw std::invalid_argument("malformed rational '" + std::string(text) + "'");
        }
    }

private:
    static Rational from_wide(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 a = n < 0 ? -n : n, b = d;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        if (a > 1) {
            n /= a;
            d /= a;
        }
        constexpr __int128 lim = INT64_MAX;
        if (n > lim || n < -lim || d > lim) throw std::overflow_error("rational overflow");
        Rational r;
        r.num_ = static_cast<std::int64_t>(n);
        r.den_ = static_cast<std::int64_t>(d);
        return r;
    }
    void assign(std::int64_t n, std::int64_t d) { *this = from_wide(n, d); }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

inline Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// A radius rho = p^(-e) with 0 < e < 1, so that 1/p < rho < 1.
class RadiusExponent {
public:
    explicit RadiusExponent(Rational e) : e_(e) {
        if (!(Rational(0) < e_ && e_ < Rational(1)))
            throw std::invalid_argument("radius exponent must satisfy 0 < e < 1, got " + e_.str());
    }
    const Rational& value() const { return e_; }
    friend bool operator==(const RadiusExponent&, const RadiusExponent&) = default;
    /// Larger exponent means smaller radius.
    bool smaller_radius_than(const RadiusExponent& o) const { return o.e_ < e_; }
    std::string str() const { return e_.str(); }

private:
    Rational e_;
};

/// A norm value p^(-exponent), or the zero norm. Comparisons compare the
/// norms themselves, so a larger exponent is a smaller value.
class NormValue {
public:
    NormValue() = default;  // zero
    static NormValue zero() { return {}; }
    static NormValue one() { return from_exponent(Rational(0)); }
    static NormValue from_exponent(Rational e) {
        NormValue n;
        n.exp_ = e;
        return n;
    }

    bool is_zero() const { return !exp_.has_value(); }
    /// The exponent e with norm p^(-e); throws for the zero norm.
    const Rational& exponent() const {
        if (!exp_) throw std::logic_error("zero norm has no finite exponent");
        return *exp_;
    }
    const std::optional<Rational>& maybe_exponent() const { return exp_; }

    friend NormValue operator*(const NormValue& a, const NormValue& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        return from_exponent(*a.exp_ + *b.exp_);
    }
    friend NormValue operator/(const NormValue& a, const NormValue& b) {
        if (b.is_zero()) throw std::domain_error("division by zero norm");
        if (a.is_zero()) return zero();
        return from_exponent(*a.exp_ - *b.exp_);
    }
    NormValue pow(std::int64_t k) const {
        if (is_zero()) return k == 0 ? one() : zero();
        return from_exponent(*exp_ * Rational(k));
    }

    friend bool operator==(const NormValue& a, const NormValue& b) { return a.exp_ == b.exp_; }
    friend std::strong_ordering operator<=>(const NormValue& a, const NormValue& b) {
        if (a.is_zero() || b.is_zero()) {
            if (a.is_zero() && b.is_zero()) return std::strong_ordering::equal;
            return a.is_zero() ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        return *b.exp_ <=> *a.exp_;
    }

    /// "0" or "p^(-e)".
    std::string str() const {
        if (is_zero()) return "0";
        std::ostringstream os;
        os << "p^(" << (-*exp_).str() << ")";
        return os.str();
    }
    /// Exponent text, "inf" for the zero norm.
    std::string exponent_str() const { return is_zero() ? "inf" : exp_->str(); }

private:
    std::optional<Rational> exp_;
};

inline NormValue max(const NormValue& a, const NormValue& b) { return a < b ? b : a; }
inline NormValue min(const NormValue& a, const NormValue& b) { return b < a ? b : a; }

inline std::ostream& operator<<(std::ostream& os, const NormValue& n) { return os << n.str(); }

}  // namespace robba
