#pragma once

// Exact rational arithmetic on 64-bit numerators/denominators. Every
// operation is overflow-checked through 128-bit intermediates and throws
// std::overflow_error rather than silently wrapping.

#include <compare>
#include <cstdint>
#include <ostream>
#include <string>

namespace bellrv {

__extension__ typedef __int128 wide_int;

class Rational {
public:
    constexpr Rational() = default;
    constexpr Rational(std::int64_t n) : num_(n) {}  // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d);

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
    std::string str() const;

    Rational operator-() const;
    Rational& operator+=(const Rational& o);
    Rational& operator-=(const Rational& o) { return *this += -o; }
    Rational& operator*=(const Rational& o);
    Rational& operator/=(const Rational& o);

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);
    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

private:
    static Rational from_wide(wide_int n, wide_int d);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// num / 2^exp in lowest terms (num odd, or num == 0 with exp == 0).
class Dyadic {
public:
    constexpr Dyadic() = default;
    Dyadic(std::int64_t num, int exp);

    std::int64_t num() const { return num_; }
    int exp() const { return exp_; }
    Rational to_rational() const;
    double to_double() const;

    friend bool operator==(const Dyadic& a, const Dyadic& b) = default;
    friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b)
    {
        return a.to_rational() <=> b.to_rational();
    }

private:
    std::int64_t num_ = 0;
    int exp_ = 0;
};

}  // namespace bellrv
