#include "bellrv/rational.hpp"

#include <limits>
#include <stdexcept>

namespace bellrv {

namespace {

wide_int gcd128(wide_int a, wide_int b)
{
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        const wide_int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

bool fits64(wide_int v)
{
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d)
{
    if (d == 0) {
        throw std::domain_error("rational with zero denominator");
    }
    *this = from_wide(n, d);
}

Rational Rational::from_wide(wide_int n, wide_int d)
{
    if (d < 0) {
        n = -n;
        d = -d;
    }
    const wide_int g = gcd128(n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    if (n == 0) {
        d = 1;
    }
    if (!fits64(n) || !fits64(d)) {
        throw std::overflow_error("rational overflow");
    }
    Rational r;
    r.num_ = static_cast<std::int64_t>(n);
    r.den_ = static_cast<std::int64_t>(d);
    return r;
}

std::string Rational::str() const
{
    return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const
{
    return from_wide(-static_cast<wide_int>(num_), den_);
}

Rational& Rational::operator+=(const Rational& o)
{
    const wide_int n = static_cast<wide_int>(num_) * o.den_ + static_cast<wide_int>(o.num_) * den_;
    const wide_int d = static_cast<wide_int>(den_) * o.den_;
    return *this = from_wide(n, d);
}

Rational& Rational::operator*=(const Rational& o)
{
    return *this = from_wide(static_cast<wide_int>(num_) * o.num_, static_cast<wide_int>(den_) * o.den_);
}

Rational& Rational::operator/=(const Rational& o)
{
    if (o.num_ == 0) {
        throw std::domain_error("rational division by zero");
    }
    return *this = from_wide(static_cast<wide_int>(num_) * o.den_, static_cast<wide_int>(den_) * o.num_);
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b)
{
    return static_cast<wide_int>(a.num_) * b.den_ <=> static_cast<wide_int>(b.num_) * a.den_;
}

Dyadic::Dyadic(std::int64_t num, int exp) : num_(num), exp_(exp)
{
    if (exp < 0 || exp > 62) {
        throw std::domain_error("dyadic exponent must lie in [0, 62]");
    }
    if (num_ == 0) {
        exp_ = 0;
    }
    while (exp_ > 0 && num_ % 2 == 0) {
        num_ /= 2;
        --exp_;
    }
}

Rational Dyadic::to_rational() const
{
    return {num_, std::int64_t{1} << exp_};
}

double Dyadic::to_double() const
{
    return static_cast<double>(num_) / static_cast<double>(std::int64_t{1} << exp_);
}

}  // namespace bellrv
