#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace ultra {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Comparison slack used once a value has left exact arithmetic.
inline constexpr double kFloatTolerance = 1e-12;

/**
 * @brief A number that stays an exact rational for as long as possible.
 *
 * Arithmetic between two exact values is exact. As soon as one operand is
 * a floating value the result is floating, and sign tests use
 * kFloatTolerance.
 */
class Scalar {
public:
    Scalar() : exact_(true), q_(0), d_(0.0) {}
    Scalar(long long v) : exact_(true), q_(v), d_(0.0) {}  // NOLINT
    Scalar(int v) : Scalar(static_cast<long long>(v)) {}    // NOLINT
    Scalar(const Rational& q) : exact_(true), q_(q), d_(0.0) {}  // NOLINT

    static Scalar floating(double d);

    /// Parses "3", "-2/3", "0.25", "1e-12". Decimal text is read exactly.
    static Scalar parse(const std::string& text);

    bool exact() const { return exact_; }
    const Rational& rational() const { return q_; }
    double to_double() const;

    /// -1, 0 or 1; floating values within kFloatTolerance of zero give 0.
    int sign() const;
    bool is_zero() const { return sign() == 0; }

    /// "2/3" for exact values, shortest round-trip decimal otherwise.
    std::string str() const;
    /// Decimal rendering regardless of exactness.
    std::string decimal() const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

    friend bool operator==(const Scalar& a, const Scalar& b) { return (a - b).sign() == 0; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }
    friend bool operator<(const Scalar& a, const Scalar& b) { return (a - b).sign() < 0; }
    friend bool operator>(const Scalar& a, const Scalar& b) { return b < a; }
    friend bool operator<=(const Scalar& a, const Scalar& b) { return !(b < a); }
    friend bool operator>=(const Scalar& a, const Scalar& b) { return !(a < b); }

private:
    bool exact_;
    Rational q_;
    double d_;
};

Scalar abs(const Scalar& s);

/**
 * base^(-exponent) for base > 0 and exponent >= 0. Exact whenever the
 * result is rational and can be found by integer roots of numerator and
 * denominator; floating otherwise.
 */
Scalar inverse_power(const Scalar& base, const Scalar& exponent);

}  // namespace ultra
