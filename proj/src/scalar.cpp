#include "ultra/scalar.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace ultra {

namespace {

BigInt pow10(long n) {
    BigInt r = 1;
    for (long i = 0; i < n; ++i) r *= 10;
    return r;
}

// Exact decimal or integer literal with optional exponent.
Rational parse_decimal(const std::string& t) {
    std::size_t i = 0;
    bool neg = false;
    if (i < t.size() && (t[i] == '+' || t[i] == '-')) neg = t[i++] == '-';
    BigInt digits = 0;
    long frac = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < t.size(); ++i) {
        char c = t[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = digits * 10 + (c - '0');
            seen_digit = true;
            if (seen_dot) ++frac;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw std::invalid_argument("not a number: '" + t + "'");
    long exp10 = 0;
    if (i < t.size() && (t[i] == 'e' || t[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < t.size() && (t[i] == '+' || t[i] == '-')) eneg = t[i++] == '-';
        if (i >= t.size()) throw std::invalid_argument("not a number: '" + t + "'");
        long e = 0;
        for (; i < t.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(t[i])))
                throw std::invalid_argument("not a number: '" + t + "'");
            e = e * 10 + (t[i] - '0');
            if (e > 4000) throw std::invalid_argument("exponent out of range: '" + t + "'");
        }
        exp10 = eneg ? -e : e;
    }
    if (i != t.size()) throw std::invalid_argument("not a number: '" + t + "'");
    long shift = exp10 - frac;
    Rational q = shift >= 0 ? Rational(digits * pow10(shift)) : Rational(digits, pow10(-shift));
    return neg ? Rational(-q) : q;
}

// Integer k-th root if n is a perfect k-th power.
bool exact_root(const BigInt& n, unsigned k, BigInt& out) {
    if (n < 0) return false;
    if (n == 0 || n == 1 || k == 1) {
        out = n;
        return true;
    }
    double approx = std::pow(n.convert_to<double>(), 1.0 / k);
    if (!std::isfinite(approx)) return false;
    BigInt guess = static_cast<BigInt>(std::llround(approx));
    for (int delta = -2; delta <= 2; ++delta) {
        BigInt c = guess + delta;
        if (c < 0) continue;
        if (boost::multiprecision::pow(c, k) == n) {
            out = c;
            return true;
        }
    }
    return false;
}

}  // namespace

Scalar Scalar::floating(double d) {
    Scalar s;
    s.exact_ = false;
    s.d_ = d;
    return s;
}

Scalar Scalar::parse(const std::string& text) {
    std::string t;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    auto slash = t.find('/');
    if (slash == std::string::npos) return Scalar(parse_decimal(t));
    Rational num = parse_decimal(t.substr(0, slash));
    Rational den = parse_decimal(t.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator: '" + text + "'");
    return Scalar(Rational(num / den));
}

double Scalar::to_double() const { return exact_ ? q_.convert_to<double>() : d_; }

int Scalar::sign() const {
    if (exact_) return q_ < 0 ? -1 : (q_ > 0 ? 1 : 0);
    if (std::fabs(d_) <= kFloatTolerance) return 0;
    return d_ < 0 ? -1 : 1;
}

std::string Scalar::str() const {
    if (exact_) {
        if (denominator(q_) == 1) return numerator(q_).str();
        return numerator(q_).str() + "/" + denominator(q_).str();
    }
    return decimal();
}

std::string Scalar::decimal() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", to_double());
    return buf;
}

Scalar Scalar::operator-() const {
    Scalar r = *this;
    if (exact_)
        r.q_ = -q_;
    else
        r.d_ = -d_;
    return r;
}

Scalar& Scalar::operator+=(const Scalar& o) {
    if (exact_ && o.exact_) {
        q_ += o.q_;
    } else {
        d_ = to_double() + o.to_double();
        exact_ = false;
    }
    return *this;
}

Scalar& Scalar::operator-=(const Scalar& o) { return *this += -o; }

Scalar& Scalar::operator*=(const Scalar& o) {
    if (exact_ && o.exact_) {
        q_ *= o.q_;
    } else {
        d_ = to_double() * o.to_double();
        exact_ = false;
    }
    return *this;
}

Scalar& Scalar::operator/=(const Scalar& o) {
    if (o.exact_ && o.q_ == 0) throw std::domain_error("division by zero");
    if (exact_ && o.exact_) {
        q_ /= o.q_;
    } else {
        d_ = to_double() / o.to_double();
        exact_ = false;
    }
    return *this;
}

Scalar abs(const Scalar& s) { return s.sign() < 0 ? -s : s; }

Scalar inverse_power(const Scalar& base, const Scalar& exponent) {
    if (base.sign() <= 0) throw std::domain_error("inverse_power needs a positive base");
    if (exponent.sign() < 0) throw std::domain_error("inverse_power needs a nonnegative exponent");
    if (exponent.is_zero()) return Scalar(1);
    if (base.exact() && exponent.exact()) {
        const Rational& x = exponent.rational();
        BigInt a = numerator(x), b = denominator(x);
        if (a <= 4096 && b <= 64) {
            unsigned k = b.convert_to<unsigned>();
            BigInt p, q;
            if (exact_root(numerator(base.rational()), k, p) &&
                exact_root(denominator(base.rational()), k, q)) {
                unsigned e = a.convert_to<unsigned>();
                return Scalar(Rational(boost::multiprecision::pow(q, e), boost::multiprecision::pow(p, e)));
            }
        }
    }
    return Scalar::floating(std::pow(base.to_double(), -exponent.to_double()));
}

}  // namespace ultra
