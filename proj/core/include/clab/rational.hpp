#ifndef CLAB_RATIONAL_HPP
#define CLAB_RATIONAL_HPP

#include <cstdint>
#include <numeric>
#include <string>

#include "clab/errors.hpp"

namespace clab {

namespace detail {
inline long long checked_narrow(__int128 v, const char* what) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw InternalError(std::string("integer overflow in ") + what);
  return static_cast<long long>(v);
}
} // namespace detail

// Exact rational number, reduced, positive denominator.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d) : num(n), den(d) { reduce(); }
  Rational(long long n) : num(n), den(1) {}

  void reduce() {
    if (den == 0) throw InternalError("rational with zero denominator");
    if (den < 0) { num = -num; den = -den; }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) { num /= g; den /= g; }
    if (num == 0) den = 1;
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    __int128 n = (__int128)a.num * b.den + (__int128)b.num * a.den;
    __int128 d = (__int128)a.den * b.den;
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    return raw(n, d);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + Rational(-b.num, b.den);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    __int128 n = (__int128)a.num * b.num;
    __int128 d = (__int128)a.den * b.den;
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    return raw(n, d);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw InternalError("rational division by zero");
    return a * Rational(b.den, b.num);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return (__int128)a.num * b.den < (__int128)b.num * a.den;
  }
  bool positive() const { return num > 0; }
  bool zero() const { return num == 0; }
  double to_double() const { return double(num) / double(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

private:
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) { __int128 t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }
  static Rational raw(__int128 n, __int128 d) {
    Rational r;
    r.num = detail::checked_narrow(n, "rational arithmetic");
    r.den = detail::checked_narrow(d, "rational arithmetic");
    if (r.num == 0) r.den = 1;
    return r;
  }
};

// Exact element of the circle Q/Z: value num/den mod 1 with 0 <= num < den.
struct CircleValue {
  long long num = 0;
  long long den = 1;

  CircleValue() = default;
  CircleValue(long long n, long long d) {
    if (d <= 0) throw InternalError("circle value with nonpositive denominator");
    n %= d;
    if (n < 0) n += d;
    long long g = std::gcd(n, d);
    num = n / g;
    den = d / g;
    if (num == 0) den = 1;
  }

  friend CircleValue operator+(const CircleValue& a, const CircleValue& b) {
    __int128 d = (__int128)a.den * b.den;
    __int128 n = (__int128)a.num * b.den + (__int128)b.num * a.den;
    n %= d;
    long long dd = detail::checked_narrow(d, "circle addition");
    return CircleValue(detail::checked_narrow(n, "circle addition"), dd);
  }
  friend CircleValue operator-(const CircleValue& a, const CircleValue& b) {
    return a + (-b);
  }
  CircleValue operator-() const { return CircleValue(den - num, den); }
  // integer multiple n*(p/q), exact
  friend CircleValue operator*(long long n, const CircleValue& a) {
    __int128 p = (__int128)n * a.num;
    p %= a.den;
    if (p < 0) p += a.den;
    return CircleValue(detail::checked_narrow(p, "circle scaling"), a.den);
  }
  friend bool operator==(const CircleValue& a, const CircleValue& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const CircleValue& a, const CircleValue& b) { return !(a == b); }
  bool zero() const { return num == 0; }
  double to_double() const { return double(num) / double(den); }
  std::string str() const { return std::to_string(num) + "/" + std::to_string(den); }

  static CircleValue parse(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) throw ParseError("circle value must be p/q: " + s);
    long long p = 0, q = 0;
    try {
      p = std::stoll(s.substr(0, slash));
      q = std::stoll(s.substr(slash + 1));
    } catch (const std::exception&) {
      throw ParseError("bad circle value: " + s);
    }
    if (q <= 0) throw ParseError("bad circle denominator: " + s);
    return CircleValue(p, q);
  }
};

inline Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational(std::stoll(s), 1);
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw ParseError("bad rational: " + s);
  }
}

} // namespace clab

#endif
