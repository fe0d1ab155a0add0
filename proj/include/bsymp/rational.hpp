#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <string>

#include "bsymp/errors.hpp"

namespace bsymp {

// Exact rational arithmetic on arbitrary-precision integers. Exponent
// identities such as (2-3a)/(2+a) must hold exactly for rational a, so no
// operation in the symbolic layer is allowed to round.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline BigInt denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline bool is_integer(const Rational& q) { return denominator(q) == 1; }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline long long to_long(const Rational& q) {
  if (!is_integer(q)) throw Error("to_long: not an integer: " + q.str());
  return numerator(q).convert_to<long long>();
}

// boost 1.74's rational adaptor rejects negative denominators outright for
// unbounded integers, so every two-component construction goes through here.
inline Rational make_rational(BigInt num, BigInt den) {
  if (den == 0) throw DomainError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rational(num, den);
}

inline Rational rational(long long num, long long den = 1) {
  return make_rational(BigInt(num), BigInt(den));
}

// q^e for integer e (exact; q != 0 when e < 0).
inline Rational rat_pow(const Rational& q, long long e) {
  if (e == 0) return Rational(1);
  if (q == 0) {
    if (e < 0) throw DomainError("rat_pow: zero base with negative exponent");
    return Rational(0);
  }
  const auto ue = static_cast<unsigned>(e < 0 ? -e : e);
  BigInt n = boost::multiprecision::pow(numerator(q), ue);
  BigInt d = boost::multiprecision::pow(denominator(q), ue);
  return e > 0 ? make_rational(n, d) : make_rational(d, n);
}

// Exact k-th root of a nonnegative integer, if it is a perfect power.
inline std::optional<BigInt> int_nth_root(const BigInt& n, unsigned k) {
  if (n < 0 || k == 0) return std::nullopt;
  if (n == 0 || n == 1 || k == 1) return n;
  // bisection on [1, n]
  BigInt lo = 1, hi = n;
  while (lo <= hi) {
    BigInt mid = (lo + hi) / 2;
    BigInt p = boost::multiprecision::pow(mid, k);
    if (p == n) return mid;
    if (p < n)
      lo = mid + 1;
    else
      hi = mid - 1;
  }
  return std::nullopt;
}

// q^(num/den) when the result is again rational; nullopt otherwise.
// Positive base required unless the exponent is an integer.
inline std::optional<Rational> rat_pow_exact(const Rational& q, const Rational& e) {
  if (is_integer(e)) return rat_pow(q, to_long(e));
  if (q <= 0) return std::nullopt;
  const unsigned k = denominator(e).convert_to<unsigned>();
  auto rn = int_nth_root(numerator(q), k);
  auto rd = int_nth_root(denominator(q), k);
  if (!rn || !rd) return std::nullopt;
  return rat_pow(Rational(*rn, *rd), numerator(e).convert_to<long long>());
}

// Renders "p" for integers, "p/q" otherwise.
inline std::string rat_str(const Rational& q) {
  if (is_integer(q)) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

inline int rat_cmp(const Rational& a, const Rational& b) {
  if (a < b) return -1;
  if (b < a) return 1;
  return 0;
}

}  // namespace bsymp
