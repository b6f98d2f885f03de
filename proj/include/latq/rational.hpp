#pragma once
// Exact rationals (GMP) and a few helpers used across the library.

#include <gmpxx.h>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace latq {

using Rational = mpq_class;
using Integer = mpz_class;

// Accepts "p", "p/q" and finite decimals such as "-1.25" or "3e-2". Always canonical.
Rational parse_rational(std::string_view s);
std::string to_string(const Rational& q);
// p/q in canonical form; the two-argument mpq_class constructor does not reduce.
inline Rational ratio(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}
inline double to_double(const Rational& q) { return q.get_d(); }

std::size_t hash_value(const Rational& q);
std::size_t hash_value(const Integer& z);

bool is_integer(const Rational& q);
Rational pow(const Rational& q, int e);

// Exact k-th root when q is a perfect k-th power of a rational.
std::optional<Rational> exact_root(const Rational& q, unsigned k);

// z = r^2 * s with s free of small square factors (trial division up to `bound`,
// then a perfect-square test on the cofactor).
struct SquareSplit {
  Integer r;
  Integer s;
};
SquareSplit split_square(const Integer& z, unsigned long bound = 100000);

// Rational with the smallest denominator in [lo, hi] (continued fractions).
Rational simplest_between(const Rational& lo, const Rational& hi);

}  // namespace latq
