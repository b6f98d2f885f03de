#pragma once
// MPFR helpers shared by the decimal reports.

#include <mpfr.h>

#include <sstream>
#include <string>

#include "latq/quadratic.hpp"

namespace latq::detail {

inline mpfr_prec_t bits_for(int digits) { return static_cast<mpfr_prec_t>(digits * 3.33 + 64); }

// Fixed-point rendering with the given number of significant digits.
inline std::string mpfr_string(mpfr_srcptr x, int digits) {
  mpfr_exp_t e;
  char* s = mpfr_get_str(nullptr, &e, 10, static_cast<std::size_t>(digits), x, MPFR_RNDN);
  std::string m(s);
  mpfr_free_str(s);
  bool neg = !m.empty() && m[0] == '-';
  if (neg) m.erase(0, 1);
  std::ostringstream os;
  if (neg) os << '-';
  if (e <= 0) {
    os << "0." << std::string(static_cast<std::size_t>(-e), '0') << m;
  } else if (static_cast<std::size_t>(e) >= m.size()) {
    os << m << std::string(static_cast<std::size_t>(e) - m.size(), '0');
  } else {
    os << m.substr(0, static_cast<std::size_t>(e)) << '.' << m.substr(static_cast<std::size_t>(e));
  }
  return os.str();
}

// x <- value of an exact scalar
inline void mpfr_set_exact(mpfr_ptr x, const ExactScalar& v) {
  QuadraticNumber q = v.as_quadratic();
  mpfr_set_q(x, q.rational_part().get_mpq_t(), MPFR_RNDN);
  if (q.is_rational()) return;
  mpfr_t b;
  mpfr_init2(b, mpfr_get_prec(x));
  mpfr_set_si(b, q.radicand(), MPFR_RNDN);
  mpfr_sqrt(b, b, MPFR_RNDN);
  mpfr_mul_q(b, b, q.irrational_part().get_mpq_t(), MPFR_RNDN);
  mpfr_add(x, x, b, MPFR_RNDN);
  mpfr_clear(b);
}

}  // namespace latq::detail
