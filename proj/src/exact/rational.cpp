#include "latq/rational.hpp"

#include <cctype>
#include <functional>

#include "latq/error.hpp"

namespace latq {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::FieldMismatch: return "field mismatch";
    case ErrorKind::DivisionByZero: return "division by zero";
    case ErrorKind::DegenerateInput: return "degenerate input";
    case ErrorKind::FitMismatch: return "fit mismatch";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::RankDeficiency: return "rank deficiency";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Resource: return "resource error";
    case ErrorKind::Invariance: return "invariance error";
    case ErrorKind::Faithfulness: return "faithfulness error";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::ClassMismatch: return "class mismatch";
    case ErrorKind::Consistency: return "consistency error";
    case ErrorKind::Structural: return "structural error";
    case ErrorKind::BudgetExceeded: return "budget exceeded";
    case ErrorKind::Dependency: return "dependency error";
    case ErrorKind::Degeneracy: return "degeneracy";
    case ErrorKind::CriticalValueCrossed: return "critical value crossed";
    case ErrorKind::InconsistentSample: return "inconsistent sample";
    case ErrorKind::Basis: return "basis error";
    case ErrorKind::Structure: return "structure error";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::Io: return "i/o error";
  }
  return "error";
}

Rational parse_rational(std::string_view s) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
  if (t.empty()) fail(ErrorKind::Parse, "empty rational");
  auto bad = [&] { fail(ErrorKind::Parse, "bad rational '" + std::string(s) + "'"); };

  auto slash = t.find('/');
  if (slash != std::string::npos) {
    Integer num, den;
    if (num.set_str(t.substr(0, slash), 10) != 0 || den.set_str(t.substr(slash + 1), 10) != 0) bad();
    if (den == 0) fail(ErrorKind::DivisionByZero, "zero denominator in '" + std::string(s) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }

  // decimal with optional exponent
  std::size_t i = 0;
  bool neg = false;
  if (t[i] == '+' || t[i] == '-') neg = t[i++] == '-';
  std::string digits;
  long scale = 0;
  bool seen_dot = false, any = false;
  for (; i < t.size() && t[i] != 'e' && t[i] != 'E'; ++i) {
    if (t[i] == '.') {
      if (seen_dot) bad();
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(t[i]))) {
      digits.push_back(t[i]);
      any = true;
      if (seen_dot) --scale;
    } else {
      bad();
    }
  }
  if (!any) bad();
  if (i < t.size()) {
    std::string ex = t.substr(i + 1);
    if (ex.empty()) bad();
    try {
      std::size_t used = 0;
      scale += std::stol(ex, &used);
      if (used != ex.size()) bad();
    } catch (const std::logic_error&) {
      bad();
    }
  }
  Integer num(digits, 10);
  if (neg) num = -num;
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
  Rational q = scale < 0 ? Rational(num, p) : Rational(num * p);
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }

std::size_t hash_value(const Integer& z) {
  const mpz_srcptr p = z.get_mpz_t();
  std::size_t h = static_cast<std::size_t>(mpz_sgn(p)) * 0x9e3779b97f4a7c15ULL;
  const int n = std::abs(p->_mp_size);
  for (int i = 0; i < n; ++i) h ^= std::hash<mp_limb_t>{}(p->_mp_d[i]) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::size_t hash_value(const Rational& q) {
  std::size_t h = hash_value(q.get_num());
  return h ^ (hash_value(q.get_den()) + 0x517cc1b727220a95ULL + (h << 6) + (h >> 2));
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Rational pow(const Rational& q, int e) {
  if (e < 0) {
    if (q == 0) fail(ErrorKind::DivisionByZero, "zero to a negative power");
    return pow(Rational(1) / q, -e);
  }
  Integer n, d;
  mpz_pow_ui(n.get_mpz_t(), q.get_num_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(d.get_mpz_t(), q.get_den_mpz_t(), static_cast<unsigned long>(e));
  return Rational(n, d);
}

std::optional<Rational> exact_root(const Rational& q, unsigned k) {
  if (k == 0) fail(ErrorKind::Parameter, "zeroth root");
  if (q < 0 && k % 2 == 0) return std::nullopt;
  Integer n = abs(q.get_num()), d = q.get_den(), rn, rd;
  if (!mpz_root(rn.get_mpz_t(), n.get_mpz_t(), k)) return std::nullopt;
  if (!mpz_root(rd.get_mpz_t(), d.get_mpz_t(), k)) return std::nullopt;
  Rational r(q < 0 ? Integer(-rn) : rn, rd);
  r.canonicalize();
  return r;
}

SquareSplit split_square(const Integer& z, unsigned long bound) {
  if (z <= 0) fail(ErrorKind::Domain, "split_square of a non-positive integer");
  Integer rest = z, r = 1, s = 1;
  for (unsigned long p = 2; p <= bound; p += (p == 2 ? 1 : 2)) {
    if (Integer(p) * p > rest) break;
    int e = 0;
    while (mpz_divisible_ui_p(rest.get_mpz_t(), p)) {
      mpz_divexact_ui(rest.get_mpz_t(), rest.get_mpz_t(), p);
      ++e;
    }
    for (int i = 0; i < e / 2; ++i) r *= p;
    if (e % 2) s *= p;
  }
  if (mpz_perfect_square_p(rest.get_mpz_t())) {
    Integer t;
    mpz_sqrt(t.get_mpz_t(), rest.get_mpz_t());
    r *= t;
  } else {
    s *= rest;
  }
  return {r, s};
}

Rational simplest_between(const Rational& lo_in, const Rational& hi_in) {
  Rational lo = lo_in, hi = hi_in;
  if (hi < lo) std::swap(lo, hi);
  if (lo <= 0 && hi >= 0) return 0;
  if (hi < 0) return -simplest_between(-hi, -lo);
  // Stern-Brocot descent via continued fractions.
  Integer fl;
  mpz_fdiv_q(fl.get_mpz_t(), lo.get_num_mpz_t(), lo.get_den_mpz_t());
  if (Rational(fl) == lo) return lo;
  if (Rational(fl + 1) <= hi) return Rational(fl + 1);
  Rational inner = simplest_between(Rational(1) / (hi - fl), Rational(1) / (lo - fl));
  return Rational(fl) + Rational(1) / inner;
}

}  // namespace latq
