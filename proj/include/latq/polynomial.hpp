#pragma once
// Laurent polynomials in one parameter, dense polynomials for root work, Sturm
// sequences and rational root isolation.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "latq/quadratic.hpp"

namespace latq {

// sum_k c_k a^k over a finite set of integer exponents k.
class ParamPolynomial {
 public:
  ParamPolynomial() = default;
  explicit ParamPolynomial(std::map<int, ExactScalar> c);

  const std::map<int, ExactScalar>& coefficients() const { return c_; }
  ExactScalar coefficient(int k) const;
  bool is_zero() const { return c_.empty(); }
  int min_exponent() const;
  int max_exponent() const;

  ExactScalar evaluate(const Rational& a) const;
  double evaluate(double a) const;
  ParamPolynomial derivative() const;
  ParamPolynomial shifted(int k) const;  // times a^k

  ParamPolynomial& operator+=(const ParamPolynomial& o);
  ParamPolynomial& operator-=(const ParamPolynomial& o);
  ParamPolynomial& operator*=(const ExactScalar& s);
  friend ParamPolynomial operator+(ParamPolynomial a, const ParamPolynomial& b) { return a += b; }
  friend ParamPolynomial operator-(ParamPolynomial a, const ParamPolynomial& b) { return a -= b; }
  friend ParamPolynomial operator*(ParamPolynomial a, const ExactScalar& s) { return a *= s; }
  friend bool operator==(const ParamPolynomial& a, const ParamPolynomial& b) { return a.c_ == b.c_; }

 private:
  void trim();
  std::map<int, ExactScalar> c_;
};

// Exact least-degree interpolation on the given exponent basis, then exact
// verification on every sample. Throws FitMismatch when a sample disagrees and
// DegenerateInput when the samples do not determine the coefficients.
ParamPolynomial laurent_fit(const std::vector<std::pair<Rational, ExactScalar>>& samples, const std::vector<int>& basis);

// Dense polynomial, coefficients ascending, no trailing zeros.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<ExactScalar> c);
  // Only non-negative exponents allowed.
  static Polynomial from_param(const ParamPolynomial& p);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<ExactScalar>& coefficients() const { return c_; }
  const ExactScalar& leading() const { return c_.back(); }

  ExactScalar evaluate(const Rational& x) const;
  double evaluate(double x) const;
  Polynomial derivative() const;
  Polynomial monic() const;
  // quotient, remainder
  std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const;
  friend Polynomial operator-(const Polynomial& a);
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

 private:
  void trim();
  std::vector<ExactScalar> c_;
};

Polynomial gcd(Polynomial a, Polynomial b);
Polynomial squarefree_part(const Polynomial& f);

class SturmChain {
 public:
  explicit SturmChain(const Polynomial& f);  // built on the squarefree part of f
  const Polynomial& base() const { return chain_.front(); }
  int variations(const Rational& x) const;
  // Number of distinct roots in (lo, hi]. lo, hi should not be roots.
  int count(const Rational& lo, const Rational& hi) const;
  int sign_at(const Rational& x) const { return base().evaluate(x).sign(); }

 private:
  std::vector<Polynomial> chain_;
};

struct IsolatingInterval {
  Rational lo;
  Rational hi;
  std::optional<Rational> exact;  // set when the root is known to be this rational
  double midpoint() const { return Rational((lo + hi) / 2).get_d(); }
};

// All distinct roots in (0, inf), ascending.
std::vector<IsolatingInterval> isolate_positive_roots(const Polynomial& f);
// All distinct roots in the open interval (lo, hi), ascending.
std::vector<IsolatingInterval> isolate_roots(const Polynomial& f, const Rational& lo, const Rational& hi);
// Shrinks the interval until hi - lo <= eps; tries small-denominator rationals on the way.
IsolatingInterval refine(const IsolatingInterval& iv, const Polynomial& f, const Rational& eps);

}  // namespace latq
