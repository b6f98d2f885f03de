#pragma once
// Numbers p + q*sqrt(d) with rational p, q and squarefree integer d > 1, and the
// tagged scalar used at every Cartesian boundary of the library.

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>

#include "latq/rational.hpp"

namespace latq {

class QuadraticNumber {
 public:
  QuadraticNumber() = default;
  QuadraticNumber(Rational p) : p_(std::move(p)) {}  // NOLINT
  // d must be squarefree and > 1 unless q == 0.
  QuadraticNumber(Rational p, Rational q, long d);

  const Rational& rational_part() const { return p_; }
  const Rational& irrational_part() const { return q_; }
  long radicand() const { return d_; }
  bool is_rational() const { return d_ == 0; }

  int sign() const;
  double to_double() const;
  QuadraticNumber conjugate() const;
  // (p + q sqrt d)(p - q sqrt d)
  Rational norm() const;

  QuadraticNumber operator-() const;
  QuadraticNumber& operator+=(const QuadraticNumber& o);
  QuadraticNumber& operator-=(const QuadraticNumber& o);
  QuadraticNumber& operator*=(const QuadraticNumber& o);
  QuadraticNumber& operator/=(const QuadraticNumber& o);

  friend QuadraticNumber operator+(QuadraticNumber a, const QuadraticNumber& b) { return a += b; }
  friend QuadraticNumber operator-(QuadraticNumber a, const QuadraticNumber& b) { return a -= b; }
  friend QuadraticNumber operator*(QuadraticNumber a, const QuadraticNumber& b) { return a *= b; }
  friend QuadraticNumber operator/(QuadraticNumber a, const QuadraticNumber& b) { return a /= b; }
  friend bool operator==(const QuadraticNumber& a, const QuadraticNumber& b) {
    return a.d_ == b.d_ && a.p_ == b.p_ && a.q_ == b.q_;
  }
  friend bool operator<(const QuadraticNumber& a, const QuadraticNumber& b) { return (a - b).sign() < 0; }

  std::string to_string() const;

 private:
  void normalize();
  long common_radicand(const QuadraticNumber& o) const;

  Rational p_{0};
  Rational q_{0};
  long d_ = 0;
};

// Rational | QuadraticNumber with a double shadow kept in sync.
class ExactScalar {
 public:
  ExactScalar() : v_(Rational(0)), shadow_(0.0) {}
  ExactScalar(long v) : ExactScalar(Rational(v)) {}  // NOLINT
  ExactScalar(int v) : ExactScalar(Rational(v)) {}  // NOLINT
  ExactScalar(Rational q);                           // NOLINT
  ExactScalar(QuadraticNumber q);                    // NOLINT
  static ExactScalar sqrt_of(long d);                // sqrt(d) for any positive integer d

  bool is_rational() const { return std::holds_alternative<Rational>(v_); }
  const Rational& rational() const;  // throws Domain unless is_rational()
  QuadraticNumber as_quadratic() const;
  long radicand() const { return is_rational() ? 0 : std::get<QuadraticNumber>(v_).radicand(); }
  double shadow() const { return shadow_; }
  int sign() const;
  bool is_zero() const { return sign() == 0; }

  ExactScalar operator-() const;
  ExactScalar& operator+=(const ExactScalar& o);
  ExactScalar& operator-=(const ExactScalar& o);
  ExactScalar& operator*=(const ExactScalar& o);
  ExactScalar& operator/=(const ExactScalar& o);
  friend ExactScalar operator+(ExactScalar a, const ExactScalar& b) { return a += b; }
  friend ExactScalar operator-(ExactScalar a, const ExactScalar& b) { return a -= b; }
  friend ExactScalar operator*(ExactScalar a, const ExactScalar& b) { return a *= b; }
  friend ExactScalar operator/(ExactScalar a, const ExactScalar& b) { return a /= b; }
  friend bool operator==(const ExactScalar& a, const ExactScalar& b) { return a.as_quadratic() == b.as_quadratic(); }
  friend bool operator<(const ExactScalar& a, const ExactScalar& b) { return (a - b).sign() < 0; }

  // "p/q" or "p/q+r/s*sqrt(d)"
  std::string to_string() const;
  static ExactScalar parse(std::string_view s);

 private:
  void set(QuadraticNumber q);
  std::variant<Rational, QuadraticNumber> v_;
  double shadow_;
};

std::ostream& operator<<(std::ostream& os, const ExactScalar& x);
std::ostream& operator<<(std::ostream& os, const QuadraticNumber& x);

}  // namespace latq
