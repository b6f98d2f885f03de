#include "latq/quadratic.hpp"

#include <cctype>
#include <cmath>
#include <ostream>

#include "latq/error.hpp"

namespace latq {

QuadraticNumber::QuadraticNumber(Rational p, Rational q, long d) : p_(std::move(p)), q_(std::move(q)), d_(d) {
  if (q_ != 0) {
    if (d_ < 2) fail(ErrorKind::Domain, "radicand must be > 1");
    auto sp = split_square(Integer(d_));
    if (sp.r != 1) fail(ErrorKind::Domain, "radicand " + std::to_string(d_) + " is not squarefree");
  }
  normalize();
}

void QuadraticNumber::normalize() {
  if (q_ == 0) d_ = 0;
}

long QuadraticNumber::common_radicand(const QuadraticNumber& o) const {
  if (d_ == 0) return o.d_;
  if (o.d_ == 0 || o.d_ == d_) return d_;
  fail(ErrorKind::FieldMismatch, "Q(sqrt " + std::to_string(d_) + ") vs Q(sqrt " + std::to_string(o.d_) + ")");
}

int QuadraticNumber::sign() const {
  int sp = sgn(p_), sq = sgn(q_);
  if (sq == 0) return sp;
  if (sp == 0 || sp == sq) return sq;
  // opposite signs: compare p^2 with d q^2
  int c = cmp(p_ * p_, q_ * q_ * d_);
  return c > 0 ? sp : sq;
}

Rational QuadraticNumber::norm() const { return p_ * p_ - q_ * q_ * d_; }

double QuadraticNumber::to_double() const {
  if (d_ == 0) return p_.get_d();
  double pd = p_.get_d(), qd = q_.get_d() * std::sqrt(static_cast<double>(d_));
  if ((pd < 0) == (qd < 0) || pd == 0) return pd + qd;
  // cancellation: use (p^2 - d q^2) / (p - q sqrt d)
  return norm().get_d() / (pd - qd);
}

QuadraticNumber QuadraticNumber::conjugate() const {
  QuadraticNumber r = *this;
  r.q_ = -r.q_;
  return r;
}

QuadraticNumber QuadraticNumber::operator-() const {
  QuadraticNumber r = *this;
  r.p_ = -r.p_;
  r.q_ = -r.q_;
  return r;
}

QuadraticNumber& QuadraticNumber::operator+=(const QuadraticNumber& o) {
  d_ = common_radicand(o);
  p_ += o.p_;
  q_ += o.q_;
  normalize();
  return *this;
}

QuadraticNumber& QuadraticNumber::operator-=(const QuadraticNumber& o) {
  d_ = common_radicand(o);
  p_ -= o.p_;
  q_ -= o.q_;
  normalize();
  return *this;
}

QuadraticNumber& QuadraticNumber::operator*=(const QuadraticNumber& o) {
  long d = common_radicand(o);
  Rational p = p_ * o.p_ + q_ * o.q_ * d;
  Rational q = p_ * o.q_ + q_ * o.p_;
  p_ = std::move(p);
  q_ = std::move(q);
  d_ = d;
  normalize();
  return *this;
}

QuadraticNumber& QuadraticNumber::operator/=(const QuadraticNumber& o) {
  long d = common_radicand(o);
  Rational n = o.norm();
  if (n == 0) fail(ErrorKind::DivisionByZero, "division by zero quadratic number");
  QuadraticNumber c = o.conjugate();
  *this *= c;
  p_ /= n;
  q_ /= n;
  if (d_ == 0 && q_ != 0) d_ = d;
  normalize();
  return *this;
}

std::string QuadraticNumber::to_string() const {
  if (d_ == 0) return latq::to_string(p_);
  std::string s;
  if (p_ != 0) s = latq::to_string(p_) + (q_ > 0 ? "+" : "");
  return s + latq::to_string(q_) + "*sqrt(" + std::to_string(d_) + ")";
}

ExactScalar::ExactScalar(Rational q) : v_(Rational(0)), shadow_(0.0) { set(QuadraticNumber(std::move(q))); }
ExactScalar::ExactScalar(QuadraticNumber q) : v_(Rational(0)), shadow_(0.0) { set(std::move(q)); }

void ExactScalar::set(QuadraticNumber q) {
  shadow_ = q.to_double();
  if (q.is_rational())
    v_ = q.rational_part();
  else
    v_ = std::move(q);
}

ExactScalar ExactScalar::sqrt_of(long d) {
  if (d < 0) fail(ErrorKind::Domain, "sqrt of a negative integer");
  if (d == 0) return ExactScalar();
  auto sp = split_square(Integer(d));
  if (sp.s == 1) return ExactScalar(Rational(sp.r));
  return ExactScalar(QuadraticNumber(0, Rational(sp.r), sp.s.get_si()));
}

const Rational& ExactScalar::rational() const {
  if (!is_rational()) fail(ErrorKind::Domain, "scalar " + to_string() + " is irrational");
  return std::get<Rational>(v_);
}

QuadraticNumber ExactScalar::as_quadratic() const {
  if (is_rational()) return QuadraticNumber(std::get<Rational>(v_));
  return std::get<QuadraticNumber>(v_);
}

int ExactScalar::sign() const {
  if (is_rational()) return sgn(std::get<Rational>(v_));
  return std::get<QuadraticNumber>(v_).sign();
}

ExactScalar ExactScalar::operator-() const { return ExactScalar(-as_quadratic()); }

ExactScalar& ExactScalar::operator+=(const ExactScalar& o) {
  if (is_rational() && o.is_rational()) {
    std::get<Rational>(v_) += std::get<Rational>(o.v_);
    shadow_ = std::get<Rational>(v_).get_d();
  } else {
    set(as_quadratic() + o.as_quadratic());
  }
  return *this;
}

ExactScalar& ExactScalar::operator-=(const ExactScalar& o) {
  if (is_rational() && o.is_rational()) {
    std::get<Rational>(v_) -= std::get<Rational>(o.v_);
    shadow_ = std::get<Rational>(v_).get_d();
  } else {
    set(as_quadratic() - o.as_quadratic());
  }
  return *this;
}

ExactScalar& ExactScalar::operator*=(const ExactScalar& o) {
  if (is_rational() && o.is_rational()) {
    std::get<Rational>(v_) *= std::get<Rational>(o.v_);
    shadow_ = std::get<Rational>(v_).get_d();
  } else {
    set(as_quadratic() * o.as_quadratic());
  }
  return *this;
}

ExactScalar& ExactScalar::operator/=(const ExactScalar& o) {
  if (o.is_zero()) fail(ErrorKind::DivisionByZero, "division by zero");
  if (is_rational() && o.is_rational()) {
    std::get<Rational>(v_) /= std::get<Rational>(o.v_);
    shadow_ = std::get<Rational>(v_).get_d();
  } else {
    set(as_quadratic() / o.as_quadratic());
  }
  return *this;
}

std::string ExactScalar::to_string() const { return as_quadratic().to_string(); }

namespace {

// term := [sign] [rational] ['*'] ['sqrt(' int ')'] ['/' int]
struct Parser {
  std::string s;
  std::size_t i = 0;

  [[noreturn]] void bad() { fail(ErrorKind::Parse, "bad exact scalar '" + s + "'"); }
  bool eat(char c) {
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  bool starts(const char* w) { return s.compare(i, std::char_traits<char>::length(w), w) == 0; }
  std::string number() {
    std::size_t b = i;
    while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
    if (b == i) bad();
    return s.substr(b, i - b);
  }
  ExactScalar term() {
    bool neg = false;
    while (i < s.size() && (s[i] == '+' || s[i] == '-')) neg ^= s[i++] == '-';
    ExactScalar v(1);
    bool any = false;
    if (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      Rational q = parse_rational(number());
      if (eat('/')) {
        if (starts("sqrt(")) bad();
        q /= parse_rational(number());
      }
      v = ExactScalar(q);
      any = true;
      if (eat('*') && !starts("sqrt(")) bad();
    }
    if (starts("sqrt(")) {
      i += 5;
      Rational d = parse_rational(number());
      if (!eat(')') || !is_integer(d)) bad();
      v *= ExactScalar::sqrt_of(d.get_num().get_si());
      any = true;
      if (eat('/')) v /= ExactScalar(parse_rational(number()));
    }
    if (!any) bad();
    return neg ? -v : v;
  }
  ExactScalar expr() {
    if (s.empty()) bad();
    ExactScalar v = term();
    while (i < s.size()) {
      if (s[i] != '+' && s[i] != '-') bad();
      v += term();
    }
    return v;
  }
};

}  // namespace

ExactScalar ExactScalar::parse(std::string_view text) {
  Parser p;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) p.s.push_back(c);
  return p.expr();
}

std::ostream& operator<<(std::ostream& os, const ExactScalar& x) { return os << x.to_string(); }
std::ostream& operator<<(std::ostream& os, const QuadraticNumber& x) { return os << x.to_string(); }

}  // namespace latq
