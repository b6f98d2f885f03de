#include "latq/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "latq/error.hpp"

namespace latq {

ParamPolynomial::ParamPolynomial(std::map<int, ExactScalar> c) : c_(std::move(c)) { trim(); }

void ParamPolynomial::trim() {
  for (auto it = c_.begin(); it != c_.end();) {
    if (it->second.is_zero())
      it = c_.erase(it);
    else
      ++it;
  }
}

ExactScalar ParamPolynomial::coefficient(int k) const {
  auto it = c_.find(k);
  return it == c_.end() ? ExactScalar() : it->second;
}

int ParamPolynomial::min_exponent() const { return c_.empty() ? 0 : c_.begin()->first; }
int ParamPolynomial::max_exponent() const { return c_.empty() ? 0 : c_.rbegin()->first; }

ExactScalar ParamPolynomial::evaluate(const Rational& a) const {
  if (a == 0 && min_exponent() < 0) fail(ErrorKind::Domain, "Laurent polynomial evaluated at 0");
  ExactScalar s;
  for (const auto& [k, c] : c_) s += c * ExactScalar(pow(a, k));
  return s;
}

double ParamPolynomial::evaluate(double a) const {
  double s = 0;
  for (const auto& [k, c] : c_) s += c.shadow() * std::pow(a, k);
  return s;
}

ParamPolynomial ParamPolynomial::derivative() const {
  std::map<int, ExactScalar> d;
  for (const auto& [k, c] : c_)
    if (k != 0) d[k - 1] = c * ExactScalar(k);
  return ParamPolynomial(std::move(d));
}

ParamPolynomial ParamPolynomial::shifted(int s) const {
  std::map<int, ExactScalar> d;
  for (const auto& [k, c] : c_) d[k + s] = c;
  return ParamPolynomial(std::move(d));
}

ParamPolynomial& ParamPolynomial::operator+=(const ParamPolynomial& o) {
  for (const auto& [k, c] : o.c_) c_[k] += c;
  trim();
  return *this;
}

ParamPolynomial& ParamPolynomial::operator-=(const ParamPolynomial& o) {
  for (const auto& [k, c] : o.c_) c_[k] -= c;
  trim();
  return *this;
}

ParamPolynomial& ParamPolynomial::operator*=(const ExactScalar& s) {
  for (auto& [k, c] : c_) c *= s;
  trim();
  return *this;
}

ParamPolynomial laurent_fit(const std::vector<std::pair<Rational, ExactScalar>>& samples, const std::vector<int>& basis) {
  const std::size_t k = basis.size(), m = samples.size();
  if (k == 0) fail(ErrorKind::Parameter, "empty fit basis");
  if (m < k) fail(ErrorKind::DegenerateInput, "fewer samples than basis functions");
  for (std::size_t i = 0; i < m; ++i) {
    if (samples[i].first == 0) fail(ErrorKind::DegenerateInput, "sample at parameter 0");
    for (std::size_t j = 0; j < i; ++j)
      if (samples[i].first == samples[j].first) fail(ErrorKind::DegenerateInput, "duplicate sample parameter");
  }

  // augmented m x (k+1) system
  std::vector<std::vector<ExactScalar>> a(m, std::vector<ExactScalar>(k + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < k; ++j) a[i][j] = ExactScalar(pow(samples[i].first, basis[j]));
    a[i][k] = samples[i].second;
  }
  std::size_t row = 0;
  for (std::size_t col = 0; col < k; ++col, ++row) {
    std::size_t piv = row;
    while (piv < m && a[piv][col].is_zero()) ++piv;
    if (piv == m) fail(ErrorKind::DegenerateInput, "samples do not determine the fit");
    std::swap(a[piv], a[row]);
    for (std::size_t i = row + 1; i < m; ++i) {
      if (a[i][col].is_zero()) continue;
      ExactScalar f = a[i][col] / a[row][col];
      for (std::size_t j = col; j <= k; ++j) a[i][j] -= f * a[row][j];
    }
  }
  std::vector<ExactScalar> x(k);
  for (std::size_t r = k; r-- > 0;) {
    ExactScalar s = a[r][k];
    for (std::size_t j = r + 1; j < k; ++j) s -= a[r][j] * x[j];
    x[r] = s / a[r][r];
  }
  std::map<int, ExactScalar> c;
  for (std::size_t j = 0; j < k; ++j) c[basis[j]] = x[j];
  ParamPolynomial p(std::move(c));
  for (const auto& [t, y] : samples)
    if (!(p.evaluate(t) == y))
      fail(ErrorKind::FitMismatch, "sample at a=" + to_string(t) + " disagrees with the fitted polynomial");
  return p;
}

Polynomial::Polynomial(std::vector<ExactScalar> c) : c_(std::move(c)) { trim(); }

void Polynomial::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

Polynomial Polynomial::from_param(const ParamPolynomial& p) {
  if (p.is_zero()) return Polynomial();
  if (p.min_exponent() < 0) fail(ErrorKind::Domain, "negative exponent in a dense polynomial");
  std::vector<ExactScalar> c(static_cast<std::size_t>(p.max_exponent()) + 1);
  for (const auto& [k, v] : p.coefficients()) c[static_cast<std::size_t>(k)] = v;
  return Polynomial(std::move(c));
}

ExactScalar Polynomial::evaluate(const Rational& x) const {
  ExactScalar s;
  ExactScalar ex(x);
  for (std::size_t i = c_.size(); i-- > 0;) s = s * ex + c_[i];
  return s;
}

double Polynomial::evaluate(double x) const {
  double s = 0;
  for (std::size_t i = c_.size(); i-- > 0;) s = s * x + c_[i].shadow();
  return s;
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial();
  std::vector<ExactScalar> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * ExactScalar(static_cast<long>(i));
  return Polynomial(std::move(d));
}

Polynomial Polynomial::monic() const {
  if (c_.empty()) return *this;
  std::vector<ExactScalar> d = c_;
  ExactScalar l = c_.back();
  for (auto& v : d) v /= l;
  return Polynomial(std::move(d));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& d) const {
  if (d.is_zero()) fail(ErrorKind::DivisionByZero, "polynomial division by zero");
  std::vector<ExactScalar> r = c_;
  if (degree() < d.degree()) return {Polynomial(), *this};
  std::vector<ExactScalar> q(static_cast<std::size_t>(degree() - d.degree()) + 1);
  for (int i = degree(); i >= d.degree(); --i) {
    ExactScalar f = r[static_cast<std::size_t>(i)] / d.leading();
    q[static_cast<std::size_t>(i - d.degree())] = f;
    if (f.is_zero()) continue;
    for (int j = 0; j <= d.degree(); ++j)
      r[static_cast<std::size_t>(i - d.degree() + j)] -= f * d.c_[static_cast<std::size_t>(j)];
  }
  r.resize(static_cast<std::size_t>(d.degree()));
  return {Polynomial(std::move(q)), Polynomial(std::move(r))};
}

Polynomial operator-(const Polynomial& a) {
  std::vector<ExactScalar> c = a.c_;
  for (auto& v : c) v = -v;
  return Polynomial(std::move(c));
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
  std::vector<ExactScalar> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
  return Polynomial(std::move(c));
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero() || b.is_zero()) return Polynomial();
  std::vector<ExactScalar> c(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i)
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  return Polynomial(std::move(c));
}

Polynomial gcd(Polynomial a, Polynomial b) {
  while (!b.is_zero()) {
    Polynomial r = a.divmod(b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

Polynomial squarefree_part(const Polynomial& f) {
  if (f.degree() <= 0) return f;
  Polynomial g = gcd(f, f.derivative());
  if (g.degree() == 0) return f;
  return f.divmod(g).first;
}

namespace {

// positive rescaling keeps Sturm sign patterns intact
Polynomial positive_normalized(const Polynomial& p) {
  if (p.is_zero()) return p;
  ExactScalar l = p.leading();
  if (l.sign() < 0) l = -l;
  std::vector<ExactScalar> c = p.coefficients();
  for (auto& v : c) v /= l;
  return Polynomial(std::move(c));
}

}  // namespace

SturmChain::SturmChain(const Polynomial& f) {
  if (f.is_zero()) fail(ErrorKind::DegenerateInput, "Sturm chain of the zero polynomial");
  chain_.push_back(positive_normalized(squarefree_part(f)));
  if (chain_[0].degree() == 0) return;
  chain_.push_back(positive_normalized(chain_[0].derivative()));
  while (true) {
    Polynomial r = chain_[chain_.size() - 2].divmod(chain_.back()).second;
    if (r.is_zero()) break;
    chain_.push_back(positive_normalized(-r));
  }
}

int SturmChain::variations(const Rational& x) const {
  int v = 0, last = 0;
  for (const auto& p : chain_) {
    int s = p.evaluate(x).sign();
    if (s == 0) continue;
    if (last != 0 && s != last) ++v;
    last = s;
  }
  return v;
}

int SturmChain::count(const Rational& lo, const Rational& hi) const { return variations(lo) - variations(hi); }

namespace {

Rational root_bound(const Polynomial& f) {
  double m = 0, l = std::abs(f.leading().shadow());
  for (int i = 0; i < f.degree(); ++i) m = std::max(m, std::abs(f.coefficients()[static_cast<std::size_t>(i)].shadow()) / l);
  Rational b(std::ceil((1 + m) * 1.01) + 1);
  return b;
}

// One root in (a, b] known; produce an interval with non-zero endpoints.
void settle(const SturmChain& ch, Rational a, Rational b, std::vector<IsolatingInterval>& out) {
  if (ch.sign_at(b) == 0) {
    Rational eps = (b - a) / 2;
    while (ch.count(b - eps, b + eps) != 1 || ch.sign_at(b - eps) == 0 || ch.sign_at(b + eps) == 0) eps /= 2;
    out.push_back({b - eps, b + eps, b});
    return;
  }
  if (ch.sign_at(a) == 0) {
    Rational step = (b - a) / 2;
    while (ch.sign_at(a + step) == 0 || ch.count(a + step, b) != 1) step /= 2;
    a += step;
  }
  out.push_back({a, b, std::nullopt});
}

void isolate_rec(const SturmChain& ch, const Rational& a, const Rational& b, std::vector<IsolatingInterval>& out) {
  int c = ch.count(a, b);
  if (c == 0) return;
  if (c == 1) {
    settle(ch, a, b, out);
    return;
  }
  Rational mid = (a + b) / 2;
  isolate_rec(ch, a, mid, out);
  isolate_rec(ch, mid, b, out);
}

}  // namespace

std::vector<IsolatingInterval> isolate_roots(const Polynomial& f, const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) fail(ErrorKind::Parameter, "empty isolation range");
  SturmChain ch(f);
  std::vector<IsolatingInterval> out;
  if (ch.base().degree() <= 0) return out;
  isolate_rec(ch, lo, hi, out);
  // drop a root sitting exactly on hi
  if (!out.empty() && out.back().exact && *out.back().exact == hi) out.pop_back();
  // trim intervals that spill outside (lo, hi)
  for (auto& iv : out) {
    if (iv.lo < lo) iv.lo = lo;
    if (iv.hi > hi) iv.hi = hi;
  }
  return out;
}

std::vector<IsolatingInterval> isolate_positive_roots(const Polynomial& f) {
  if (f.degree() <= 0) return {};
  return isolate_roots(f, Rational(0), root_bound(f));
}

IsolatingInterval refine(const IsolatingInterval& iv, const Polynomial& f, const Rational& eps) {
  if (eps <= 0) fail(ErrorKind::Parameter, "refinement tolerance must be positive");
  SturmChain ch(f);
  IsolatingInterval r = iv;
  int slo = ch.sign_at(r.lo);
  int round = 0;
  while (!r.exact && r.hi - r.lo > eps) {
    if (++round % 8 == 0) {
      Rational q = simplest_between(r.lo, r.hi);
      if (q > r.lo && q < r.hi && ch.sign_at(q) == 0) {
        r.exact = q;
        break;
      }
    }
    Rational mid = (r.lo + r.hi) / 2;
    int s = ch.sign_at(mid);
    if (s == 0) {
      r.exact = mid;
    } else if (s == slo) {
      r.lo = mid;
    } else {
      r.hi = mid;
    }
  }
  if (r.exact) {
    Rational w = std::min(eps, Rational(r.hi - r.lo)) / 4;
    r.lo = *r.exact - w;
    r.hi = *r.exact + w;
  }
  return r;
}

}  // namespace latq
