#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "latq/lattice.hpp"

namespace latq {

namespace {

constexpr std::size_t kMaxDim = 32;

double fdot(const DVec& a, const DVec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void gso(const DMat& b, DMat& mu, DVec& bstar2, DMat& bstar) {
  const std::size_t n = b.size();
  mu.assign(n, DVec(n, 0.0));
  bstar2.assign(n, 0.0);
  bstar = b;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      mu[i][j] = fdot(b[i], bstar[j]) / bstar2[j];
      for (std::size_t k = 0; k < b[i].size(); ++k) bstar[i][k] -= mu[i][j] * bstar[j][k];
    }
    bstar2[i] = fdot(bstar[i], bstar[i]);
  }
}

// Textbook LLL with delta = 0.99; GSO recomputed after each change (n is small).
void lll(DMat& b, std::vector<std::vector<std::int64_t>>& u) {
  const std::size_t n = b.size();
  DMat mu, bs;
  DVec b2;
  gso(b, mu, b2, bs);
  std::size_t k = 1;
  std::size_t guard = 0;
  while (k < n) {
    if (++guard > 100000) fail(ErrorKind::Resource, "LLL did not converge");
    for (std::size_t j = k; j-- > 0;) {
      double q = std::round(mu[k][j]);
      if (q == 0) continue;
      auto qi = static_cast<std::int64_t>(q);
      for (std::size_t c = 0; c < b[k].size(); ++c) b[k][c] -= q * b[j][c];
      for (std::size_t c = 0; c < n; ++c) u[k][c] -= qi * u[j][c];
      gso(b, mu, b2, bs);
    }
    if (b2[k] >= (0.99 - mu[k][k - 1] * mu[k][k - 1]) * b2[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      std::swap(u[k], u[k - 1]);
      gso(b, mu, b2, bs);
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
}

}  // namespace

struct Enumerator::Search {
  const Enumerator& e;
  std::array<double, kMaxDim> c{};
  std::array<std::int64_t, kMaxDim> z{};
  double r2;
  bool shrink;
  std::vector<std::vector<std::int64_t>>* out = nullptr;
  std::array<std::int64_t, kMaxDim> best{};
  bool found = false;

  void leaf(double d) {
    if (shrink) {
      if (d < r2 || !found) {
        r2 = d;
        best = z;
        found = true;
      }
    } else if (out) {
      out->emplace_back(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(e.n_));
    }
  }

  void visit(std::size_t i, double partial) {
    double center = c[i];
    for (std::size_t j = i + 1; j < e.n_; ++j) center -= e.mu_[j][i] * static_cast<double>(z[j]);
    const double b2 = e.bstar2_[i];
    const auto z0 = static_cast<std::int64_t>(std::llround(center));
    // z0 is the closest integer to the center, so every other choice is further out
    if (!descend(i, partial, z0, center, b2)) return;
    bool up = true, down = true;
    for (std::int64_t step = 1; up || down; ++step) {
      if (up) up = descend(i, partial, z0 + step, center, b2);
      if (down) down = descend(i, partial, z0 - step, center, b2);
    }
  }

  bool descend(std::size_t i, double partial, std::int64_t zi, double center, double b2) {
    double diff = static_cast<double>(zi) - center;
    double d = partial + b2 * diff * diff;
    if (d > r2) return false;
    z[i] = zi;
    if (i == 0)
      leaf(d);
    else
      visit(i - 1, d);
    return true;
  }
};

Enumerator::Enumerator(const Lattice& l) : n_(l.dim()), basis_(l.basis) {
  if (n_ == 0 || n_ > kMaxDim) fail(ErrorKind::Parameter, "enumeration dimension out of range");
  chol_ = cholesky(shadow(l.metric));
  DMat bf = shadow(l.basis);
  bred_.assign(n_, DVec(n_, 0.0));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t j = 0; j < n_; ++j) bred_[i][k] += bf[i][j] * chol_[j][k];
  u_.assign(n_, std::vector<std::int64_t>(n_, 0));
  for (std::size_t i = 0; i < n_; ++i) u_[i][i] = 1;
  lll(bred_, u_);
  DMat bs;
  gso(bred_, mu_, bstar2_, bs);
  qt_ = bs;
}

double Enumerator::nearest(const DVec& target_frame, std::vector<std::int64_t>* zout) const {
  Search s{*this};
  DVec t(n_, 0.0);
  for (std::size_t k = 0; k < n_; ++k)
    for (std::size_t j = 0; j < n_; ++j) t[k] += target_frame[j] * chol_[j][k];
  for (std::size_t i = 0; i < n_; ++i) s.c[i] = fdot(t, qt_[i]) / bstar2_[i];
  s.r2 = std::numeric_limits<double>::infinity();
  s.shrink = true;
  s.visit(n_ - 1, 0.0);
  if (zout) {
    zout->assign(n_, 0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) (*zout)[j] += s.best[i] * u_[i][j];
  }
  return s.r2;
}

std::vector<std::vector<std::int64_t>> Enumerator::within(const DVec& target_frame, double r2) const {
  std::vector<std::vector<std::int64_t>> red;
  Search s{*this};
  DVec t(n_, 0.0);
  for (std::size_t k = 0; k < n_; ++k)
    for (std::size_t j = 0; j < n_; ++j) t[k] += target_frame[j] * chol_[j][k];
  for (std::size_t i = 0; i < n_; ++i) s.c[i] = fdot(t, qt_[i]) / bstar2_[i];
  s.r2 = r2;
  s.shrink = false;
  s.out = &red;
  s.visit(n_ - 1, 0.0);
  std::vector<std::vector<std::int64_t>> res;
  res.reserve(red.size());
  for (const auto& zr : red) {
    std::vector<std::int64_t> z(n_, 0);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) z[j] += zr[i] * u_[i][j];
    res.push_back(std::move(z));
  }
  return res;
}

QVec Enumerator::point(const std::vector<std::int64_t>& z) const {
  QVec p(n_, Rational(0));
  for (std::size_t i = 0; i < n_; ++i) {
    if (z[i] == 0) continue;
    Rational zi(static_cast<long>(z[i]));
    for (std::size_t j = 0; j < n_; ++j) p[j] += zi * basis_[i][j];
  }
  return p;
}

std::vector<QVec> closest_lattice_points(const Lattice& l, const Enumerator& e, const QVec& x) {
  DVec t = shadow(x);
  double d0 = e.nearest(t);
  double r2 = d0 * (1 + 1e-6) + 1e-12 * (1 + d0);
  auto cands = e.within(t, r2);
  std::vector<QVec> best;
  Rational bd;
  for (const auto& z : cands) {
    QVec p = e.point(z);
    Rational d = norm2(sub(x, p), l.metric);
    if (best.empty() || d < bd) {
      best.clear();
      bd = d;
      best.push_back(std::move(p));
    } else if (d == bd) {
      best.push_back(std::move(p));
    }
  }
  if (best.empty()) fail(ErrorKind::Consistency, "enumeration found no lattice point");
  std::sort(best.begin(), best.end(), canonical_less);
  return best;
}

std::vector<QVec> closest_lattice_points(const Lattice& l, const QVec& x) {
  Enumerator e(l);
  return closest_lattice_points(l, e, x);
}

}  // namespace latq
