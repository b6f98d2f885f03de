#include <algorithm>
#include <cmath>

#include "latq/error.hpp"
#include "latq/voronoi.hpp"

namespace latq {

namespace {

double dotd(const DVec& a, const DVec& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Orthonormal basis of the active rows.
DMat orthonormal(const FacetSystem& sys, const std::vector<Point>& w) {
  DMat q;
  for (Point i : w) {
    DVec v = sys.a[i];
    for (const DVec& e : q) {
      double f = dotd(v, e);
      for (std::size_t j = 0; j < v.size(); ++j) v[j] -= f * e[j];
    }
    double nv = std::sqrt(dotd(v, v));
    if (nv <= 1e-12 * std::sqrt(dotd(sys.a[i], sys.a[i]))) continue;
    for (double& x : v) x /= nv;
    q.push_back(std::move(v));
  }
  return q;
}

// Least-squares multipliers of c in the active rows, by normal equations.
DVec multipliers(const FacetSystem& sys, const std::vector<Point>& w, const DVec& c) {
  const std::size_t k = w.size();
  DMat g(k, DVec(k + 1, 0.0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) g[i][j] = dotd(sys.a[w[i]], sys.a[w[j]]);
    g[i][k] = dotd(sys.a[w[i]], c);
  }
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t p = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(g[r][col]) > std::abs(g[p][col])) p = r;
    std::swap(g[p], g[col]);
    if (std::abs(g[col][col]) < 1e-300) continue;
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      double f = g[r][col] / g[col][col];
      for (std::size_t j = col; j <= k; ++j) g[r][j] -= f * g[col][j];
    }
  }
  DVec lam(k, 0.0);
  for (std::size_t i = 0; i < k; ++i)
    if (std::abs(g[i][i]) >= 1e-300) lam[i] = g[i][k] / g[i][i];
  return lam;
}

}  // namespace

std::vector<LpVertex> lp_vertex_walk(const FacetSystem& sys, const DVec& c, std::size_t max_iter) {
  const std::size_t n = c.size();
  const std::size_t m = sys.a.size();
  if (max_iter == 0) max_iter = 200 * n + 100;
  const double cn = std::sqrt(dotd(c, c));
  std::vector<LpVertex> out;
  DVec x(n, 0.0);
  std::vector<Point> w;
  std::vector<char> active(m, 0);
  for (std::size_t it = 0; it < max_iter; ++it) {
    DMat q = orthonormal(sys, w);
    DVec d = c;
    for (const DVec& e : q) {
      double f = dotd(c, e);
      for (std::size_t j = 0; j < n; ++j) d[j] -= f * e[j];
    }
    double dn = std::sqrt(dotd(d, d));
    if (dn > 1e-10 * cn) {
      // Bland: smallest index among the blocking constraints
      double best = INFINITY;
      std::size_t hit = m;
      for (std::size_t i = 0; i < m; ++i) {
        if (active[i]) continue;
        double ad = dotd(sys.a[i], d);
        if (ad <= 1e-12 * dn * std::sqrt(dotd(sys.a[i], sys.a[i]))) continue;
        double t = std::max(0.0, (sys.b[i] - dotd(sys.a[i], x)) / ad);
        if (t < best * (1 - 1e-12) - 1e-15) {
          best = t;
          hit = i;
        }
      }
      if (hit == m) fail(ErrorKind::Consistency, "LP unbounded: the relevant vectors do not bound a cell");
      for (std::size_t j = 0; j < n; ++j) x[j] += best * d[j];
      w.push_back(static_cast<Point>(hit));
      active[hit] = 1;
      if (w.size() == n) {
        std::vector<Point> s(w);
        std::sort(s.begin(), s.end());
        out.push_back({x, std::move(s)});
      }
      continue;
    }
    if (w.empty()) break;
    DVec lam = multipliers(sys, w, c);
    std::size_t drop = w.size();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (lam[i] >= -1e-10 * cn) continue;
      if (drop == w.size() || w[i] < w[drop]) drop = i;
    }
    if (drop == w.size()) break;  // optimal
    active[w[drop]] = 0;
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(drop));
  }
  return out;
}

}  // namespace latq
