#include "latq/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace latq {

Rational inner(const QVec& x, const QVec& y, const QMat& metric) {
  const std::size_t n = metric.size();
  if (x.size() != n || y.size() != n) fail(ErrorKind::Shape, "inner product dimension");
  Rational s(0), t;
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] == 0) continue;
    t = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (y[j] != 0) t += metric[i][j] * y[j];
    s += x[i] * t;
  }
  return s;
}

QMat gram(const QMat& vectors, const QMat& metric) {
  const std::size_t k = vectors.size();
  QMat g(k, QVec(k));
  for (std::size_t i = 0; i < k; ++i) {
    QVec mi = vecmat(vectors[i], metric);
    for (std::size_t j = i; j < k; ++j) {
      g[i][j] = dot(mi, vectors[j]);
      g[j][i] = g[i][j];
    }
  }
  return g;
}

Rational gram_det(const QMat& vectors, const QMat& metric) { return determinant(gram(vectors, metric)); }

QVec solve_vertex_lift(const QMat& normals, const QMat& metric) {
  const std::size_t n = metric.size();
  if (normals.size() != n) fail(ErrorKind::Shape, "vertex lift needs exactly n normals");
  QMat a;
  QVec b;
  for (const auto& nv : normals) {
    QVec row = vecmat(nv, metric);
    b.push_back(dot(row, nv) / 2);
    a.push_back(std::move(row));
  }
  // a is M n_i^T stacked; the system is a x^T = b
  auto x = solve(a, b);
  if (!x) fail(ErrorKind::RankDeficiency, "vertex lift normals are dependent");
  return *x;
}

QVec project_complement(const QVec& v, const QMat& basis, const QMat& metric) {
  if (basis.empty()) return v;
  QMat g = gram(basis, metric);
  QVec rhs;
  for (const auto& b : basis) rhs.push_back(inner(b, v, metric));
  auto c = solve(g, rhs);
  if (!c) fail(ErrorKind::RankDeficiency, "projection basis is dependent");
  QVec p = v;
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) p[j] -= (*c)[i] * basis[i][j];
  return p;
}

ExactScalar gram_det(const ExactMatrix& vectors) {
  const std::size_t k = vectors.size();
  ExactMatrix g(k, ExactVector(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) g[i][j] = g[j][i] = dot(vectors[i], vectors[j]);
  return determinant(g);
}

ExactVector solve_vertex_lift(const ExactMatrix& normals) {
  const std::size_t n = normals.empty() ? 0 : normals[0].size();
  if (normals.size() != n) fail(ErrorKind::Shape, "vertex lift needs exactly n normals");
  ExactVector b;
  for (const auto& nv : normals) b.push_back(dot(nv, nv) / ExactScalar(2));
  auto x = solve(normals, b);
  if (!x) fail(ErrorKind::RankDeficiency, "vertex lift normals are dependent");
  return *x;
}

ExactVector project_complement(const ExactVector& v, const ExactMatrix& basis) {
  if (basis.empty()) return v;
  const std::size_t k = basis.size();
  ExactMatrix g(k, ExactVector(k));
  ExactVector rhs(k);
  for (std::size_t i = 0; i < k; ++i) {
    rhs[i] = dot(basis[i], v);
    for (std::size_t j = 0; j < k; ++j) g[i][j] = dot(basis[i], basis[j]);
  }
  auto c = solve(g, rhs);
  if (!c) fail(ErrorKind::RankDeficiency, "projection basis is dependent");
  ExactVector p = v;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < v.size(); ++j) p[j] -= (*c)[i] * basis[i][j];
  return p;
}

std::vector<std::size_t> independent_rows(const DMat& vectors, std::size_t want, double tol) {
  std::vector<std::size_t> chosen;
  if (vectors.empty()) return chosen;
  double scale = 0;
  for (const auto& v : vectors) {
    double s = 0;
    for (double x : v) s += x * x;
    scale = std::max(scale, std::sqrt(s));
  }
  if (scale == 0) return chosen;
  DMat res = vectors;
  std::vector<char> used(vectors.size(), 0);
  while (chosen.size() < want) {
    double best = -1;
    std::size_t bi = 0;
    for (std::size_t i = 0; i < res.size(); ++i) {
      if (used[i]) continue;
      double s = 0;
      for (double x : res[i]) s += x * x;
      if (s > best) {
        best = s;
        bi = i;
      }
    }
    if (best < 0 || std::sqrt(best) <= tol * scale) break;
    used[bi] = 1;
    chosen.push_back(bi);
    DVec u = res[bi];
    double nu = std::sqrt(best);
    for (double& x : u) x /= nu;
    for (std::size_t i = 0; i < res.size(); ++i) {
      if (used[i]) continue;
      double d = 0;
      for (std::size_t j = 0; j < u.size(); ++j) d += res[i][j] * u[j];
      for (std::size_t j = 0; j < u.size(); ++j) res[i][j] -= d * u[j];
    }
  }
  return chosen;
}

std::size_t rank_float(const DMat& vectors, double tol) {
  if (vectors.empty()) return 0;
  return independent_rows(vectors, vectors[0].size(), tol).size();
}

DMat cholesky(const DMat& m) {
  const std::size_t n = m.size();
  DMat l(n, DVec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      if (i == j) {
        if (s <= 0) fail(ErrorKind::Domain, "matrix is not positive definite");
        l[i][i] = std::sqrt(s);
      } else {
        l[i][j] = s / l[j][j];
      }
    }
  }
  return l;
}

}  // namespace latq
