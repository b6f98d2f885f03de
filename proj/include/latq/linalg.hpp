#pragma once
// Dense exact linear algebra over a field T (Rational or ExactScalar), rows-as-vectors.
// Metric variants take a symmetric positive-definite Gram matrix M and use x M y^T.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "latq/error.hpp"
#include "latq/quadratic.hpp"

namespace latq {

using QVec = std::vector<Rational>;
using QMat = std::vector<QVec>;
using ExactVector = std::vector<ExactScalar>;
using ExactMatrix = std::vector<ExactVector>;
using DVec = std::vector<double>;
using DMat = std::vector<DVec>;

inline double shadow(const Rational& q) { return q.get_d(); }
inline double shadow(const ExactScalar& s) { return s.shadow(); }
template <class T>
DVec shadow(const std::vector<T>& v) {
  DVec d(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) d[i] = shadow(v[i]);
  return d;
}
template <class T>
DMat shadow(const std::vector<std::vector<T>>& m) {
  DMat d;
  d.reserve(m.size());
  for (const auto& r : m) d.push_back(shadow(r));
  return d;
}

inline int sign_of(const Rational& q) { return sgn(q); }
inline int sign_of(const ExactScalar& s) { return s.sign(); }

template <class T>
std::vector<std::vector<T>> identity(std::size_t n) {
  std::vector<std::vector<T>> m(n, std::vector<T>(n, T(0)));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = T(1);
  return m;
}

template <class T>
T dot(const std::vector<T>& a, const std::vector<T>& b) {
  if (a.size() != b.size()) fail(ErrorKind::Shape, "dot of vectors of different length");
  T s(0);
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

template <class T>
std::vector<T> add(std::vector<T> a, const std::vector<T>& b) {
  if (a.size() != b.size()) fail(ErrorKind::Shape, "add of vectors of different length");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

template <class T>
std::vector<T> sub(std::vector<T> a, const std::vector<T>& b) {
  if (a.size() != b.size()) fail(ErrorKind::Shape, "sub of vectors of different length");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

template <class T>
std::vector<T> scale(std::vector<T> a, const T& s) {
  for (auto& x : a) x *= s;
  return a;
}

// row vector times matrix
template <class T>
std::vector<T> vecmat(const std::vector<T>& x, const std::vector<std::vector<T>>& m) {
  if (x.size() != m.size()) fail(ErrorKind::Shape, "vector-matrix size mismatch");
  std::size_t c = m.empty() ? 0 : m[0].size();
  std::vector<T> y(c, T(0));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sign_of(x[i]) == 0) continue;
    for (std::size_t j = 0; j < c; ++j) y[j] += x[i] * m[i][j];
  }
  return y;
}

template <class T>
std::vector<std::vector<T>> matmul(const std::vector<std::vector<T>>& a, const std::vector<std::vector<T>>& b) {
  std::vector<std::vector<T>> r;
  r.reserve(a.size());
  for (const auto& row : a) r.push_back(vecmat(row, b));
  return r;
}

template <class T>
std::vector<std::vector<T>> transpose(const std::vector<std::vector<T>>& a) {
  if (a.empty()) return {};
  std::vector<std::vector<T>> t(a[0].size(), std::vector<T>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

// Fraction-free Bareiss elimination; divisions are exact.
template <class T>
T determinant(std::vector<std::vector<T>> m) {
  const std::size_t n = m.size();
  for (const auto& r : m)
    if (r.size() != n) fail(ErrorKind::Shape, "determinant of a non-square matrix");
  if (n == 0) return T(1);
  T prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sign_of(m[k][k]) == 0) {
      std::size_t p = k + 1;
      while (p < n && sign_of(m[p][k]) == 0) ++p;
      if (p == n) return T(0);
      std::swap(m[p], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    }
    prev = m[k][k];
  }
  T d = m[n - 1][n - 1];
  return sign < 0 ? T(-d) : d;
}

// Reduced row echelon form in place; returns pivot columns.
template <class T>
std::vector<std::size_t> row_reduce(std::vector<std::vector<T>>& m) {
  std::vector<std::size_t> piv;
  if (m.empty()) return piv;
  const std::size_t rows = m.size(), cols = m[0].size();
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && sign_of(m[p][c]) == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[r]);
    T inv = T(1) / m[r][c];
    for (std::size_t j = c; j < cols; ++j) m[r][j] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == r || sign_of(m[i][c]) == 0) continue;
      T f = m[i][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

template <class T>
std::size_t rank(std::vector<std::vector<T>> m) {
  return row_reduce(m).size();
}

// Solves A x = b (A square). nullopt when A is singular.
template <class T>
std::optional<std::vector<T>> solve(const std::vector<std::vector<T>>& a, const std::vector<T>& b) {
  const std::size_t n = a.size();
  if (b.size() != n) fail(ErrorKind::Shape, "solve: right-hand side length");
  std::vector<std::vector<T>> m = a;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) fail(ErrorKind::Shape, "solve: non-square system");
    m[i].push_back(b[i]);
  }
  auto piv = row_reduce(m);
  if (piv.size() != n || piv.back() != n - 1) return std::nullopt;
  std::vector<T> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m[i][n];
  return x;
}

template <class T>
std::optional<std::vector<std::vector<T>>> inverse(const std::vector<std::vector<T>>& a) {
  const std::size_t n = a.size();
  std::vector<std::vector<T>> m = a;
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) fail(ErrorKind::Shape, "inverse of a non-square matrix");
    for (std::size_t j = 0; j < n; ++j) m[i].push_back(i == j ? T(1) : T(0));
  }
  auto piv = row_reduce(m);
  if (piv.size() < n || piv[n - 1] != n - 1) return std::nullopt;
  std::vector<std::vector<T>> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i].assign(m[i].begin() + static_cast<std::ptrdiff_t>(n), m[i].end());
  return inv;
}

// ---- metric versions (Rational) -------------------------------------------

Rational inner(const QVec& x, const QVec& y, const QMat& metric);
inline Rational norm2(const QVec& x, const QMat& metric) { return inner(x, x, metric); }
QMat gram(const QMat& vectors, const QMat& metric);
Rational gram_det(const QMat& vectors, const QMat& metric);

// x with 2 <x, n_i> = <n_i, n_i> for n independent normals. RankDeficiency otherwise.
QVec solve_vertex_lift(const QMat& normals, const QMat& metric);
// v minus its orthogonal projection onto span(basis).
QVec project_complement(const QVec& v, const QMat& basis, const QMat& metric);

// Euclidean versions on ExactVector, for the Cartesian interface.
ExactScalar gram_det(const ExactMatrix& vectors);
ExactVector solve_vertex_lift(const ExactMatrix& normals);
ExactVector project_complement(const ExactVector& v, const ExactMatrix& basis);

// Numerical rank with tolerance relative to the largest row norm.
std::size_t rank_float(const DMat& vectors, double tol = 1e-9);
// Greedy choice of linearly independent rows (float, column-pivoted Gram-Schmidt).
std::vector<std::size_t> independent_rows(const DMat& vectors, std::size_t want, double tol = 1e-9);

// Lower-triangular Cholesky factor of a positive-definite matrix (double).
DMat cholesky(const DMat& m);

}  // namespace latq
