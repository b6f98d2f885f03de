#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <thread>

#include "latq/lattice.hpp"

namespace latq {

namespace {

ExactMatrix to_exact(const QMat& m) {
  ExactMatrix e(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& q : m[i]) e[i].emplace_back(q);
  return e;
}

QMat to_rational(const ExactMatrix& m, const char* what) {
  QMat q(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (const auto& x : m[i]) {
      if (!x.is_rational()) fail(ErrorKind::Unsupported, std::string(what) + " has irrational entries");
      q[i].push_back(x.rational());
    }
  return q;
}

bool is_integral(const QMat& m) {
  for (const auto& r : m)
    for (const auto& x : r)
      if (!is_integer(x)) return false;
  return true;
}

}  // namespace

bool canonical_less(const QVec& a, const QVec& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

std::string to_string(const QVec& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += to_string(v[i]);
  }
  return s + ")";
}

Rational Lattice::frame_volume() const { return abs(determinant(basis)); }
Rational Lattice::metric_det() const { return determinant(metric); }
double Lattice::volume() const { return frame_volume().get_d() * std::sqrt(metric_det().get_d()); }

std::optional<ExactScalar> Lattice::exact_volume() const {
  Rational d = metric_det();
  Integer pq = d.get_num() * d.get_den();
  auto sp = split_square(pq);
  Rational r(sp.r, d.get_den());
  r.canonicalize();
  r *= frame_volume();
  if (sp.s == 1) return ExactScalar(r);
  if (!sp.s.fits_slong_p()) return std::nullopt;
  return ExactScalar(QuadraticNumber(0, r, sp.s.get_si()));
}

ExactMatrix Lattice::generator() const {
  if (!embedding) fail(ErrorKind::Unsupported, name + " has no Cartesian embedding");
  return matmul(to_exact(basis), *embedding);
}

QVec Lattice::cartesian_to_frame(const ExactVector& x) const {
  if (!embedding) fail(ErrorKind::Unsupported, name + " has no Cartesian embedding");
  auto inv = inverse(*embedding);
  if (!inv) fail(ErrorKind::DegenerateInput, "singular embedding");
  ExactVector f = vecmat(x, *inv);
  QVec q;
  for (const auto& v : f) {
    if (!v.is_rational()) fail(ErrorKind::Domain, "vector is not rational in the lattice frame");
    q.push_back(v.rational());
  }
  return q;
}

ExactVector Lattice::frame_to_cartesian(const QVec& x) const {
  if (!embedding) fail(ErrorKind::Unsupported, name + " has no Cartesian embedding");
  ExactVector e;
  for (const auto& q : x) e.emplace_back(q);
  return vecmat(e, *embedding);
}

QVec Lattice::coordinates(const QVec& x) const {
  auto inv = inverse(basis);
  if (!inv) fail(ErrorKind::DegenerateInput, "singular basis");
  return vecmat(x, *inv);
}

bool Lattice::contains(const QVec& x) const {
  for (const auto& c : coordinates(x))
    if (!is_integer(c)) return false;
  return true;
}

void Lattice::validate() const {
  const std::size_t n = dim();
  if (n == 0) fail(ErrorKind::Shape, "zero-dimensional lattice");
  if (basis.size() != n) fail(ErrorKind::Shape, "basis is not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (metric[i].size() != n || basis[i].size() != n) fail(ErrorKind::Shape, "matrix shape");
    for (std::size_t j = 0; j < n; ++j)
      if (metric[i][j] != metric[j][i]) fail(ErrorKind::Domain, "metric is not symmetric");
  }
  for (std::size_t k = 1; k <= n; ++k) {
    QMat minor(k, QVec(k));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) minor[i][j] = metric[i][j];
    if (determinant(minor) <= 0) fail(ErrorKind::Domain, "metric is not positive definite");
  }
  if (determinant(basis) == 0) fail(ErrorKind::DegenerateInput, "generator is singular");
  if (embedding) {
    const ExactMatrix& e = *embedding;
    if (e.size() != n) fail(ErrorKind::Shape, "embedding shape");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!(dot(e[i], e[j]) == ExactScalar(metric[i][j]))) fail(ErrorKind::Consistency, "embedding does not match metric");
  }
  auto binv = inverse(basis);
  for (const auto& r : symmetry) {
    if (r.size() != n) fail(ErrorKind::Shape, "symmetry shape");
    // orthogonal in the metric: R M R^T = M
    if (matmul(matmul(r, metric), transpose(r)) != metric)
      fail(ErrorKind::Invariance, "symmetry generator is not orthogonal");
    if (!is_integral(matmul(matmul(basis, r), *binv)))
      fail(ErrorKind::Invariance, "symmetry generator does not map the lattice to itself");
  }
}

Lattice lattice_from_generator(const std::string& name, const ExactMatrix& b) {
  const std::size_t n = b.size();
  for (const auto& r : b)
    if (r.size() != n) fail(ErrorKind::Shape, "generator is not square");
  if (determinant(b).is_zero()) fail(ErrorKind::DegenerateInput, "generator is singular");
  Lattice l;
  l.name = name;
  l.embedding = b;
  l.metric.assign(n, QVec(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      ExactScalar g = dot(b[i], b[j]);
      if (!g.is_rational())
        fail(ErrorKind::Unsupported, "Gram matrix of " + name + " is irrational; only rational Gram matrices are supported");
      l.metric[i][j] = g.rational();
    }
  l.basis = identity<Rational>(n);
  l.validate();
  return l;
}

Lattice lattice_from_gram(const std::string& name, const QMat& gram) {
  Lattice l;
  l.name = name;
  l.metric = gram;
  l.basis = identity<Rational>(gram.size());
  l.validate();
  return l;
}

void set_frame_symmetry(Lattice& l, const std::vector<QMat>& gens) {
  l.symmetry = gens;
  l.validate();
}

void set_cartesian_symmetry(Lattice& l, const std::vector<ExactMatrix>& gens) {
  if (!l.embedding) fail(ErrorKind::Unsupported, "Cartesian symmetries need an embedding");
  auto inv = inverse(*l.embedding);
  std::vector<QMat> f;
  for (const auto& g : gens) f.push_back(to_rational(matmul(matmul(*l.embedding, g), *inv), "frame symmetry"));
  set_frame_symmetry(l, f);
}

Lattice laminate(const Lattice& base, const QVec& offset, const Rational& a) {
  if (a <= 0) fail(ErrorKind::Parameter, "lamination parameter must be positive");
  const std::size_t n = base.dim();
  if (offset.size() != n) fail(ErrorKind::Shape, "offset dimension");
  Lattice l;
  l.name = base.name + "-laminated";
  l.metric.assign(n + 1, QVec(n + 1, Rational(0)));
  l.basis.assign(n + 1, QVec(n + 1, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      l.metric[i][j] = base.metric[i][j];
      l.basis[i][j] = base.basis[i][j];
    }
  l.metric[n][n] = 1;
  for (std::size_t j = 0; j < n; ++j) l.basis[n][j] = offset[j];
  l.basis[n][n] = a;
  if (base.embedding) {
    ExactMatrix e(n + 1, ExactVector(n + 1));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) e[i][j] = (*base.embedding)[i][j];
    e[n][n] = ExactScalar(1);
    l.embedding = std::move(e);
  }
  auto lam = std::make_shared<Lattice::Lamination>();
  lam->base = std::make_shared<const Lattice>(base);
  lam->offset = offset;
  lam->a = a;
  l.lamination = std::move(lam);
  l.validate();
  return l;
}

Lattice product_lattice(const Lattice& l1, const Lattice& l2, const Rational& a) {
  if (a <= 0) fail(ErrorKind::Parameter, "product parameter must be positive");
  const std::size_t n1 = l1.dim(), n2 = l2.dim(), n = n1 + n2;
  Lattice l;
  l.name = l1.name + "x" + l2.name;
  l.metric.assign(n, QVec(n, Rational(0)));
  l.basis.assign(n, QVec(n, Rational(0)));
  for (std::size_t i = 0; i < n1; ++i)
    for (std::size_t j = 0; j < n1; ++j) {
      l.metric[i][j] = l1.metric[i][j];
      l.basis[i][j] = l1.basis[i][j];
    }
  for (std::size_t i = 0; i < n2; ++i)
    for (std::size_t j = 0; j < n2; ++j) {
      l.metric[n1 + i][n1 + j] = l2.metric[i][j];
      l.basis[n1 + i][n1 + j] = a * l2.basis[i][j];
    }
  if (l1.embedding && l2.embedding) {
    ExactMatrix e(n, ExactVector(n));
    for (std::size_t i = 0; i < n1; ++i)
      for (std::size_t j = 0; j < n1; ++j) e[i][j] = (*l1.embedding)[i][j];
    for (std::size_t i = 0; i < n2; ++i)
      for (std::size_t j = 0; j < n2; ++j) e[n1 + i][n1 + j] = (*l2.embedding)[i][j];
    l.embedding = std::move(e);
  }
  auto block = [&](const QMat& r, bool first) {
    QMat m = identity<Rational>(n);
    std::size_t off = first ? 0 : n1, k = first ? n1 : n2;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j) m[off + i][off + j] = r[i][j];
    return m;
  };
  for (const auto& r : l1.symmetry) l.symmetry.push_back(block(r, true));
  for (const auto& r : l2.symmetry) l.symmetry.push_back(block(r, false));
  l.validate();
  return l;
}

ProductOptimum product_optimum(double g1, double v1, std::size_t n1, double g2, double v2, std::size_t n2) {
  if (g1 <= 0 || g2 <= 0 || v1 <= 0 || v2 <= 0 || n1 == 0 || n2 == 0)
    fail(ErrorKind::Parameter, "product optimum needs positive inputs");
  ProductOptimum p;
  p.a_opt = std::pow(v1, 1.0 / static_cast<double>(n1)) / std::pow(v2, 1.0 / static_cast<double>(n2)) * std::sqrt(g1 / g2);
  const double n = static_cast<double>(n1 + n2);
  p.g_opt = std::exp((static_cast<double>(n1) * std::log(g1) + static_cast<double>(n2) * std::log(g2)) / n);
  return p;
}

double zador_bound(std::size_t n) {
  if (n < 1) fail(ErrorKind::Parameter, "dimension must be at least 1");
  const double nd = static_cast<double>(n);
  return std::exp(2.0 / nd * std::lgamma(1.0 + nd / 2.0)) / ((nd + 2.0) * M_PI);
}

RelevantVectorSet relevant_vectors(const Lattice& l, unsigned threads) {
  const std::size_t n = l.dim();
  if (n > 24) fail(ErrorKind::Parameter, "relevant vector enumeration limited to n <= 24");
  Enumerator e(l);
  const std::uint64_t cosets = (std::uint64_t{1} << n) - 1;
  threads = std::max(1u, threads);
  std::vector<std::vector<QVec>> found(threads);
  auto work = [&](unsigned t) {
    for (std::uint64_t c = 1 + t; c <= cosets; c += threads) {
      QVec target(n, Rational(0));
      for (std::size_t i = 0; i < n; ++i)
        if ((c >> i) & 1u)
          for (std::size_t j = 0; j < n; ++j) target[j] -= l.basis[i][j];
      for (auto& x : target) x /= 2;
      auto pts = closest_lattice_points(l, e, target);
      if (pts.size() != 2) continue;
      for (const auto& p : pts) {
        QVec v = sub(p, target);
        for (auto& x : v) x *= 2;
        found[t].push_back(std::move(v));
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  RelevantVectorSet r;
  for (auto& f : found)
    for (auto& v : f) r.vectors.push_back(std::move(v));
  std::sort(r.vectors.begin(), r.vectors.end(), canonical_less);
  r.vectors.erase(std::unique(r.vectors.begin(), r.vectors.end()), r.vectors.end());
  for (const auto& v : r.vectors) r.norms.push_back(norm2(v, l.metric));
  return r;
}

MonteCarloResult monte_carlo_G(const Lattice& l, std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (samples < 2) fail(ErrorKind::Parameter, "need at least two samples");
  const std::size_t n = l.dim();
  Enumerator e(l);
  DMat b = shadow(l.basis);
  threads = std::max(1u, threads);
  struct Acc {
    double s = 0, s2 = 0;
    std::uint64_t k = 0;
  };
  std::vector<Acc> acc(threads);
  auto work = [&](unsigned t) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(t)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uint64_t count = samples / threads + (t < samples % threads ? 1 : 0);
    DVec x(n);
    for (std::uint64_t s = 0; s < count; ++s) {
      std::fill(x.begin(), x.end(), 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        double u = uni(rng);
        for (std::size_t j = 0; j < n; ++j) x[j] += u * b[i][j];
      }
      double d = e.nearest(x);
      acc[t].s += d;
      acc[t].s2 += d * d;
      ++acc[t].k;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  double s = 0, s2 = 0;
  std::uint64_t k = 0;
  for (const auto& a : acc) {
    s += a.s;
    s2 += a.s2;
    k += a.k;
  }
  const double mean = s / static_cast<double>(k);
  const double var = (s2 / static_cast<double>(k) - mean * mean) * static_cast<double>(k) / static_cast<double>(k - 1);
  const double norm = static_cast<double>(n) * std::pow(l.volume(), 2.0 / static_cast<double>(n));
  return {mean / norm, std::sqrt(var / static_cast<double>(k)) / norm, k};
}

}  // namespace latq
