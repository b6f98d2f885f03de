#include <random>

#include "doctest.h"
#include "latq/lattice.hpp"
#include "latq/linalg.hpp"

using namespace latq;

namespace {

Rational laplace(const QMat& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  Rational s = 0;
  for (std::size_t c = 0; c < n; ++c) {
    QMat minor;
    for (std::size_t i = 1; i < n; ++i) {
      QVec r;
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) r.push_back(m[i][j]);
      minor.push_back(r);
    }
    Rational t = m[0][c] * laplace(minor);
    s += (c % 2 == 0) ? t : Rational(-t);
  }
  return s;
}

}  // namespace

TEST_CASE("Bareiss determinant matches cofactor expansion") {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> d(-7, 7);
  for (std::size_t n = 1; n <= 6; ++n)
    for (int t = 0; t < 5; ++t) {
      QMat m(n, QVec(n));
      for (auto& r : m)
        for (auto& x : r) {
          x = ratio(d(rng), 1 + (d(rng) + 7) % 4);
          x.canonicalize();
        }
      CHECK(determinant(m) == laplace(m));
    }
  QMat sing = {{Rational(1), Rational(2)}, {Rational(2), Rational(4)}};
  CHECK(determinant(sing) == 0);
}

TEST_CASE("determinant in Q(sqrt 3)") {
  // det of the hexagonal generator [[1,0],[-1/2, sqrt3/2]] is sqrt3/2
  ExactMatrix b = {{ExactScalar(1), ExactScalar(0)}, {ExactScalar(Rational(-1, 2)), ExactScalar::sqrt_of(3) / ExactScalar(2)}};
  CHECK(determinant(b) == ExactScalar::sqrt_of(3) / ExactScalar(2));
  CHECK(gram_det(b) == ExactScalar(Rational(3, 4)));
}

TEST_CASE("vertex lift") {
  QMat id = identity<Rational>(2);
  QVec v = solve_vertex_lift({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}}, id);
  CHECK(v == QVec{Rational(1, 2), Rational(1, 2)});
  CHECK_THROWS_AS(solve_vertex_lift({{Rational(1), Rational(0)}, {Rational(2), Rational(0)}}, id), Error);
  // A2 in root coordinates: the vertex between alpha1 and alpha1 + alpha2
  Lattice a2 = catalog_lattice("A2");
  QVec w = solve_vertex_lift({{Rational(1), Rational(0)}, {Rational(1), Rational(1)}}, a2.metric);
  CHECK(w == QVec{Rational(2, 3), Rational(1, 3)});
  CHECK(norm2(w, a2.metric) == Rational(1, 3));
  ExactMatrix cart = {{ExactScalar(1), ExactScalar(0)}, {ExactScalar(0), ExactScalar(1)}};
  CHECK(solve_vertex_lift(cart) == ExactVector{ExactScalar(Rational(1, 2)), ExactScalar(Rational(1, 2))});
}

TEST_CASE("projection and Gram determinants") {
  QMat id = identity<Rational>(3);
  QVec p = project_complement({Rational(1), Rational(2), Rational(3)}, {{Rational(1), Rational(1), Rational(0)}}, id);
  CHECK(p == QVec{Rational(-1, 2), Rational(1, 2), Rational(3)});
  CHECK(inner(p, {Rational(1), Rational(1), Rational(0)}, id) == 0);
  CHECK(gram_det({{Rational(1), Rational(1), Rational(0)}, {Rational(0), Rational(1), Rational(1)}}, id) == 3);
  ExactVector q = project_complement(ExactVector{ExactScalar(1), ExactScalar::sqrt_of(3)}, ExactMatrix{{ExactScalar(1), ExactScalar(0)}});
  CHECK(q == ExactVector{ExactScalar(0), ExactScalar::sqrt_of(3)});
}

TEST_CASE("float rank agrees with exact rank on catalog vector sets") {
  for (const char* name : {"Z3", "A2", "A3", "D4", "K12"}) {
    Lattice l = catalog_lattice(name);
    auto r = relevant_vectors(l);
    QMat some(r.vectors.begin(), r.vectors.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(r.vectors.size(), 40)));
    CHECK(rank_float(shadow(some), 1e-9) == rank(some));
    // a rank-deficient selection: differences inside one hyperplane
    QMat flat;
    for (const auto& v : some) {
      QVec w = v;
      w.back() = 0;
      flat.push_back(w);
    }
    CHECK(rank_float(shadow(flat), 1e-9) == rank(flat));
  }
}

TEST_CASE("inverse and solve") {
  QMat m = {{Rational(2), Rational(1)}, {Rational(1), Rational(1)}};
  auto inv = inverse(m);
  REQUIRE(inv.has_value());
  CHECK(matmul(m, *inv) == identity<Rational>(2));
  CHECK_FALSE(inverse(QMat{{Rational(1), Rational(1)}, {Rational(1), Rational(1)}}).has_value());
  auto x = solve(m, {Rational(3), Rational(2)});
  REQUIRE(x.has_value());
  CHECK(*x == QVec{Rational(1), Rational(1)});
}
