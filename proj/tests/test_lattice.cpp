#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "latq/lattice.hpp"

using namespace latq;

namespace {

// All lattice points with coefficients in [-k, k]^n.
std::vector<QVec> box_points(const Lattice& l, int k) {
  const std::size_t n = l.dim();
  std::vector<QVec> pts;
  std::vector<int> z(n, -k);
  while (true) {
    QVec p(n, Rational(0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p[j] += Rational(z[i]) * l.basis[i][j];
    pts.push_back(p);
    std::size_t i = 0;
    while (i < n && z[i] == k) z[i++] = -k;
    if (i == n) break;
    ++z[i];
  }
  return pts;
}

std::vector<QVec> brute_closest(const Lattice& l, const QVec& x, int k = 4) {
  std::vector<QVec> best;
  Rational bd;
  for (const auto& p : box_points(l, k)) {
    Rational d = norm2(sub(x, p), l.metric);
    if (best.empty() || d < bd) {
      best = {p};
      bd = d;
    } else if (d == bd) {
      best.push_back(p);
    }
  }
  std::sort(best.begin(), best.end(), canonical_less);
  return best;
}

// Relevant vectors by brute force: per coset of 2L, the minimal vectors, kept when exactly +-v.
std::vector<QVec> brute_relevant(const Lattice& l, int k) {
  const std::size_t n = l.dim();
  std::map<std::vector<int>, std::vector<QVec>> best;
  std::map<std::vector<int>, Rational> bn;
  std::vector<int> z(n, -k);
  while (true) {
    std::vector<int> par(n);
    bool zero = true;
    for (std::size_t i = 0; i < n; ++i) {
      par[i] = ((z[i] % 2) + 2) % 2;
      zero &= par[i] == 0;
    }
    if (!zero) {
      QVec p(n, Rational(0));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) p[j] += Rational(z[i]) * l.basis[i][j];
      Rational d = norm2(p, l.metric);
      auto it = bn.find(par);
      if (it == bn.end() || d < it->second) {
        bn[par] = d;
        best[par] = {p};
      } else if (d == it->second) {
        best[par].push_back(p);
      }
    }
    std::size_t i = 0;
    while (i < n && z[i] == k) z[i++] = -k;
    if (i == n) break;
    ++z[i];
  }
  std::vector<QVec> out;
  for (auto& [par, vs] : best)
    if (vs.size() == 2)
      for (auto& v : vs) out.push_back(v);
  std::sort(out.begin(), out.end(), canonical_less);
  return out;
}

Lattice random_lattice(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> d(-900, 900);
  QMat b;
  do {
    b.assign(n, QVec(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        b[i][j] = ratio(d(rng) + (i == j ? 2000 : 0), 997);
        b[i][j].canonicalize();
      }
  } while (determinant(b) == 0);
  Lattice l;
  l.name = "random";
  l.metric = identity<Rational>(n);
  l.basis = b;
  l.validate();
  return l;
}

}  // namespace

TEST_CASE("closest points on simple lattices") {
  Lattice z2 = catalog_lattice("Z2");
  CHECK(closest_lattice_points(z2, {Rational(1, 2), Rational(0)}).size() == 2);
  CHECK(closest_lattice_points(z2, {Rational(1, 2), Rational(1, 2)}).size() == 4);
  CHECK(closest_lattice_points(z2, {Rational(1, 3), Rational(0)}).size() == 1);
  Lattice a2 = catalog_lattice("A2");
  // centroid of the triangle 0, alpha1, alpha1 + alpha2
  auto pts = closest_lattice_points(a2, {Rational(2, 3), Rational(1, 3)});
  CHECK(pts.size() == 3);
  CHECK(pts == brute_closest(a2, {Rational(2, 3), Rational(1, 3)}));
}

TEST_CASE("closest points agree with a coefficient-box search") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-12, 12);
  for (const char* name : {"Z3", "A2", "A3", "D3", "D4"}) {
    Lattice l = catalog_lattice(name);
    for (int t = 0; t < 12; ++t) {
      QVec x(l.dim());
      for (auto& c : x) c = ratio(d(rng), 6);
      CHECK(closest_lattice_points(l, x) == brute_closest(l, x, 3));
    }
  }
  for (unsigned seed = 1; seed <= 4; ++seed) {
    Lattice l = random_lattice(3, seed);
    QVec x = {Rational(1, 3), Rational(-2, 7), Rational(5, 11)};
    CHECK(closest_lattice_points(l, x) == brute_closest(l, x, 4));
  }
}

TEST_CASE("relevant vector counts and brute-force agreement") {
  CHECK(relevant_vectors(catalog_lattice("Z2")).vectors.size() == 4);
  CHECK(relevant_vectors(catalog_lattice("A2")).vectors.size() == 6);
  CHECK(relevant_vectors(catalog_lattice("Z3")).vectors.size() == 6);
  CHECK(relevant_vectors(catalog_lattice("A3")).vectors.size() == 12);
  CHECK(relevant_vectors(catalog_lattice("D4")).vectors.size() == 24);
  for (const char* name : {"Z2", "A2", "Z3", "A3", "D3", "D4"}) {
    Lattice l = catalog_lattice(name);
    CHECK(relevant_vectors(l).vectors == brute_relevant(l, 3));
  }
}

TEST_CASE("relevant vectors: bound, negation closure and generic count") {
  for (unsigned seed = 11; seed <= 14; ++seed) {
    Lattice l = random_lattice(3, seed);
    auto r = relevant_vectors(l, 2);
    CHECK(r.vectors.size() == 14);
    CHECK(r.vectors == brute_relevant(l, 4));
  }
  Lattice l = catalog_lattice("D4");
  auto r = relevant_vectors(l);
  for (const auto& v : r.vectors) {
    QVec m = v;
    for (auto& x : m) x = -x;
    CHECK(std::binary_search(r.vectors.begin(), r.vectors.end(), m, canonical_less));
    for (const auto& w : r.vectors) CHECK(inner(v, w, l.metric) <= norm2(w, l.metric));
  }
}

TEST_CASE("catalog construction") {
  Lattice k = catalog_lattice("K12");
  CHECK(k.dim() == 12);
  CHECK(k.symmetry.size() == 3);
  auto v = k.exact_volume();
  REQUIRE(v.has_value());
  CHECK(*v == ExactScalar(27));
  QVec h = k12_deep_hole_frame();
  CHECK(norm2(h, k.metric) == Rational(8, 3));
  Lattice a2 = catalog_lattice("A2");
  CHECK(*a2.exact_volume() == ExactScalar::sqrt_of(3) / ExactScalar(2));
  CHECK(catalog_lattice("D4").frame_volume() == 2);
  CHECK_THROWS_AS(catalog_lattice("Q7"), Error);
  Lattice lk = catalog_lattice("K12-laminated");
  CHECK(lk.dim() == 13);
  CHECK(lk.frame_volume() == Rational(34, 33));
  CHECK(*lk.exact_volume() == ExactScalar(Rational(306, 11)));
}

TEST_CASE("laminate and product constructors") {
  Lattice z1 = catalog_lattice("Z1");
  Lattice l = laminate(z1, {Rational(1, 2)}, Rational(1));
  CHECK(l.basis == QMat{{Rational(1), Rational(0)}, {Rational(1, 2), Rational(1)}});
  CHECK_THROWS_AS(laminate(z1, {Rational(1, 2)}, Rational(0)), Error);
  CHECK_THROWS_AS(laminate(z1, {Rational(1, 2)}, Rational(-1)), Error);
  Lattice p = product_lattice(catalog_lattice("A2"), z1, Rational(2));
  CHECK(p.dim() == 3);
  CHECK(p.symmetry.size() == 4);
  ProductOptimum zz = product_optimum(1.0 / 12, 1, 1, 1.0 / 12, 1, 1);
  CHECK(zz.a_opt == doctest::Approx(1.0));
  CHECK(zz.g_opt == doctest::Approx(1.0 / 12));
  const double gk = 797361941.0 / (6567561000.0 * std::sqrt(3.0));
  ProductOptimum kz = product_optimum(gk, 27, 12, 1.0 / 12, 1, 1);
  CHECK(std::abs(kz.g_opt - 0.071034583) < 5e-10);
}

TEST_CASE("zador bound") {
  CHECK(zador_bound(1) == doctest::Approx(1.0 / 12).epsilon(1e-14));
  CHECK(zador_bound(2) == doctest::Approx(1.0 / (4 * M_PI)).epsilon(1e-14));
  CHECK(zador_bound(13) < 0.0699012856);
  CHECK_THROWS_AS(zador_bound(0), Error);
}

TEST_CASE("monte carlo second moment") {
  auto z = monte_carlo_G(catalog_lattice("Z2"), 1000000, 1);
  CHECK(std::abs(z.g - 1.0 / 12) < 3 * z.stderr_g);
  auto a = monte_carlo_G(catalog_lattice("A2"), 1000000, 2, 2);
  CHECK(std::abs(a.g - 5.0 / (36 * std::sqrt(3.0))) < 3 * a.stderr_g);
  auto again = monte_carlo_G(catalog_lattice("A2"), 1000000, 2, 2);
  CHECK(again.g == a.g);
}

TEST_CASE("K12 relevant vectors") {
  Lattice k = catalog_lattice("K12");
  auto r = relevant_vectors(k);
  CHECK(r.vectors.size() == 4788);
  std::map<Rational, int> by_norm;
  for (const auto& q : r.norms) ++by_norm[q];
  CHECK(by_norm[Rational(4)] == 756);
  CHECK(by_norm[Rational(6)] == 4032);
}

TEST_CASE("laminated K12 relevant vectors at a = 34/33") {
  Lattice l = catalog_lattice("K12-laminated", Rational(34, 33));
  CHECK(relevant_vectors(l).vectors.size() == 7706);
}
