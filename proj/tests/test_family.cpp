#include "doctest.h"

#include <cmath>
#include <random>

#include "latq/error.hpp"
#include "latq/family.hpp"
#include "latq/naive.hpp"

using namespace latq;

namespace {

FamilyOptions quick() {
  FamilyOptions o;
  o.analysis.vertices.streak = 60;
  o.window_points = 16;
  return o;
}

const QVec kA2Hole = {Rational(2, 3), Rational(1, 3)};

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

double anisotropy(const ExactMatrix& t) {
  const std::size_t n = t.size();
  double tr = 0;
  for (std::size_t i = 0; i < n; ++i) tr += t[i][i].shadow();
  double s = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double d = t[i][j].shadow() - (i == j ? tr / static_cast<double>(n) : 0.0);
      s += d * d;
    }
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("Z1 with offset 1/2") {
  Lattice z1 = catalog_lattice("Z1");
  ParametricFamily f = analyze_family(z1, {Rational(1, 2)}, Rational(1), quick());
  CHECK(f.samples.size() == 5);
  ParamPolynomial closed(std::map<int, ExactScalar>{
      {-1, ExactScalar(Rational(-1, 192))}, {1, ExactScalar(Rational(1, 12))}, {3, ExactScalar(Rational(1, 12))}});
  CHECK(f.u == closed);
  // direct integration away from the samples
  for (Rational a : {Rational(3, 5), Rational(7, 4), Rational(3)}) {
    Lattice l = laminate(z1, {Rational(1, 2)}, a);
    NaiveCell cell = naive_cell(l, relevant_vectors(l).vectors);
    CHECK(f.u.evaluate(a) == ExactScalar(cell.second_moment));
  }

  ValidityWindow w = validity_window(f, quick());
  REQUIRE(w.lower);
  REQUIRE(w.lower->v.exact);
  CHECK(*w.lower->v.exact == Rational(1, 4));
  CHECK_FALSE(w.upper);
  CHECK(w.describe() == "[1/2, inf]");
  CHECK(w.contains(Rational(2, 3)));
  CHECK_FALSE(w.contains(Rational(1, 3)));

  // the optimum is the hexagonal lattice
  OptimizationResult r = minimize_g(f, w, 20);
  REQUIRE(r.v_opt.exact);
  CHECK(*r.v_opt.exact == Rational(3, 4));
  CHECK(r.g_decimal.substr(0, 18) == "0.0801875373874480");
  CHECK(r.second_order);
  CHECK_FALSE(r.boundary);

  TensorDecomposition t = tensor_decomposition(f);
  CHECK(t.beta_identity);
  CHECK(std::abs(t.beta.evaluate(std::sqrt(0.75))) < 1e-15);
  CHECK(t.alpha * ExactScalar(2) == f.u);
}

TEST_CASE("offset 0 is the product family") {
  ParametricFamily f = analyze_family(catalog_lattice("Z1"), {Rational(0)}, Rational(1, 2), quick());
  CHECK(f.u == ParamPolynomial(std::map<int, ExactScalar>{{1, ExactScalar(Rational(1, 12))},
                                                           {3, ExactScalar(Rational(1, 12))}}));
  ValidityWindow w = validity_window(f, quick());
  CHECK_FALSE(w.lower);
  CHECK_FALSE(w.upper);
  OptimizationResult r = minimize_g(f, w, 20);
  ProductOptimum p = product_optimum(1.0 / 12, 1, 1, 1.0 / 12, 1, 1);
  CHECK(r.a_opt == doctest::Approx(p.a_opt).epsilon(1e-15));
  CHECK(r.g_opt == doctest::Approx(p.g_opt).epsilon(1e-15));
  TensorDecomposition t = tensor_decomposition(f);
  CHECK(t.beta.evaluate(Rational(1)).is_zero());
  CHECK(t.beta_identity);
}

TEST_CASE("A2 stacked over deep holes reaches the body-centred cubic lattice") {
  Lattice a2 = catalog_lattice("A2");
  FamilyOptions o = quick();
  ParametricFamily f = analyze_family(a2, kA2Hole, Rational(1, 5), o);
  ValidityWindow w = validity_window(f, o);
  REQUIRE(w.upper);
  REQUIRE(w.upper->v.exact);
  CHECK(*w.upper->v.exact == Rational(1, 6));
  CHECK(w.contains(Rational(1, 5)));

  OptimizationResult r = minimize_g(f, w, 25);
  REQUIRE(r.v_opt.exact);
  CHECK(*r.v_opt.exact == Rational(1, 24));
  CHECK(w.contains(simplest_between(Rational(r.a_opt - 1e-9), Rational(r.a_opt + 1e-9))));
  const double bcc = 19.0 / (192.0 * std::cbrt(2.0));
  CHECK(r.g_opt == doctest::Approx(bcc).epsilon(1e-15));
  CHECK(r.g_decimal.substr(0, 12) == "0.0785432812");
  CHECK(r.second_order);

  TensorDecomposition t = tensor_decomposition(f);
  CHECK(t.beta_identity);
  // the stationarity polynomial and beta share the root
  Polynomial fv = stationarity_polynomial(f);
  CHECK(fv.evaluate(Rational(1, 24)).is_zero());

  // exact pipeline at rational approximants of a_opt: equal to the fit, isotropy improves
  const double aopt = r.a_opt;
  double last = 1e9;
  for (int k : {2, 4, 6}) {
    Rational eps(1, static_cast<unsigned long>(std::pow(10, k)));
    Rational lo(aopt), hi(aopt);
    Rational a = simplest_between(Rational(lo - eps), Rational(hi + eps));
    Analysis an = analyze(laminate(a2, kA2Hole, a), o.analysis);
    CHECK(*an.moments.u == f.u.evaluate(a));
    double aniso = anisotropy(*an.moments.tensor);
    CHECK(aniso < last);
    last = aniso;
  }

  // the cheap Monte Carlo estimate agrees
  Lattice best = laminate(a2, kA2Hole, simplest_between(Rational(aopt - 1e-9), Rational(aopt + 1e-9)));
  MonteCarloResult mc = monte_carlo_G(best, 200000, 7);
  CHECK(std::abs(mc.g - r.g_opt) < 3 * mc.stderr_g);
}

TEST_CASE("window soundness: random rationals inside keep the class structure") {
  Lattice a2 = catalog_lattice("A2");
  FamilyOptions o = quick();
  ParametricFamily f = analyze_family(a2, kA2Hole, Rational(1, 5), o);
  ValidityWindow w = validity_window(f, o);
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<long> d(1, 999);
  for (int i = 0; i < 16; ++i) {
    Rational a = w.probe_lo + (w.probe_hi - w.probe_lo) * ratio(d(rng), 1000);
    CAPTURE(a);
    REQUIRE(w.contains(a));
    Analysis an = analyze(laminate(a2, kA2Hole, a), o.analysis);
    CHECK(class_structure(*an.vertices, an.hierarchy) == f.structure);
  }
}

TEST_CASE("family errors") {
  Lattice z1 = catalog_lattice("Z1");
  // samples around a = 1/2 straddle the point where the hexagon becomes a rectangle
  CHECK(kind_of([&] { analyze_family(z1, {Rational(1, 2)}, Rational(1, 2), quick()); }) ==
        ErrorKind::CriticalValueCrossed);
  CHECK(kind_of([&] { analyze_family(z1, {Rational(1, 2)}, Rational(0), quick()); }) == ErrorKind::Parameter);

  // a generic offset leaves too little symmetry for the alpha/beta form
  ParametricFamily g = analyze_family(catalog_lattice("A2"), {Rational(1, 5), Rational(1, 7)}, Rational(1), quick());
  CHECK(kind_of([&] { tensor_decomposition(g); }) == ErrorKind::Structure);
}
