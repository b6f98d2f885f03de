#include <cmath>

#include "doctest.h"
#include "latq/error.hpp"
#include "latq/polynomial.hpp"

using namespace latq;

TEST_CASE("rational parsing is canonical") {
  CHECK(parse_rational("6/8") == Rational(3, 4));
  CHECK(to_string(parse_rational("6/8")) == "3/4");
  CHECK(parse_rational("-1.25") == Rational(-5, 4));
  CHECK(parse_rational("3e-2") == Rational(3, 100));
  CHECK(parse_rational("34/33") == Rational(34, 33));
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK(exact_root(Rational(729), 6) == Rational(3));
  CHECK_FALSE(exact_root(Rational(2), 2).has_value());
  CHECK(simplest_between(ratio(1130, 1000), ratio(1135, 1000)) == Rational(17, 15));
  auto sp = split_square(Integer(72));
  CHECK(sp.r == 6);
  CHECK(sp.s == 2);
}

TEST_CASE("quadratic arithmetic") {
  QuadraticNumber s3(0, 1, 3);
  QuadraticNumber x = QuadraticNumber(1) + s3;
  CHECK(x * (QuadraticNumber(1) - s3) == QuadraticNumber(-2));
  QuadraticNumber inv = QuadraticNumber(1) / x;
  CHECK(inv == QuadraticNumber(Rational(-1, 2), Rational(1, 2), 3));
  CHECK(std::abs(inv.to_double() - 0.36602540378443864676) < 1e-15);
  CHECK((s3 * s3).is_rational());
  CHECK_THROWS_AS(QuadraticNumber(0, 1, 4), Error);
}

TEST_CASE("exact scalar sign and shadow under cancellation") {
  ExactScalar y = ExactScalar(1351) - ExactScalar(780) * ExactScalar::sqrt_of(3);
  CHECK(y.sign() > 0);
  CHECK(std::abs(y.shadow() - 0.00037009627571104859185) / 0.00037009627571104859185 < 1e-12);
  ExactScalar z = ExactScalar(780) * ExactScalar::sqrt_of(3) - ExactScalar(1351);
  CHECK(z.sign() < 0);
  CHECK(ExactScalar::sqrt_of(12) == ExactScalar(2) * ExactScalar::sqrt_of(3));
  CHECK(ExactScalar::sqrt_of(16).is_rational());
}

TEST_CASE("field mismatch") {
  CHECK_THROWS_AS(ExactScalar::sqrt_of(2) + ExactScalar::sqrt_of(3), Error);
  try {
    (void)(ExactScalar::sqrt_of(2) * ExactScalar::sqrt_of(3));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FieldMismatch);
  }
}

TEST_CASE("exact scalar serialization round trip") {
  for (const char* s : {"3/4", "-7", "1/2+1/2*sqrt(3)", "-5/6*sqrt(2)", "2+sqrt(5)"}) {
    ExactScalar x = ExactScalar::parse(s);
    CHECK(ExactScalar::parse(x.to_string()) == x);
  }
  CHECK(ExactScalar::parse("sqrt(3)/2") == ExactScalar::parse("1/2*sqrt(3)"));
  CHECK(ExactScalar::parse("-sqrt(3)/2") == -ExactScalar::parse("1/2*sqrt(3)"));
  CHECK(ExactScalar::parse(" 1/2 ") == ExactScalar(Rational(1, 2)));
  CHECK_THROWS_AS(ExactScalar::parse("1/2*"), Error);
}

TEST_CASE("hexagon closed form in Q(sqrt 3)") {
  // 5/(36 sqrt 3) = 5 sqrt 3 / 108
  ExactScalar g = ExactScalar(5) / (ExactScalar(36) * ExactScalar::sqrt_of(3));
  CHECK(g == ExactScalar(Rational(5, 108)) * ExactScalar::sqrt_of(3));
  CHECK(std::abs(g.shadow() - 0.080187537387448022848) < 1e-15);
}

TEST_CASE("laurent fit recovers and rejects") {
  ParamPolynomial truth(std::map<int, ExactScalar>{{-1, ExactScalar(3)}, {1, ExactScalar(Rational(1, 7))},
                                                  {3, ExactScalar::sqrt_of(3)}});
  std::vector<std::pair<Rational, ExactScalar>> s;
  for (int i = 1; i <= 5; ++i) s.emplace_back(ratio(i, 3), truth.evaluate(ratio(i, 3)));
  ParamPolynomial fit = laurent_fit(s, {-1, 1, 3});
  CHECK(fit == truth);
  CHECK(fit.derivative().coefficient(-2) == ExactScalar(-3));

  std::vector<std::pair<Rational, ExactScalar>> bad;
  for (int i = 1; i <= 5; ++i) bad.emplace_back(Rational(i), ExactScalar(pow(Rational(i), 5)));
  CHECK_THROWS_AS(laurent_fit(bad, {-1, 1, 3}), Error);
  try {
    laurent_fit(bad, {-1, 1, 3});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FitMismatch);
  }
  CHECK_THROWS_AS(laurent_fit({s[0], s[1]}, {-1, 1, 3}), Error);
}

TEST_CASE("sturm isolation with double and rational roots") {
  // (v - 1)^2 (v - 17/15)^2 (v^2 - 2)
  Polynomial a(std::vector<ExactScalar>{ExactScalar(-1), ExactScalar(1)});
  Polynomial b(std::vector<ExactScalar>{ExactScalar(Rational(-17, 15)), ExactScalar(1)});
  Polynomial c(std::vector<ExactScalar>{ExactScalar(-2), ExactScalar(0), ExactScalar(1)});
  Polynomial f = a * a * b * b * c;
  auto roots = isolate_positive_roots(f);
  REQUIRE(roots.size() == 3);
  CHECK(roots[0].lo < 1);
  CHECK(roots[0].hi > 1);
  auto r1 = refine(roots[1], f, Rational(1, 1000000));
  REQUIRE(r1.exact.has_value());
  CHECK(*r1.exact == Rational(17, 15));
  auto r2 = refine(roots[2], f, Rational(1, 1000000000));
  CHECK(std::abs(r2.midpoint() - std::sqrt(2.0)) < 1e-9);
  CHECK(r2.lo < r2.hi);
}

TEST_CASE("sturm counts match a float sign scan") {
  // (x - 1/3)(x - 1/2)(x - 2)(x + 5)(x - 7)
  Polynomial f(std::vector<ExactScalar>{ExactScalar(1)});
  for (Rational r : {Rational(1, 3), Rational(1, 2), Rational(2), Rational(-5), Rational(7)})
    f = f * Polynomial(std::vector<ExactScalar>{ExactScalar(-r), ExactScalar(1)});
  SturmChain ch(f);
  CHECK(ch.count(Rational(0), Rational(10)) == 4);
  CHECK(ch.count(Rational(-10), Rational(10)) == 5);
  CHECK(ch.count(Rational(1, 4), Rational(1)) == 2);
  auto roots = isolate_roots(f, Rational(0), Rational(3));
  CHECK(roots.size() == 3);
  int scan = 0;
  double prev = f.evaluate(0.001);
  for (int i = 1; i <= 3000; ++i) {
    double x = 0.001 + i * 0.001;
    double y = f.evaluate(x);
    if ((y < 0) != (prev < 0)) ++scan;
    prev = y;
  }
  CHECK(scan == 3);
}

TEST_CASE("optimality polynomial of the laminated 13-dimensional family") {
  // f(v) as published; its smallest positive root gives a_opt^2.
  std::vector<Rational> c = {
      Rational("-9696717442377617/758129207786496000"), Rational("-218456407528702627/79423059863347200"),
      Rational("8313434653636289/339414785740800"),     Rational("-1463538531346037/13576591429632"),
      Rational("6103268840516027/20570593075200"),      Rational("-1380927759566749/2285621452800"),
      Rational("22891056666353/23808556800"),           Rational("-75015034931287/63489484800"),
      Rational("2064191975273/1881169920"),             Rational("-64031957362571/84652646400"),
      Rational("5356418376637/14108774400"),            Rational("-2322631582151/17244057600"),
      Rational("1104395934223/34488115200"),            Rational("-136946795267/29889699840"),
      Rational("1239510953/4151347200")};
  std::vector<ExactScalar> ce;
  for (auto& q : c) {
    q.canonicalize();
    ce.emplace_back(q);
  }
  Polynomial f(ce);
  auto roots = isolate_positive_roots(f);
  REQUIRE(roots.size() == 1);
  auto r = refine(roots[0], f, Rational("1/1000000000000"));
  CHECK(std::abs(std::sqrt(r.midpoint()) - 1.0149980107) < 1e-10);
  CHECK(r.lo > 1);
  CHECK(r.hi < Rational(17, 15));
}
