#include "latq/family.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "latq/error.hpp"
#include "../exact/mpfr_format.hpp"

namespace latq {

namespace {

std::vector<int> default_basis(std::size_t n) {
  std::vector<int> b = {-1};
  for (int k = 1; k <= 2 * static_cast<int>(n) + 1; k += 2) b.push_back(k);
  return b;
}

ExactScalar family_volume(const Lattice& base, const QVec& offset) {
  auto v = laminate(base, offset, Rational(1)).exact_volume();
  if (!v) fail(ErrorKind::Unsupported, "the family volume is not in a quadratic field");
  return *v;
}

FamilySample sample_from(const Rational& a, const Analysis& an) {
  FamilySample s;
  s.a = a;
  s.result = an.moments;
  const std::size_t n = s.result.n;
  if (!s.result.u || !s.result.volume) fail(ErrorKind::Unsupported, "sample volume is not exact");
  s.u_nn = *s.result.volume * ExactScalar(s.result.mean_tensor[n - 1][n - 1]);
  s.relevant = an.relevant.vectors.size();
  return s;
}

}  // namespace

ParametricFamily analyze_family(const Lattice& base, const QVec& offset, const Rational& a0,
                                const FamilyOptions& opt) {
  if (a0 <= 0) fail(ErrorKind::Parameter, "family parameter must be positive");
  if (opt.spacing <= 0) fail(ErrorKind::Parameter, "sample spacing must be positive");
  ParametricFamily f;
  f.base = base;
  f.offset = offset;
  f.a0 = a0;
  f.n = base.dim() + 1;
  f.volume = family_volume(base, offset);
  const std::size_t k = std::max(opt.samples, f.n + 3);
  const long mid = static_cast<long>(k / 2);

  std::optional<ClassStructure> first;
  auto run = [&](long i) {
    Rational a = a0 * (1 + Rational(i - mid) * opt.spacing);
    if (a <= 0) fail(ErrorKind::Parameter, "sample spacing reaches a <= 0");
    auto an = std::make_shared<Analysis>(analyze(laminate(base, offset, a), opt.analysis));
    ClassStructure s = class_structure(*an->vertices, an->hierarchy);
    if (!first) {
      first = s;
    } else if (!(s == *first) || an->relevant.vectors.size() != f.samples.front().relevant) {
      std::ostringstream os;
      os << "class structure at a = " << a << " differs from a = " << f.samples.front().a;
      fail(ErrorKind::CriticalValueCrossed, os.str());
    }
    f.samples.push_back(sample_from(a, *an));
    if (a == a0) f.reference = std::move(an);
  };
  for (long i = 0; i < static_cast<long>(k); ++i) run(i);
  f.structure = *first;

  auto fit = [&] {
    std::vector<std::pair<Rational, ExactScalar>> pts;
    for (const FamilySample& s : f.samples) pts.emplace_back(s.a, *s.result.u);
    return laurent_fit(pts, f.basis);
  };
  f.basis = default_basis(f.n);
  try {
    f.u = fit();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::FitMismatch) throw;
    f.basis.push_back(f.basis.back() + 2);
    f.basis.push_back(f.basis.back() + 2);
    run(static_cast<long>(k));
    run(static_cast<long>(k) + 1);
    try {
      f.u = fit();
    } catch (const Error& e2) {
      if (e2.kind() != ErrorKind::FitMismatch) throw;
      fail(ErrorKind::Basis, "U(a) does not fit the Laurent basis");
    }
  }
  std::sort(f.samples.begin(), f.samples.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  return f;
}

// ---- validity window ---------------------------------------------------------------------

namespace {

// Values at three or more nodes; exact interpolation of degree <= deg, checked on the rest.
std::optional<Polynomial> interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys,
                                      std::size_t deg) {
  QMat v;
  QVec rhs;
  for (std::size_t i = 0; i <= deg; ++i) {
    QVec row;
    Rational p = 1;
    for (std::size_t j = 0; j <= deg; ++j, p *= xs[i]) row.push_back(p);
    v.push_back(std::move(row));
    rhs.push_back(ys[i]);
  }
  auto c = solve(v, rhs);
  if (!c) fail(ErrorKind::DegenerateInput, "interpolation nodes coincide");
  std::vector<ExactScalar> coeffs(c->begin(), c->end());
  Polynomial p(coeffs);
  for (std::size_t i = deg + 1; i < xs.size(); ++i)
    if (!(p.evaluate(xs[i]) == ExactScalar(ys[i]))) return std::nullopt;
  return p;
}

// Primitive integer form with positive leading coefficient, for deduplication.
std::vector<Rational> normalized(const Polynomial& p) {
  std::vector<Rational> c;
  for (const ExactScalar& x : p.coefficients()) c.push_back(x.rational());
  Rational lead = c.back();
  for (Rational& x : c) x /= lead;
  return c;
}

struct Root {
  const Polynomial* poly;
  IsolatingInterval iv;
};

// Exact ordering of two real roots given by isolating intervals.
int compare_roots(Root x, Root y) {
  for (int round = 0;; ++round) {
    if (x.iv.exact && y.iv.exact) return *x.iv.exact < *y.iv.exact ? -1 : (*x.iv.exact == *y.iv.exact ? 0 : 1);
    if (x.iv.hi < y.iv.lo) return -1;
    if (y.iv.hi < x.iv.lo) return 1;
    if (round > 4) {
      Polynomial g = gcd(*x.poly, *y.poly);
      Rational lo = std::max(x.iv.lo, y.iv.lo), hi = std::min(x.iv.hi, y.iv.hi);
      if (g.degree() > 0 && SturmChain(g).count(lo, hi) > 0 && g.evaluate(lo).sign() != 0 &&
          g.evaluate(hi).sign() != 0)
        return 0;
    }
    x.iv = refine(x.iv, *x.poly, (x.iv.hi - x.iv.lo) / 1024);
    y.iv = refine(y.iv, *y.poly, (y.iv.hi - y.iv.lo) / 1024);
  }
}

QVec lattice_coords(const Lattice& l, const QVec& x) { return l.coordinates(x); }

struct CoordLess {
  bool operator()(const QVec& a, const QVec& b) const { return canonical_less(a, b); }
};
using CoordSet = std::set<QVec, CoordLess>;

// Rational a with a^2 on the given side of v (inside the window).
Rational sqrt_inside(const Rational& v, bool above) {
  Rational a(std::sqrt(v.get_d()));
  Rational step(1, 1000000000);
  while (above ? a * a <= v : a * a >= v) a = above ? Rational(a + step * a) : Rational(a - step * a);
  return a;
}

}  // namespace

std::string WindowBound::describe() const {
  if (v.exact) {
    if (auto r = exact_root(*v.exact, 2)) return r->get_str();
    return "sqrt(" + v.exact->get_str() + ")";
  }
  std::ostringstream os;
  os.precision(17);
  os << std::sqrt(v.midpoint());
  return os.str();
}

bool ValidityWindow::contains(const Rational& a) const {
  Rational v = a * a;
  auto below = [&](const WindowBound& b) { return b.v.exact ? v < *b.v.exact : v <= b.v.lo; };
  auto above = [&](const WindowBound& b) { return b.v.exact ? v > *b.v.exact : v >= b.v.hi; };
  return a > 0 && (!lower || above(*lower)) && (!upper || below(*upper));
}

std::string ValidityWindow::describe() const {
  return "[" + (lower ? lower->describe() : std::string("0")) + ", " + (upper ? upper->describe() : std::string("inf")) +
         "]";
}

ValidityWindow validity_window(const ParametricFamily& f, const FamilyOptions& opt) {
  if (!f.reference) fail(ErrorKind::Dependency, "family has no analysis at a0");
  const Analysis& ref = *f.reference;
  const VertexSet& vs = *ref.vertices;
  const Lattice& l0 = ref.lattice();
  const std::size_t n = f.n;
  const Rational u0 = f.a0 * f.a0;
  auto at = [&](const Rational& a) { return laminate(f.base, f.offset, a); };
  auto is_zero = [](const QVec& x) {
    return std::all_of(x.begin(), x.end(), [](const Rational& q) { return sgn(q) == 0; });
  };

  // interpolation nodes in a; vertex conditions are affine in u = a^2, three extra nodes check it
  std::vector<Rational> nodes;
  for (int j = 1; j <= 5; ++j) nodes.push_back(f.a0 * ratio(8 + j, 8));
  std::vector<Lattice> lat;
  std::vector<Rational> us;
  for (const Rational& a : nodes) {
    lat.push_back(at(a));
    us.push_back(a * a);
  }

  struct RepVertex {
    std::vector<QVec> chosen;  // n independent normals, lattice coordinates
    std::vector<QVec> xm;      // x M at each node
    CoordSet tight;            // nonzero nearest lattice points at a0, lattice coordinates
  };
  std::vector<RepVertex> reps;
  for (std::size_t c = 0; c < vs.classes(); ++c) {
    const std::uint32_t v = vs.representative(c);
    auto nv = vs.normals(v);
    RepVertex rep;
    DMat rows;
    for (Point p : nv) rows.push_back(shadow(ref.relevant.vectors[p]));
    for (std::size_t i : independent_rows(rows, n))
      rep.chosen.push_back(lattice_coords(l0, ref.relevant.vectors[nv[i]]));
    if (rep.chosen.size() != n) fail(ErrorKind::RankDeficiency, "vertex normals do not span");
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      QMat r;
      for (const QVec& zc : rep.chosen) r.push_back(vecmat(zc, lat[j].basis));
      rep.xm.push_back(vecmat(solve_vertex_lift(r, lat[j].metric), lat[j].metric));
    }
    for (const QVec& p : closest_lattice_points(l0, vs.coords(v)))
      if (!is_zero(p)) rep.tight.insert(lattice_coords(l0, p));
    reps.push_back(std::move(rep));
  }
  auto vertex_at = [&](const RepVertex& rep, const Lattice& la) {
    QMat r;
    for (const QVec& zc : rep.chosen) r.push_back(vecmat(zc, la.basis));
    return solve_vertex_lift(r, la.metric);
  };

  // Candidate lattice vectors: everything within twice the covering radius, collected at a0
  // and again at the window ends until no new vector shows up.
  CoordSet candidates;
  std::map<std::vector<Rational>, Polynomial> polys;
  auto add_candidates = [&](const Lattice& la) {
    Rational r2 = 0;
    for (const RepVertex& rep : reps) r2 = std::max(r2, norm2(vertex_at(rep, la), la.metric));
    Enumerator e(la);
    bool fresh = false;
    for (const auto& zi : e.within(DVec(n, 0.0), 4 * r2.get_d() * (1 + 1e-9) + 1e-12)) {
      QVec zc;
      for (std::int64_t x : zi) zc.push_back(Rational(static_cast<long>(x)));
      if (is_zero(zc) || !candidates.insert(zc).second) continue;
      fresh = true;
      for (const RepVertex& rep : reps) {
        std::vector<Rational> vals;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
          QVec x = vecmat(zc, lat[j].basis);
          vals.push_back(norm2(x, lat[j].metric) - 2 * dot(rep.xm[j], x));
        }
        auto p = interpolate(us, vals, 1);
        if (!p) fail(ErrorKind::Consistency, "vertex condition is not affine in a^2");
        if (p->is_zero()) continue;  // tight for every a
        if (p->evaluate(u0).sign() == 0) fail(ErrorKind::InconsistentSample, "a0 is a critical value");
        if (p->degree() > 0) polys.emplace(normalized(*p), *p);
      }
    }
    return fresh;
  };

  ValidityWindow w;
  auto bound = [&] {
    std::optional<Root> lo, hi;
    for (const auto& [key, p] : polys) {
      for (IsolatingInterval iv : isolate_positive_roots(p)) {
        while (!iv.exact && iv.lo < u0 && iv.hi > u0) iv = refine(iv, p, (iv.hi - iv.lo) / 2);
        Root r{&p, iv};
        bool below = iv.exact ? *iv.exact < u0 : iv.hi <= u0;
        if (below) {
          if (!lo || compare_roots(r, *lo) > 0) lo = r;
        } else if (!hi || compare_roots(r, *hi) < 0) {
          hi = r;
        }
      }
    }
    w.lower.reset();
    w.upper.reset();
    if (lo) w.lower = WindowBound{*lo->poly, lo->iv};
    if (hi) w.upper = WindowBound{*hi->poly, hi->iv};
    for (auto* b : {&w.lower, &w.upper})
      if (*b) (*b)->v = refine((*b)->v, (*b)->poly, Rational(1, 1000000) * ((*b)->v.hi - (*b)->v.lo));
  };
  // the rational points closest to the bounds: the bounds themselves when rational, else just inside
  auto inner = [&](const std::optional<WindowBound>& b, bool lower) -> std::pair<Rational, bool> {
    if (!b) return {lower ? Rational(f.a0 / 4) : Rational(f.a0 * 4), false};
    if (b->v.exact)
      if (auto r = exact_root(*b->v.exact, 2)) return {*r, true};
    return {sqrt_inside(lower ? b->v.hi : b->v.lo, lower), false};
  };

  add_candidates(l0);
  std::pair<Rational, bool> lo_end, hi_end;
  for (int round = 0;; ++round) {
    bound();
    lo_end = inner(w.lower, true);
    hi_end = inner(w.upper, false);
    bool fresh = add_candidates(at(lo_end.first));
    fresh = add_candidates(at(hi_end.first)) || fresh;
    if (!fresh) break;
    if (round == 8) fail(ErrorKind::Consistency, "candidate vectors do not settle");
  }
  w.polynomials = polys.size();
  w.probe_lo = lo_end.first;
  w.probe_hi = hi_end.first;
  if (w.probe_lo >= w.probe_hi) fail(ErrorKind::InconsistentSample, "validity window is empty");

  // nearest points of the vertices and the relevant vectors at rational points
  CoordSet relevant0;
  for (const QVec& r : ref.relevant.vectors) relevant0.insert(lattice_coords(l0, r));
  auto check = [&](const Rational& a, bool endpoint) {
    Lattice la = at(a);
    for (const RepVertex& rep : reps) {
      QMat r;
      for (const QVec& zc : rep.chosen) r.push_back(vecmat(zc, la.basis));
      if (sgn(determinant(r)) == 0) continue;
      QVec x = solve_vertex_lift(r, la.metric);
      auto close = closest_lattice_points(la, x);
      bool origin = std::any_of(close.begin(), close.end(), is_zero);
      CoordSet tight;
      for (const QVec& p : close)
        if (!is_zero(p)) tight.insert(lattice_coords(la, p));
      bool ok = origin && (endpoint ? std::includes(tight.begin(), tight.end(), rep.tight.begin(), rep.tight.end(),
                                                    CoordLess{})
                                    : tight == rep.tight);
      if (!ok) {
        std::ostringstream os;
        os << "a representative vertex changes at a = " << a;
        fail(ErrorKind::InconsistentSample, os.str());
      }
    }
    if (endpoint) return;
    CoordSet rel;
    for (const QVec& r : relevant_vectors(la, opt.analysis.threads).vectors) rel.insert(lattice_coords(la, r));
    if (rel != relevant0) {
      std::ostringstream os;
      os << "relevant vectors change at a = " << a;
      fail(ErrorKind::InconsistentSample, os.str());
    }
  };
  check(w.probe_lo, lo_end.second);
  check(w.probe_hi, hi_end.second);
  w.points_checked = 2;
  for (std::size_t s = 1; s <= opt.window_points; ++s) {
    check(w.probe_lo + (w.probe_hi - w.probe_lo) * ratio(static_cast<long>(s), static_cast<long>(opt.window_points + 1)),
          false);
    ++w.points_checked;
  }
  return w;
}

// ---- optimum -----------------------------------------------------------------------------

Polynomial stationarity_polynomial(const ParametricFamily& f) {
  const Rational n(static_cast<unsigned long>(f.n));
  const ExactScalar front(n / (2 * (n - 1)));
  std::vector<ExactScalar> c;
  for (const auto& [k, ck] : f.u.coefficients()) {
    if (k < -1 || (k + 1) % 2 != 0) fail(ErrorKind::Basis, "U(a) has exponents outside the odd Laurent basis");
    std::size_t d = static_cast<std::size_t>((k + 1) / 2);
    if (c.size() <= d) c.resize(d + 1);
    c[d] += ck * ExactScalar(Rational(k - 1) - 2 / n) * front;
  }
  return Polynomial(c);
}

double family_g(const ParametricFamily& f, double a) {
  const double n = static_cast<double>(f.n);
  return f.u.evaluate(a) / (n * std::pow(f.volume.shadow() * a, 1 + 2 / n));
}

namespace {

// G at a = sqrt(v) with MPFR; returns the decimals of a and G.
std::pair<std::string, std::string> g_at(const ParametricFamily& f, const Rational& v, int digits) {
  const mpfr_prec_t prec = detail::bits_for(digits + 10);
  mpfr_t a, ak, u, t, vol;
  mpfr_inits2(prec, a, ak, u, t, vol, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_q(a, v.get_mpq_t(), MPFR_RNDN);
  mpfr_sqrt(a, a, MPFR_RNDN);
  mpfr_set_zero(u, 1);
  for (const auto& [k, ck] : f.u.coefficients()) {
    mpfr_pow_si(ak, a, k, MPFR_RNDN);
    detail::mpfr_set_exact(t, ck);
    mpfr_mul(t, t, ak, MPFR_RNDN);
    mpfr_add(u, u, t, MPFR_RNDN);
  }
  detail::mpfr_set_exact(vol, f.volume);
  mpfr_mul(vol, vol, a, MPFR_RNDN);
  // Vol^(1 + 2/n)
  mpfr_set_ui(t, static_cast<unsigned long>(f.n + 2), MPFR_RNDN);
  mpfr_div_ui(t, t, static_cast<unsigned long>(f.n), MPFR_RNDN);
  mpfr_pow(vol, vol, t, MPFR_RNDN);
  mpfr_mul_ui(vol, vol, static_cast<unsigned long>(f.n), MPFR_RNDN);
  mpfr_div(u, u, vol, MPFR_RNDN);
  std::pair<std::string, std::string> out{detail::mpfr_string(a, digits), detail::mpfr_string(u, digits)};
  mpfr_clears(a, ak, u, t, vol, static_cast<mpfr_ptr>(nullptr));
  return out;
}

}  // namespace

OptimizationResult minimize_g(const ParametricFamily& f, const ValidityWindow& w, int digits) {
  OptimizationResult r;
  r.f = stationarity_polynomial(f);
  if (r.f.is_zero()) fail(ErrorKind::DegenerateInput, "G is constant along the family");
  Rational lo = w.lower ? (w.lower->v.exact ? *w.lower->v.exact : w.lower->v.hi) : Rational(0);
  std::vector<IsolatingInterval> roots;
  if (w.upper) {
    Rational hi = w.upper->v.exact ? *w.upper->v.exact : w.upper->v.lo;
    roots = isolate_roots(r.f, lo, hi);
  } else {
    for (const IsolatingInterval& iv : isolate_positive_roots(r.f))
      if (iv.lo >= lo) roots.push_back(iv);
  }
  const Rational eps = pow(Rational(1, 10), digits + 10);
  if (!roots.empty()) {
    r.v_opt = refine(roots.front(), r.f, eps);
  } else {
    // no stationary point inside: report the better end of the probed range
    r.boundary = true;
    Rational ends[2] = {w.probe_lo * w.probe_lo, w.probe_hi * w.probe_hi};
    double g0 = family_g(f, w.probe_lo.get_d()), g1 = family_g(f, w.probe_hi.get_d());
    Rational v = g0 <= g1 ? ends[0] : ends[1];
    r.v_opt = IsolatingInterval{v, v, v};
  }
  Rational v = r.v_opt.exact ? *r.v_opt.exact : Rational((r.v_opt.lo + r.v_opt.hi) / 2);
  std::tie(r.a_decimal, r.g_decimal) = g_at(f, v, digits);
  r.a_opt = std::sqrt(v.get_d());
  r.g_opt = std::stod(r.g_decimal);
  const double h = 1e-4 * r.a_opt;
  r.second_order = family_g(f, r.a_opt + h) + family_g(f, r.a_opt - h) - 2 * family_g(f, r.a_opt) > 0;
  return r;
}

// ---- tensor ------------------------------------------------------------------------------

TensorDecomposition tensor_decomposition(const ParametricFamily& f) {
  const std::size_t n = f.n;
  const Rational nn(static_cast<unsigned long>(n));
  std::vector<std::pair<Rational, ExactScalar>> alpha, beta;
  for (const FamilySample& s : f.samples) {
    const SecondMomentResult& r = s.result;
    const QMat& q = r.mean_tensor;
    QMat minv = *inverse(laminate(f.base, f.offset, s.a).metric);
    // per unit volume: Q = (qa - qb/n) M^-1 + qb e e^T
    Rational qa = r.mean_scalar / nn;
    Rational qb = nn / (nn - 1) * (q[n - 1][n - 1] - qa);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        Rational want = (qa - qb / nn) * minv[i][j] + (i == n - 1 && j == n - 1 ? qb : Rational(0));
        if (q[i][j] != want) {
          std::ostringstream os;
          os << "tensor at a = " << s.a << " is not of the form alpha I + beta Z";
          fail(ErrorKind::Structure, os.str());
        }
      }
    alpha.emplace_back(s.a, *r.volume * ExactScalar(qa));
    beta.emplace_back(s.a, *r.volume * ExactScalar(qb));
  }
  TensorDecomposition t;
  t.alpha = laurent_fit(alpha, f.basis);
  t.beta = laurent_fit(beta, f.basis);
  // f(a^2)/a as a Laurent polynomial in a
  const ExactScalar front(nn / (2 * (nn - 1)));
  std::map<int, ExactScalar> expect;
  for (const auto& [k, ck] : f.u.coefficients()) expect[k] = ck * ExactScalar(Rational(k - 1) - 2 / nn) * front;
  t.beta_identity = t.beta == ParamPolynomial(expect);
  return t;
}

}  // namespace latq
