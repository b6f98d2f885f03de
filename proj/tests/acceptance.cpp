// Acceptance run: one PASS/FAIL line per criterion.
// Long criteria (K12 cell, laminated K12 family) run only with --long or LATQ_LONG_RUNS=1.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "latq/error.hpp"
#include "latq/family.hpp"
#include "latq/naive.hpp"

using namespace latq;

namespace {

// pinned tolerances
constexpr double kCubicSeconds = 60.0;
constexpr double kFloatAgreement = 1e-9;
constexpr double kSigmas = 3.0;
constexpr std::uint64_t kMcSamples = 10000000;
constexpr double kA2Decimal = 0.0801875;  // 6 digits
constexpr double kLamK12Aopt = 1.0149980107;
constexpr const char* kLamK12G = "0.0699012856";

struct Outcome {
  bool pass = false;
  std::string detail;
  bool unattainable = false;  // failed only where strict success is impossible
};

struct Criterion {
  std::string name;
  bool long_run = false;
  std::function<Outcome()> run;
  std::string unattainable;  // reason printed with an unattainable failure
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Log {
  std::ostringstream os;
  bool ok = true;
  void check(bool c, const std::string& what) {
    if (!c) {
      ok = false;
      os << "[" << what << "] ";
    }
  }
  Outcome done(const std::string& extra = "") const { return {ok, (ok ? "" : "failed: " + os.str()) + extra}; }
};

// Every lattice analyzed here, for the Zador line.
std::vector<std::pair<std::string, SecondMomentResult>> g_analyzed;

Analysis run(const Lattice& l, AnalysisOptions o = {}) {
  Analysis a = analyze(l, o);
  g_analyzed.emplace_back(l.name, a.moments);
  return a;
}

double off_proportionality(const ExactMatrix& t) {
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

Outcome cubic() {
  Log log;
  auto t0 = std::chrono::steady_clock::now();
  for (int n = 1; n <= 5; ++n) {
    Analysis a = run(catalog_lattice("Z" + std::to_string(n)));
    const SecondMomentResult& r = a.moments;
    log.check(r.g_exact && *r.g_exact == ExactScalar(Rational(1, 12)), "Z" + std::to_string(n) + " G");
    log.check(r.volume_certificate, "Z" + std::to_string(n) + " certificate");
  }
  double t = seconds_since(t0);
  log.check(t < kCubicSeconds, "runtime");
  std::ostringstream os;
  os << "G = 1/12 for n = 1..5 in " << t << " s";
  return log.done(os.str());
}

Outcome hexagonal() {
  Log log;
  auto t0 = std::chrono::steady_clock::now();
  Lattice a2 = catalog_lattice("A2");
  // closed form for the regular hexagon of inradius 1/2: U = 5 sqrt3 / 72, Vol = sqrt3 / 2
  const ExactScalar s3 = ExactScalar::sqrt_of(3);
  const ExactScalar g_closed = ExactScalar(Rational(5, 108)) * s3;
  // brute-force cell built without symmetry
  NaiveCell cell = naive_cell(a2, relevant_vectors(a2).vectors);
  log.check(cell.vertices.size() == 6, "naive vertices");
  log.check(ExactScalar(cell.second_moment) * s3 / 2 == ExactScalar(Rational(5, 72)) * s3, "naive U");

  Analysis a = run(a2);
  log.check(a.relevant.vectors.size() == 6, "relevant vectors");
  log.check(a.moments.g_exact && *a.moments.g_exact == g_closed, "exact G");
  log.check(std::abs(a.moments.g - kA2Decimal) < 5e-8, "decimal");
  std::ostringstream os;
  os << "G = " << (a.moments.g_exact ? a.moments.g_exact->to_string() : "?") << " = "
     << a.moments.g_decimal.substr(0, 12) << " in " << seconds_since(t0) << " s";
  return log.done(os.str());
}

Outcome relevant_counts() {
  Log log;
  auto t0 = std::chrono::steady_clock::now();
  std::size_t z2 = relevant_vectors(catalog_lattice("Z2")).vectors.size();
  std::size_t k12 = relevant_vectors(catalog_lattice("K12")).vectors.size();
  double tk = seconds_since(t0);
  std::size_t lam = relevant_vectors(catalog_lattice("K12-laminated", Rational(34, 33))).vectors.size();
  log.check(z2 == 4, "Z2");
  log.check(k12 == 4788, "K12");
  log.check(lam == 7706, "laminated K12");
  log.check(tk < 600, "K12 time");
  std::ostringstream os;
  os << "Z2 " << z2 << ", K12 " << k12 << ", laminated K12 (34/33) " << lam << " in " << seconds_since(t0) << " s";
  return log.done(os.str());
}

Outcome group_engine() {
  Log log;
  auto t0 = std::chrono::steady_clock::now();
  Lattice k = catalog_lattice("K12");
  RelevantVectorSet rv = relevant_vectors(k);
  auto g = lattice_group(k, rv, 1);
  log.check(g->order() == Integer("78382080"), "order");
  ClassifiedPoints cp(g);
  std::multiset<std::pair<std::size_t, std::string>> got;
  for (std::size_t c = 0; c < cp.classes(); ++c) {
    Integer stab = cp.rep_stabilizer(c)->order();
    log.check(stab * static_cast<unsigned long>(cp.orbit_size(c)) == g->order(), "orbit-stabilizer");
    got.insert({cp.orbit_size(c), stab.get_str()});
  }
  std::multiset<std::pair<std::size_t, std::string>> want = {{756, "103680"}, {4032, "19440"}};
  log.check(got == want, "facet orbits");

  Lattice lam = catalog_lattice("K12-laminated", Rational(34, 33));
  auto lg = lattice_group(lam, relevant_vectors(lam), 1);
  log.check(lg->order() == Integer("622080"), "laminated order");
  std::ostringstream os;
  os << "|G| = " << g->order() << ", facet orbits 4032/756 with stabilizers 19440/103680, laminated |G| = "
     << lg->order() << " in " << seconds_since(t0) << " s";
  return log.done(os.str());
}

Outcome k12_headline() {
  Log log;
  auto t0 = std::chrono::steady_clock::now();
  Analysis a = run(catalog_lattice("K12"));
  std::vector<std::size_t> want = {8, 22, 48, 93, 149, 185, 154, 86, 40, 15, 6, 2, 1};
  log.check(a.hierarchy.class_counts() == want, "class counts");
  log.check(a.hierarchy.total_classes() == 809, "809 classes");
  const ExactScalar s3 = ExactScalar::sqrt_of(3);
  // 797361941/(6567561000 sqrt3) = 797361941 sqrt3 / 19702683000
  log.check(a.moments.g_exact && *a.moments.g_exact == ExactScalar(ratio(797361941, 19702683000L)) * s3, "G");
  log.check(a.moments.volume && *a.moments.volume == ExactScalar(27), "Vol = 27");
  log.check(a.moments.volume_certificate, "certificate");
  bool u_ok = a.moments.tensor.has_value();
  if (u_ok)
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j)
        u_ok = u_ok && (*a.moments.tensor)[i][j] == ExactScalar(i == j ? ratio(797361941, 243243000) : Rational(0));
  log.check(u_ok, "U tensor");
  std::ostringstream os;
  os << "809 classes, G = " << a.moments.g_decimal.substr(0, 14) << ", Vol 27 in " << seconds_since(t0) << " s";
  return log.done(os.str());
}

Outcome a2_family() {
  Log log;
  auto t0 = std::chrono::steady_clock::now();
  Lattice a2 = catalog_lattice("A2");
  FamilyOptions o;
  ParametricFamily f = analyze_family(a2, deep_hole(a2), Rational(1, 5), o);
  ValidityWindow w = validity_window(f, o);
  OptimizationResult r = minimize_g(f, w, 30);
  log.check(!r.boundary && r.second_order, "interior minimum");

  const QVec h = f.offset;
  double last = 1e300;
  std::ostringstream os;
  os << "a_opt " << r.a_decimal.substr(0, 14) << ", G " << r.g_decimal.substr(0, 14) << "; off-proportionality";
  for (int k : {2, 4, 6}) {
    Rational eps = 1 / pow(Rational(10), k);
    Rational a = simplest_between(Rational(Rational(r.a_opt) - eps), Rational(Rational(r.a_opt) + eps));
    Analysis an = run(laminate(a2, h, a));
    log.check(*an.moments.u == f.u.evaluate(a), "U fit at approximant");
    double d = off_proportionality(*an.moments.tensor);
    os << " " << d;
    log.check(d < last, "isotropy");
    last = d;
  }
  Rational best = simplest_between(Rational(r.a_opt - 1e-9), Rational(r.a_opt + 1e-9));
  MonteCarloResult mc = monte_carlo_G(laminate(a2, h, best), kMcSamples, 2024);
  log.check(std::abs(mc.g - r.g_opt) <= kSigmas * mc.stderr_g, "Monte Carlo");
  os << "; MC " << mc.g << " +- " << mc.stderr_g << " in " << seconds_since(t0) << " s";
  return log.done(os.str());
}

Outcome laminated_k12() {
  Log log;
  auto t0 = std::chrono::steady_clock::now();
  Lattice k = catalog_lattice("K12");
  FamilyOptions o;
  ParametricFamily f = analyze_family(k, deep_hole(k), Rational(34, 33), o);
  ValidityWindow w = validity_window(f, o);
  log.check(w.lower && w.lower->v.exact && *w.lower->v.exact == 1, "lower bound 1");
  log.check(w.upper && w.upper->v.exact && *w.upper->v.exact == Rational(17, 15), "upper bound sqrt(17/15)");
  OptimizationResult r = minimize_g(f, w, 30);
  const double lo = std::sqrt(r.v_opt.lo.get_d()), hi = std::sqrt(r.v_opt.hi.get_d());
  log.check(lo <= kLamK12Aopt + 5e-11 && kLamK12Aopt - 5e-11 <= hi, "a_opt interval");
  log.check(r.g_decimal.substr(0, 12) == kLamK12G, "G to 10 digits");
  TensorDecomposition t = tensor_decomposition(f);
  log.check(t.beta_identity, "beta identity");
  std::ostringstream os;
  os << "window " << w.describe() << ", a_opt " << r.a_decimal.substr(0, 14) << ", G " << r.g_decimal.substr(0, 14)
     << " in " << seconds_since(t0) << " s";
  return log.done(os.str());
}

Outcome properties() {
  Log log;
  std::ostringstream os;
  for (const char* name : {"Z2", "Z3", "A2", "A3", "D4"}) {
    const std::string tag = name;
    Lattice l = catalog_lattice(name);
    Analysis a = run(l);
    const VertexSet& vs = *a.vertices;
    // exact vertex inequalities: the tight set recomputed from scratch equals the stored key
    bool ineq = true, wit = true;
    for (std::uint32_t v = 0; v < vs.size(); ++v) {
      auto key = vs.system().tight_set(vs.coords(v));
      auto ns = vs.normals(v);
      ineq = ineq && key && std::equal(key->begin(), key->end(), ns.begin(), ns.end());
      std::size_t c = vs.class_of(v);
      wit = wit && vs.act(vs.representative(c), vs.witness(v)) == v &&
            a.group->apply(vs.witness(v), vs.coords(vs.representative(c))) == vs.coords(v);
    }
    log.check(ineq, tag + " inequalities");
    // normal witnesses
    const ClassifiedPoints& nc = vs.normal_classes();
    for (Point p = 0; p < a.relevant.vectors.size(); ++p) {
      Point rep = nc.representative(nc.class_of(p));
      wit = wit && point_action()(rep, nc.witness(p)) == p;
    }
    log.check(wit && check_face_witnesses(vs, a.hierarchy), tag + " witnesses");
    // fingerprints agree along every recorded equivalence
    bool fp = true;
    for (const Face& f : a.hierarchy.faces)
      if (!f.is_rep()) fp = fp && fingerprint(vs, f) == fingerprint(vs, a.hierarchy.faces[static_cast<std::size_t>(f.representative)]);
    log.check(fp, tag + " fingerprints");
    log.check(a.moments.trace_identity, tag + " trace");
    log.check(a.moments.float_discrepancy <= kFloatAgreement, tag + " float shadow");
    // brute force: vertex set, volume and second moment
    NaiveCell cell = naive_cell(l, a.relevant.vectors);
    std::set<QVec, bool (*)(const QVec&, const QVec&)> ours(
        [](const QVec& x, const QVec& y) { return canonical_less(x, y); });
    for (std::uint32_t v = 0; v < vs.size(); ++v) ours.insert(vs.coords(v));
    log.check(ours.size() == cell.vertices.size() && std::equal(ours.begin(), ours.end(), cell.vertices.begin()),
              tag + " naive vertices");
    log.check(a.moments.nu == cell.volume, tag + " naive volume");
    log.check(a.moments.mean_scalar * cell.volume == cell.second_moment, tag + " naive U");
    os << tag << " ";
  }
  return log.done("vertex inequalities, fingerprints, witnesses, trace, float shadow, brute force on " + os.str());
}

Outcome zador() {
  Log log;
  bool only_1d = true;
  for (const auto& [name, r] : g_analyzed) {
    double b = zador_bound(r.n);
    bool strict = b < r.g && std::abs(b - r.g) > 1e-14 * r.g;
    log.check(strict, name + ": bound " + std::to_string(b) + " vs G " + r.g_decimal.substr(0, 10));
    only_1d = only_1d && (strict || r.n == 1);
  }
  Outcome o = log.done(std::to_string(g_analyzed.size()) + " analyses");
  o.unattainable = !o.pass && only_1d;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  bool long_runs = false;
  if (const char* e = std::getenv("LATQ_LONG_RUNS")) long_runs = std::strcmp(e, "0") != 0 && *e != 0;
  std::string only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--long") == 0) long_runs = true;
    else only = argv[i];
  }

  std::vector<Criterion> cs = {
      {"cubic baseline Z1..Z5", false, cubic, ""},
      {"hexagonal exactness", false, hexagonal, ""},
      {"relevant-vector counts", false, relevant_counts, ""},
      {"group engine", false, group_engine, ""},
      {"K12 headline", true, k12_headline, ""},
      {"A2 deep-hole family", false, a2_family, ""},
      {"laminated K12 family", true, laminated_k12, ""},
      {"property suites", false, properties, ""},
      {"Zador sanity", false, zador,
       "in one dimension the cell is the 1-ball, so G(Z1) equals the bound 1/12 and strict inequality cannot hold"},
  };

  int failed = 0;
  for (const Criterion& c : cs) {
    if (!only.empty() && c.name.find(only) == std::string::npos) continue;
    if (c.long_run && !long_runs) {
      std::cout << "SKIP " << c.name << " (long run; pass --long or set LATQ_LONG_RUNS=1)\n";
      continue;
    }
    Outcome o;
    try {
      o = c.run();
    } catch (const Error& e) {
      o = {false, std::string("error: ") + e.what()};
    } catch (const std::bad_alloc&) {
      o = {false, "out of memory"};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail;
    if (o.unattainable) std::cout << " (unattainable: " << c.unattainable << ")";
    std::cout << std::endl;
    if (!o.pass && !o.unattainable) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
