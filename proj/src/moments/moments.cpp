#include "latq/moments.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>

#include "latq/error.hpp"
#include "../exact/mpfr_format.hpp"

namespace latq {

QVec centroid(const std::vector<QVec>& points) {
  if (points.empty()) fail(ErrorKind::DegenerateInput, "centroid of no points");
  QVec c(points[0].size(), Rational(0));
  for (const QVec& p : points) c = add(c, p);
  return scale(c, Rational(1, static_cast<unsigned long>(points.size())));
}

Rational height_squared(const QVec& apex, const QMat& child_spans, const QVec& child_point, const QMat& metric,
                        HeightMethod method) {
  QVec delta = sub(apex, child_point);
  if (method == HeightMethod::Auto)
    method = 2 * child_spans.size() < metric.size() ? HeightMethod::Gram : HeightMethod::Projection;
  Rational g = child_spans.empty() ? Rational(1) : gram_det(child_spans, metric);
  if (sgn(g) == 0) fail(ErrorKind::Degeneracy, "child spanning vectors are dependent");
  if (method == HeightMethod::Projection) {
    QVec p = child_spans.empty() ? delta : project_complement(delta, child_spans, metric);
    return norm2(p, metric);
  }
  QMat ext = child_spans;
  ext.push_back(delta);
  return gram_det(ext, metric) / g;
}

namespace {

using std::abs;

template <class T>
T to_t(const Rational& q);
template <>
Rational to_t<Rational>(const Rational& q) {
  return q;
}
template <>
double to_t<double>(const Rational& q) {
  return q.get_d();
}

template <class T>
std::vector<T> convert(const QVec& v) {
  std::vector<T> o;
  for (const Rational& q : v) o.push_back(to_t<T>(q));
  return o;
}
template <class T>
std::vector<std::vector<T>> convert(const QMat& m) {
  std::vector<std::vector<T>> o;
  for (const QVec& r : m) o.push_back(convert<T>(r));
  return o;
}

template <class T>
std::vector<T> vm(const std::vector<T>& x, const std::vector<std::vector<T>>& m) {
  std::size_t c = m.empty() ? 0 : m[0].size();
  std::vector<T> y(c, T(0));
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < c; ++j) y[j] += x[i] * m[i][j];
  return y;
}

template <class T>
std::vector<std::vector<T>> mm(const std::vector<std::vector<T>>& a, const std::vector<std::vector<T>>& b) {
  std::vector<std::vector<T>> r;
  for (const auto& row : a) r.push_back(vm(row, b));
  return r;
}

template <class T>
std::vector<std::vector<T>> tr(const std::vector<std::vector<T>>& a) {
  if (a.empty()) return {};
  std::vector<std::vector<T>> t(a[0].size(), std::vector<T>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
  return t;
}

Rational det(QMat m) { return determinant(std::move(m)); }

double det(DMat m) {
  const std::size_t n = m.size();
  double d = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i][k]) > std::abs(m[p][k])) p = i;
    if (m[p][k] == 0) return 0;
    if (p != k) {
      std::swap(m[p], m[k]);
      d = -d;
    }
    d *= m[k][k];
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = m[i][k] / m[k][k];
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  return d;
}

int sign_of_value(const Rational& q) { return sgn(q); }
int sign_of_value(double x) { return (x > 0) - (x < 0); }

Rational absval(const Rational& q) { return abs(q); }
double absval(double x) { return std::abs(x); }

}  // namespace

template <class T>
MomentCache<T>::MomentCache(const VertexSet& vs, const FaceHierarchy& h)
    : vs_(vs), h_(h), metric_(convert<T>(vs.lattice().metric)) {}

template <class T>
const FaceMoments<T>& MomentCache<T>::representative(std::uint32_t f) const {
  auto it = cache_.find(f);
  if (it == cache_.end()) fail(ErrorKind::Dependency, "moments of a representative are not cached");
  return it->second;
}

template <class T>
std::vector<std::vector<T>> MomentCache<T>::transformation(std::uint32_t f) const {
  const Face& face = h_.faces[f];
  if (face.is_rep()) return convert<T>(identity<Rational>(vs_.dim()));
  return convert<T>(vs_.group().matrix_from_images(face.transformation));
}

template <class T>
FaceMoments<T> MomentCache<T>::moments(std::uint32_t f) const {
  const std::uint32_t r = h_.rep_of(f);
  FaceMoments<T> m = representative(r);
  if (r == f) return m;
  auto R = transformation(f);
  m.centroid = vm(m.centroid, R);
  m.barycenter = vm(m.barycenter, R);
  m.mean_tensor = mm(tr(R), mm(m.mean_tensor, R));
  m.spans = mm(m.spans, R);
  return m;
}

template <class T>
void MomentCache<T>::compute() {
  for (std::size_t d = 0; d <= h_.n; ++d)
    for (std::uint32_t f : h_.levels[d])
      if (h_.faces[f].is_rep() && !has(f)) compute_face(f);
}

template <class T>
void MomentCache<T>::compute_face(std::uint32_t f) {
  const Face& face = h_.faces[f];
  const std::size_t n = vs_.dim();
  const int d = face.dim;
  FaceMoments<T> out;
  if (d == 0) {
    std::vector<T> x = convert<T>(vs_.coords(face.vertices[0]));
    out.nu = T(1);
    out.gamma = T(1);
    out.centroid = out.barycenter = x;
    out.mean_tensor.assign(n, std::vector<T>(n, T(0)));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) out.mean_tensor[a][b] = x[a] * x[b];
    out.mean_scalar = T(0);
    std::vector<T> xm = vm(x, metric_);
    for (std::size_t a = 0; a < n; ++a) out.mean_scalar += xm[a] * x[a];
    cache_.emplace(f, std::move(out));
    return;
  }

  // apex: the centroid; the cell is centrally symmetric, so the top face uses the origin
  std::vector<T> apex(n, T(0));
  if (d < static_cast<int>(n)) {
    for (std::uint32_t v : face.vertices) apex = add(apex, convert<T>(vs_.coords(v)));
    T k(static_cast<long>(face.vertices.size()));
    for (T& x : apex) x /= k;
  }
  std::vector<T> am = vm(apex, metric_);
  T ama(0);
  for (std::size_t a = 0; a < n; ++a) ama += am[a] * apex[a];

  const T dd(static_cast<long>(d)), d1(static_cast<long>(d + 1)), d2(static_cast<long>(d + 2));
  std::vector<std::vector<T>> spans, smt;  // S_F and M S_F^T
  T gamma(0);
  T nu(0);
  std::vector<T> mass(n, T(0));
  std::vector<std::vector<T>> j(n, std::vector<T>(n, T(0)));
  T js(0);
  for (std::uint32_t c : face.children) {
    FaceMoments<T> cm = moments(c);
    std::vector<T> delta = sub(apex, cm.barycenter);
    std::vector<std::vector<T>> ext = cm.spans;
    ext.push_back(delta);
    if (spans.empty()) {
      spans = d == static_cast<int>(n) ? convert<T>(identity<Rational>(n)) : ext;
      smt = mm(metric_, tr(spans));
      gamma = det(mm(spans, smt));
      if (sign_of_value(gamma) == 0) fail(ErrorKind::Degeneracy, "face spans a lower-dimensional space");
    }
    T w = cm.nu * absval(det(mm(ext, smt))) / gamma;
    nu += w / dd;
    const std::vector<T>& b = cm.barycenter;
    for (std::size_t a = 0; a < n; ++a) mass[a] += w * (apex[a] / dd + (b[a] - apex[a]) / d1);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t e = 0; e < n; ++e) {
        T aa = apex[a] * apex[e];
        T cross = apex[a] * (b[e] - apex[e]) + (b[a] - apex[a]) * apex[e];
        T second = cm.mean_tensor[a][e] - apex[a] * b[e] - b[a] * apex[e] + aa;
        j[a][e] += w * (aa / dd + cross / d1 + second / d2);
      }
    T amb(0);
    for (std::size_t a = 0; a < n; ++a) amb += am[a] * b[a];
    js += w * (ama / dd + 2 * (amb - ama) / d1 + (cm.mean_scalar - 2 * amb + ama) / d2);
  }
  if (spans.empty()) fail(ErrorKind::Dependency, "face without children");
  out.nu = nu;
  out.gamma = gamma;
  out.centroid = apex;
  out.barycenter = mass;
  for (T& x : out.barycenter) x /= nu;
  for (auto& row : j)
    for (T& x : row) x /= nu;
  out.mean_tensor = std::move(j);
  out.mean_scalar = js / nu;
  out.spans = std::move(spans);
  cache_.emplace(f, std::move(out));
}

template class MomentCache<Rational>;
template class MomentCache<double>;

// ---- quantizer constant ------------------------------------------------------------------

std::optional<ExactScalar> exact_g(const Rational& mean_scalar, const Rational& vol2, std::size_t n) {
  const Rational nn(static_cast<unsigned long>(n));
  if (auto r = exact_root(vol2, static_cast<unsigned>(n))) return ExactScalar(Rational(mean_scalar / (nn * *r)));
  // Vol^(2/n) = sqrt(y)
  if (auto y = exact_root(vol2 * vol2, static_cast<unsigned>(n))) {
    Integer p = y->get_num() * y->get_den();  // sqrt(y) = sqrt(p) / den
    if (!p.fits_slong_p()) return std::nullopt;
    ExactScalar root = ExactScalar::sqrt_of(p.get_si()) / ExactScalar(Rational(y->get_den()));
    return ExactScalar(mean_scalar) / (ExactScalar(nn) * root);
  }
  return std::nullopt;
}

using detail::bits_for;
using detail::mpfr_string;

std::string decimal_g(const Rational& mean_scalar, const Rational& vol2, std::size_t n, int digits) {
  mpfr_prec_t prec = bits_for(digits);
  mpfr_t num, v, nn;
  mpfr_inits2(prec, num, v, nn, static_cast<mpfr_ptr>(nullptr));
  mpfr_set_q(num, mean_scalar.get_mpq_t(), MPFR_RNDN);
  mpfr_set_q(v, vol2.get_mpq_t(), MPFR_RNDN);
  mpfr_rootn_ui(v, v, static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_mul_ui(v, v, static_cast<unsigned long>(n), MPFR_RNDN);
  mpfr_div(num, num, v, MPFR_RNDN);
  std::string s = mpfr_string(num, digits);
  mpfr_clears(num, v, nn, static_cast<mpfr_ptr>(nullptr));
  return s;
}

std::string decimal_string(const ExactScalar& x, int digits) {
  mpfr_t a;
  mpfr_init2(a, bits_for(digits));
  detail::mpfr_set_exact(a, x);
  std::string s = mpfr_string(a, digits);
  mpfr_clear(a);
  return s;
}

namespace {

double rel_gap(const Rational& e, double f, double scale) {
  return std::abs(e.get_d() - f) / std::max({std::abs(e.get_d()), scale, 1e-300});
}

}  // namespace

SecondMomentResult quantizer_constant(const VertexSet& vs, const FaceHierarchy& h, const MomentOptions& opt) {
  const Lattice& l = vs.lattice();
  const std::size_t n = l.dim();
  SecondMomentResult r;
  r.lattice = l.name;
  if (l.lamination) r.parameter = l.lamination->a;
  r.n = n;
  r.digits = opt.digits;

  std::optional<MomentCache<double>> shadow_cache;
  if (opt.float_shadow) {
    shadow_cache.emplace(vs, h);
    shadow_cache->compute();
  }
  MomentCache<Rational> cache(vs, h);
  cache.compute();

  if (shadow_cache) {
    double worst = 0;
    for (std::size_t d = 0; d <= h.n; ++d)
      for (std::uint32_t f : h.representatives(static_cast<int>(d))) {
        const auto& e = cache.representative(f);
        const auto& s = shadow_cache->representative(f);
        worst = std::max(worst, rel_gap(e.nu, s.nu, 0));
        worst = std::max(worst, rel_gap(e.mean_scalar, s.mean_scalar, 0));
        // components that vanish exactly are compared against the size of the face
        double tscale = std::abs(e.mean_scalar.get_d()), bscale = std::sqrt(tscale);
        for (const auto& x : e.barycenter) bscale = std::max(bscale, std::abs(x.get_d()));
        for (const auto& row : e.mean_tensor)
          for (const auto& x : row) tscale = std::max(tscale, std::abs(x.get_d()));
        for (std::size_t a = 0; a < n; ++a) {
          worst = std::max(worst, rel_gap(e.barycenter[a], s.barycenter[a], bscale));
          for (std::size_t b = 0; b < n; ++b)
            worst = std::max(worst, rel_gap(e.mean_tensor[a][b], s.mean_tensor[a][b], tscale));
        }
      }
    r.float_discrepancy = worst;
    if (worst > opt.float_tolerance) fail(ErrorKind::Consistency, "float and exact calculators disagree");
  }

  const FaceMoments<Rational>& top = cache.representative(h.top);
  r.nu = top.nu;
  r.metric_det = l.metric_det();
  r.volume_certificate = top.nu == l.frame_volume();
  r.volume = l.exact_volume();
  r.mean_tensor = top.mean_tensor;
  Rational tq = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) tq += top.mean_tensor[a][b] * l.metric[b][a];
  r.mean_scalar = top.mean_scalar;
  r.trace_identity = tq == top.mean_scalar;
  if (r.volume) {
    r.u = *r.volume * ExactScalar(top.mean_scalar);
    if (l.embedding) {
      const ExactMatrix& e = *l.embedding;
      ExactMatrix q;
      for (const QVec& row : top.mean_tensor) {
        ExactVector er;
        for (const Rational& x : row) er.push_back(ExactScalar(x));
        q.push_back(std::move(er));
      }
      ExactMatrix t = matmul(transpose(e), matmul(q, e));
      for (auto& row : t)
        for (auto& x : row) x *= *r.volume;
      r.tensor = std::move(t);
    }
  }
  Rational vol2 = top.nu * top.nu * r.metric_det;
  r.g_exact = exact_g(top.mean_scalar, vol2, n);
  r.g_decimal = decimal_g(top.mean_scalar, vol2, n, opt.digits);
  r.g = std::stod(r.g_decimal);
  return r;
}

}  // namespace latq
