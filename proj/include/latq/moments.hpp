#pragma once
// Volumes, barycenters and second moments over the reduced face hierarchy.
// Every face F carries spanning vectors S_F of its direction space; the cached volume is
// nu = Vol(F) / sqrt(det(S_F M S_F^T)), which stays rational. Heights enter only through
// det T with [S_C; apex - b_C] = T S_F, so no square roots are taken before the very end.

#include <map>
#include <optional>
#include <string>

#include "latq/voronoi.hpp"

namespace latq {

enum class HeightMethod { Projection, Gram, Auto };

QVec centroid(const std::vector<QVec>& points);
// Squared distance from apex to the affine hull of a child (point + span of rows).
// Throws Degeneracy when the spanning rows are dependent.
Rational height_squared(const QVec& apex, const QMat& child_spans, const QVec& child_point, const QMat& metric,
                        HeightMethod method = HeightMethod::Auto);

template <class T>
struct FaceMoments {
  T nu;                               // Vol / sqrt(gamma)
  T gamma;                            // det(S M S^T)
  std::vector<T> centroid;
  std::vector<T> barycenter;
  std::vector<std::vector<T>> mean_tensor;  // (1/Vol) * integral of x^T x, frame coordinates
  T mean_scalar;                            // (1/Vol) * integral of x M x^T
  std::vector<std::vector<T>> spans;        // dim rows
};

// Per-representative cache, filled by sweeping dimensions upwards. T is Rational or double.
template <class T>
class MomentCache {
 public:
  MomentCache(const VertexSet& vs, const FaceHierarchy& h);
  void compute();
  bool has(std::uint32_t f) const { return cache_.count(f) != 0; }
  const FaceMoments<T>& representative(std::uint32_t f) const;  // throws Dependency if missing
  // Moments of any face, transported from its representative.
  FaceMoments<T> moments(std::uint32_t f) const;
  std::vector<std::vector<T>> transformation(std::uint32_t f) const;  // identity on representatives

 private:
  void compute_face(std::uint32_t f);
  const VertexSet& vs_;
  const FaceHierarchy& h_;
  std::vector<std::vector<T>> metric_;
  std::map<std::uint32_t, FaceMoments<T>> cache_;
};

extern template class MomentCache<Rational>;
extern template class MomentCache<double>;

struct SecondMomentResult {
  std::string lattice;
  std::optional<Rational> parameter;
  std::size_t n = 0;
  Rational nu;                  // Vol / sqrt(det M)
  Rational metric_det;
  bool volume_certificate = false;  // nu == |det basis|
  std::optional<ExactScalar> volume;
  Rational mean_scalar;         // U / Vol = tr(Q M)
  QMat mean_tensor;             // Q, frame coordinates
  std::optional<ExactScalar> u;
  std::optional<ExactMatrix> tensor;  // Cartesian U_ab when an embedding exists
  bool trace_identity = false;        // tr(Q M) equals the scalar recursion
  std::optional<ExactScalar> g_exact;
  std::string g_decimal;
  int digits = 0;
  double g = 0;
  double float_discrepancy = 0;  // largest relative gap between the two calculators
};

struct MomentOptions {
  bool float_shadow = true;
  double float_tolerance = 1e-9;
  int digits = 30;
};

// Throws Consistency when the calculators disagree beyond the tolerance.
SecondMomentResult quantizer_constant(const VertexSet& vs, const FaceHierarchy& h, const MomentOptions& opt = {});

// G from tr(QM) and Vol^2 when Vol^(2/n) lies in a quadratic field.
std::optional<ExactScalar> exact_g(const Rational& mean_scalar, const Rational& vol2, std::size_t n);
// Decimal string of G = mean_scalar / (n Vol^(2/n)) with the given number of significant digits.
std::string decimal_g(const Rational& mean_scalar, const Rational& vol2, std::size_t n, int digits);
std::string decimal_string(const ExactScalar& x, int digits);

}  // namespace latq
