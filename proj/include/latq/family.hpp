#pragma once
// One-parameter laminated families L(a) = laminate(base, h, a): exact samples, the fitted
// second moment U(a), the window of a with unchanged cell structure, and the minimizer of G.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "latq/analysis.hpp"
#include "latq/polynomial.hpp"

namespace latq {

struct FamilyOptions {
  AnalysisOptions analysis;
  std::size_t samples = 0;            // 0: n + 3
  Rational spacing = Rational(1, 1024);  // relative distance between neighbouring samples
  std::size_t window_points = 64;     // rational points checked inside the window
  int digits = 30;
};

struct FamilySample {
  Rational a;
  SecondMomentResult result;
  ExactScalar u_nn;  // U along the lamination direction
  std::size_t relevant = 0;
};

struct ParametricFamily {
  Lattice base;
  QVec offset;
  Rational a0;
  std::size_t n = 0;
  std::vector<FamilySample> samples;  // ascending in a
  ClassStructure structure;
  std::vector<int> basis;
  ParamPolynomial u;    // U(a)
  ExactScalar volume;   // Vol(a) = volume * a
  std::shared_ptr<const Analysis> reference;  // the full analysis at a0
};

// Throws CriticalValueCrossed when the samples differ in class structure, Basis when U(a)
// does not fit the Laurent basis even after one extension.
ParametricFamily analyze_family(const Lattice& base, const QVec& offset, const Rational& a0,
                                const FamilyOptions& opt = {});

// A bound of the window as a root of a polynomial in v = a^2.
struct WindowBound {
  Polynomial poly;
  IsolatingInterval v;
  std::string describe() const;  // the bound on a
};

struct ValidityWindow {
  std::optional<WindowBound> lower, upper;  // unset: no bound found on that side
  Rational probe_lo, probe_hi;              // range of a that was sampled
  std::size_t polynomials = 0;              // distinct vertex-condition polynomials
  std::size_t points_checked = 0;
  bool contains(const Rational& a) const;
  std::string describe() const;
};

// Vertex conditions are rational functions of v = a^2. Their numerators are interpolated
// exactly per representative vertex and relevant vector; the nearest roots around a0 bound
// the window. Conditions (i) and (ii) are then rechecked at rational points and endpoints.
// Throws InconsistentSample when a check fails or a0 sits on a critical value.
ValidityWindow validity_window(const ParametricFamily& f, const FamilyOptions& opt = {});

// f(v) with f(a^2) = 0 exactly where G'(a) = 0.
Polynomial stationarity_polynomial(const ParametricFamily& f);
// G(a) = U(a) / (n (Vol a)^(1 + 2/n)) in double precision.
double family_g(const ParametricFamily& f, double a);

struct OptimizationResult {
  Polynomial f;
  IsolatingInterval v_opt;  // root of f, v = a^2
  bool boundary = false;    // no stationary point inside: the better endpoint
  std::string a_decimal;
  std::string g_decimal;
  double a_opt = 0;
  double g_opt = 0;
  bool second_order = false;  // G'' > 0 numerically
};

OptimizationResult minimize_g(const ParametricFamily& f, const ValidityWindow& w, int digits = 30);

// U_ab = alpha I + beta Z with Z = e e^T - I/n, e the lamination direction.
struct TensorDecomposition {
  ParamPolynomial alpha;
  ParamPolynomial beta;
  bool beta_identity = false;  // beta(a) == f(a^2)/a
};

// Throws Structure when a sampled tensor is not of that form.
TensorDecomposition tensor_decomposition(const ParametricFamily& f);

}  // namespace latq
