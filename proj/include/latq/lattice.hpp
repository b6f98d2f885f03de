#pragma once
// Lattices in a rational frame: points are rows x with squared length x M x^T.
// A Cartesian embedding E (E E^T = M, entries in one Q(sqrt d)) is kept for I/O.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "latq/linalg.hpp"

namespace latq {

struct Lattice {
  std::string name;
  QMat metric;                          // n x n, symmetric positive definite
  QMat basis;                           // rows generate the lattice
  std::optional<ExactMatrix> embedding;  // frame row i -> Cartesian row
  std::vector<QMat> symmetry;           // frame matrices R, acting x -> x R

  // Set for laminations so families can be re-instantiated at another a.
  struct Lamination {
    std::shared_ptr<const Lattice> base;
    QVec offset;  // in the base frame
    Rational a;
  };
  std::shared_ptr<const Lamination> lamination;

  std::size_t dim() const { return metric.size(); }
  // |det basis|, the volume in units of sqrt(det metric)
  Rational frame_volume() const;
  Rational metric_det() const;
  double volume() const;
  // Exact volume when sqrt(det metric) lies in a quadratic field, else nullopt.
  std::optional<ExactScalar> exact_volume() const;
  // Cartesian generator (basis * E); throws when there is no embedding.
  ExactMatrix generator() const;

  QVec cartesian_to_frame(const ExactVector& x) const;
  ExactVector frame_to_cartesian(const QVec& x) const;
  // Lattice coordinates z with x = z * basis (rational in general).
  QVec coordinates(const QVec& x) const;
  bool contains(const QVec& x) const;

  void validate() const;
};

// A generator matrix over one quadratic field. Throws Unsupported when B B^T is irrational.
Lattice lattice_from_generator(const std::string& name, const ExactMatrix& b);
Lattice lattice_from_gram(const std::string& name, const QMat& gram);
// Converts Cartesian orthogonal matrices to frame matrices and checks invariance.
void set_cartesian_symmetry(Lattice& l, const std::vector<ExactMatrix>& gens);
void set_frame_symmetry(Lattice& l, const std::vector<QMat>& gens);

// "Z<n>", "A<n>", "D<n>", "K12", "K12-laminated" (parameter a, default 34/33).
Lattice catalog_lattice(const std::string& name, std::optional<Rational> a = std::nullopt);
std::vector<std::string> catalog_names();
// Table entries used by tests and reports.
QVec k12_deep_hole_frame();

Lattice laminate(const Lattice& base, const QVec& offset_frame, const Rational& a);
Lattice product_lattice(const Lattice& l1, const Lattice& l2, const Rational& a);

struct ProductOptimum {
  double a_opt;
  double g_opt;
};
// Closed form for L1 x a L2 given G_i, V_i and dimensions.
ProductOptimum product_optimum(double g1, double v1, std::size_t n1, double g2, double v2, std::size_t n2);

double zador_bound(std::size_t n);

// ---- closest points -------------------------------------------------------

// Float enumerator on an LLL-reduced basis; exact answers are certified by the callers.
class Enumerator {
 public:
  explicit Enumerator(const Lattice& l);
  std::size_t dim() const { return n_; }
  // Squared distance of the nearest lattice point (float) and its lattice coordinates.
  double nearest(const DVec& target_frame, std::vector<std::int64_t>* z = nullptr) const;
  // Every lattice point with float squared distance <= r2, as lattice coordinates.
  std::vector<std::vector<std::int64_t>> within(const DVec& target_frame, double r2) const;
  QVec point(const std::vector<std::int64_t>& z) const;  // exact, z in original basis

 private:
  struct Search;
  std::size_t n_;
  DMat bred_;                         // reduced basis, Cartesian-like float rows
  std::vector<std::vector<std::int64_t>> u_;  // reduced = u * basis
  DMat mu_;
  DVec bstar2_;
  DMat qt_;                           // rows: Gram-Schmidt directions, normalized
  DMat chol_;                         // metric = C C^T
  QMat basis_;
};

std::vector<QVec> closest_lattice_points(const Lattice& l, const QVec& x);
std::vector<QVec> closest_lattice_points(const Lattice& l, const Enumerator& e, const QVec& x);

struct RelevantVectorSet {
  std::vector<QVec> vectors;        // sorted canonically, closed under negation
  std::vector<Rational> norms;      // squared lengths
};
RelevantVectorSet relevant_vectors(const Lattice& l, unsigned threads = 1);

// Lexicographic comparison of rationals component-wise; the canonical order.
bool canonical_less(const QVec& a, const QVec& b);
std::string to_string(const QVec& v);

struct MonteCarloResult {
  double g;
  double stderr_g;
  std::uint64_t samples;
};
MonteCarloResult monte_carlo_G(const Lattice& l, std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

}  // namespace latq
