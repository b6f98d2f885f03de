#pragma once
// Finite groups acting on the relevant vectors of a lattice.
// Permutations compose as (a * b)[x] = a[b[x]]; frame matrices act on rows, x -> x R,
// so matrix(a * b) = matrix(b) * matrix(a).

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <unordered_map>
#include <vector>

#include "latq/lattice.hpp"

namespace latq {

using Point = std::uint32_t;

class Perm {
 public:
  Perm() = default;
  explicit Perm(std::size_t degree);  // identity
  explicit Perm(std::vector<Point> images);

  std::size_t degree() const { return img_.size(); }
  Point operator[](Point x) const { return img_[x]; }
  const std::vector<Point>& images() const { return img_; }
  bool is_identity() const;
  Perm inverse() const;

  friend Perm operator*(const Perm& a, const Perm& b);
  friend bool operator==(const Perm& a, const Perm& b) { return a.img_ == b.img_; }

 private:
  std::vector<Point> img_;
};

// Image of a point of some domain under a permutation of the ground set.
using Action = std::function<Point(Point, const Perm&)>;
Action point_action();

// Breadth-first orbit with a Schreier tree over fixed generators.
class OrbitTree {
 public:
  OrbitTree(Point root, std::shared_ptr<const std::vector<Perm>> gens, const Action& act,
            std::size_t cap = 0);
  Point root() const { return points_.front(); }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  bool contains(Point p) const { return index_.count(p) != 0; }
  // g with g(root) = p, a product of generators.
  Perm transporter(Point p) const;
  std::size_t depth(Point p) const;

 private:
  std::shared_ptr<const std::vector<Perm>> gens_;
  std::vector<Point> points_;
  struct Edge {
    std::uint32_t parent;  // index into points_
    std::int32_t label;    // generator, -1 at the root
  };
  std::vector<Edge> edges_;
  std::unordered_map<Point, std::uint32_t> index_;
};

// Base and strong generating set; levels keep Schreier trees.
class PermGroup {
 public:
  explicit PermGroup(std::size_t degree = 0);

  // Deterministic Schreier-Sims: random preprocessing, then every Schreier generator is sifted.
  static PermGroup schreier_sims(std::size_t degree, const std::vector<Perm>& gens,
                                 const std::vector<Point>& base_prefix = {}, std::uint64_t seed = 1);
  // Sifts random elements until the known order is reached.
  static PermGroup with_known_order(std::size_t degree, const std::vector<Perm>& gens,
                                    const Integer& order, const std::function<Perm()>& random,
                                    const std::vector<Point>& base_prefix = {});
  // Known order, random elements by product replacement over gens.
  static PermGroup with_known_order(std::size_t degree, const std::vector<Perm>& gens,
                                    const Integer& order, std::uint64_t seed = 1,
                                    const std::vector<Point>& base_prefix = {});

  std::size_t degree() const { return degree_; }
  const std::vector<Perm>& generators() const { return *gens_; }
  std::shared_ptr<const std::vector<Perm>> generators_ptr() const { return gens_; }
  std::vector<Point> base() const;
  std::size_t base_length() const { return levels_.size(); }
  const std::vector<Point>& basic_orbit(std::size_t level) const { return levels_[level].orbit; }
  Integer order() const;
  bool is_trivial() const;

  // Residue after sifting, and the level where sifting stopped (base_length() if it got through).
  std::pair<Perm, std::size_t> sift(Perm g) const;
  bool contains(const Perm& g) const;
  Perm identity() const { return Perm(degree_); }
  Perm random_element(std::mt19937_64& rng) const;
  // Calls f on every element; stops early when f returns false.
  void for_each_element(const std::function<bool(const Perm&)>& f) const;
  std::vector<Point> orbit(Point x) const;

  // Building blocks for backtracking over the base.
  bool in_basic_orbit(std::size_t level, Point p) const;
  Perm transversal(std::size_t level, Point p) const;  // u with u(beta) = p
  Perm strip(std::size_t level, Point p, Perm g) const;  // u_p^-1 g

  PermGroup conjugate(const Perm& g) const;  // g H g^-1
  // Same group, base starting with prefix.
  PermGroup rebase(const std::vector<Point>& prefix, std::uint64_t seed = 1) const;

 private:
  struct Level {
    Point beta = 0;
    std::vector<Perm> gens;
    std::vector<Perm> inv;
    std::vector<Point> orbit;
    std::vector<std::int32_t> label;  // dense over the degree: -1 absent, -2 root, else gen index
  };
  void rebuild_orbit(Level& lv) const;
  void add_strong_generator(const Perm& h, std::size_t upto);
  bool insert_residue(const Perm& g);
  std::pair<Perm, std::size_t> sift_from(Perm g, std::size_t start) const;
  Point choose_base_point(const Perm& h) const;

  std::size_t degree_;
  std::shared_ptr<std::vector<Perm>> gens_;
  std::vector<Level> levels_;
  std::vector<std::uint32_t> preference_;  // base point ranking while building
};

// Stabilizer of x inside H under an arbitrary action; order from orbit-stabilizer.
PermGroup stabilizer(const PermGroup& h, Point x, const Action& act = point_action(),
                     std::uint64_t seed = 1);
// Same, with the orbit supplied: its size and a transporter root -> p.
PermGroup stabilizer(const PermGroup& h, Point x, std::size_t orbit_size,
                     const std::function<Perm(Point)>& transporter, const Action& act,
                     std::uint64_t seed = 1);
// Setwise stabilizer by enumerating admissible images of the set's points.
PermGroup set_stabilizer(const PermGroup& h, const std::vector<Point>& set,
                         const Action& act = point_action(), std::uint64_t seed = 1);

struct Coset {
  Perm rep;
  std::shared_ptr<const PermGroup> group;
  bool empty() const { return group == nullptr; }
  bool contains(const Perm& g) const;
  Integer size() const;
  static Coset none() { return {}; }
};

// g1 H1 ∩ g2 H2; explicit enumeration when one subgroup is at most `threshold`.
Coset coset_intersect(const Coset& a, const Coset& b, std::size_t threshold = 5000);
// pool ∩ {f : f(x) = y}; `tree` is the orbit of x under pool.group, `stab` its stabilizer there.
Coset coset_restrict(const Coset& pool, Point x, Point y, const OrbitTree& tree,
                     std::shared_ptr<const PermGroup> stab, const Action& act);

// ---- matrix groups on relevant vectors ---------------------------------------

struct QVecHash {
  std::size_t operator()(const QVec& v) const;
};

class VectorIndex {
 public:
  VectorIndex() = default;
  explicit VectorIndex(const std::vector<QVec>& vs);
  Point insert(const QVec& v);
  std::optional<Point> find(const QVec& v) const;
  const QVec& operator[](Point i) const { return items_[i]; }
  std::size_t size() const { return items_.size(); }
  const std::vector<QVec>& items() const { return items_; }

 private:
  std::vector<QVec> items_;
  std::unordered_map<QVec, Point, QVecHash> map_;
};

struct MatrixGroup {
  std::vector<QMat> generators;  // frame matrices
};

// Faithful permutation image of a matrix group on a ground set of vectors.
class LatticeGroup {
 public:
  LatticeGroup(const MatrixGroup& g, const std::vector<QVec>& ground,
               std::optional<Integer> known_order = std::nullopt, std::uint64_t seed = 1);
  // Same ground set, subgroup or supergroup given by permutations.
  LatticeGroup(std::shared_ptr<const VectorIndex> ground, std::shared_ptr<const PermGroup> perm,
               std::vector<Point> frame, QMat frame_inverse);

  const PermGroup& perm() const { return *perm_; }
  std::shared_ptr<const PermGroup> perm_ptr() const { return perm_; }
  const VectorIndex& ground() const { return *ground_; }
  std::shared_ptr<const VectorIndex> ground_ptr() const { return ground_; }
  std::size_t dim() const { return frame_.size(); }
  Integer order() const { return perm_->order(); }

  QMat matrix(const Perm& g) const;
  Perm permutation(const QMat& r) const;  // throws Invariance if the ground set is not preserved
  QVec apply(const Perm& g, const QVec& x) const;
  // Coordinates of x in the frame of ground vectors; apply_coords uses them.
  QVec frame_coordinates(const QVec& x) const;
  QVec apply_coords(const Perm& g, const QVec& c) const;
  MatrixGroup matrix_generators() const;
  // A group element is fixed by the images of the frame vectors; compact storage form.
  std::vector<Point> compress(const Perm& g) const;
  Perm expand(const std::vector<Point>& frame_images) const;
  QMat matrix_from_images(const std::vector<Point>& frame_images) const;
  const std::vector<Point>& frame() const { return frame_; }
  LatticeGroup with_group(std::shared_ptr<const PermGroup> perm) const;

 private:
  std::shared_ptr<const VectorIndex> ground_;
  std::shared_ptr<const PermGroup> perm_;
  std::vector<Point> frame_;  // indices of n independent ground vectors
  QMat frame_inverse_;        // inverse of their row matrix
  std::shared_ptr<const std::vector<QVec>> ground_coords_;  // ground vectors in the frame basis
  void init_coords();
};

LatticeGroup to_permutation_group(const MatrixGroup& g, const RelevantVectorSet& ground,
                                  std::uint64_t seed = 1);

// Orbits of ground points with witnesses read off Schreier trees.
class ClassifiedPoints {
 public:
  ClassifiedPoints(std::shared_ptr<const LatticeGroup> g, std::size_t cap = 0);
  std::size_t classes() const { return reps_.size(); }
  std::size_t class_of(Point p) const { return class_[p]; }
  Point representative(std::size_t c) const { return reps_[c]; }
  std::size_t orbit_size(std::size_t c) const { return trees_[c]->size(); }
  const OrbitTree& tree(std::size_t c) const { return *trees_[c]; }
  Perm witness(Point p) const;  // w(rep) = p
  // Stabilizer of the class representative, cached.
  std::shared_ptr<const PermGroup> rep_stabilizer(std::size_t c) const;
  // Stab(p) = w Stab(rep) w^-1.
  PermGroup stabilizer(Point p) const;
  // g_y g_x^-1 Stab(x); throws ClassMismatch when x and y are inequivalent.
  Coset transformation_coset(Point x, Point y) const;
  const LatticeGroup& group() const { return *g_; }

 private:
  std::shared_ptr<const LatticeGroup> g_;
  std::vector<std::size_t> class_;
  std::vector<Point> reps_;
  std::vector<std::unique_ptr<OrbitTree>> trees_;
  mutable std::vector<std::shared_ptr<const PermGroup>> stab_;
  mutable std::mutex mu_;
};

struct OrbitEntry {
  QVec vector;
  QMat witness;  // v = v_rep * witness
};
// Breadth-first matrix orbit, every member with a witness matrix.
std::vector<OrbitEntry> orbit_with_witnesses(const MatrixGroup& g, const QVec& v,
                                             std::size_t cap = 1000000);

// Symmetries of a lamination: elements diag(R, ±1) with R from the base group that keep the
// lattice (equivalently its relevant vectors) invariant. The base group acts on the base frame.
LatticeGroup discover_laminated_symmetry(const Lattice& laminated, const LatticeGroup& base_group,
                                         const RelevantVectorSet& relevant, std::uint64_t seed = 1);

}  // namespace latq
