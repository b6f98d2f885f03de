#pragma once
// Vertices and the symmetry-reduced face hierarchy of a Voronoi cell.
// A vertex is identified by its normal set N(v): the relevant vectors whose facets contain it.

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "latq/lattice.hpp"
#include "latq/symmetry.hpp"

namespace latq {

// Sorted normal sets in one arena, with a hash index.
class VertexStore {
 public:
  std::size_t size() const { return offsets_.size() - 1; }
  std::span<const Point> normals(std::uint32_t v) const {
    return {data_.data() + offsets_[v], data_.data() + offsets_[v + 1]};
  }
  std::optional<std::uint32_t> find(std::span<const Point> key) const;
  // Returns the id and whether it was new.
  std::pair<std::uint32_t, bool> insert(std::span<const Point> key);

 private:
  static std::uint64_t hash(std::span<const Point> key);
  void grow();
  std::vector<Point> data_;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<std::uint32_t> slots_;  // open addressing, ~0u empty
};

// Float shadows and exact data of the inequalities 2 x M n <= n M n.
struct FacetSystem {
  const Lattice* lattice = nullptr;
  std::vector<QVec> normals;  // relevant vectors, ids as in the group's ground set
  std::vector<QVec> mn;       // M n
  std::vector<Rational> rhs;  // n M n
  DMat a;                     // 2 M n, shadows
  DVec b;
  FacetSystem(const Lattice& l, const std::vector<QVec>& relevant);
  // Exact normal set of x; nullopt if x violates an inequality.
  std::optional<std::vector<Point>> tight_set(const QVec& x) const;
  // Exact point from n independent members of the normal set.
  QVec lift(std::span<const Point> normals) const;
  // Normals tight at x up to a relative tolerance; a lookup key only.
  std::vector<Point> float_tight_set(const DVec& x, double tol = 1e-9) const;
};

struct VertexSearchOptions {
  std::size_t streak = 500;  // LP rounds without a new class before stopping
  double perturbation = 1e-3;
  std::uint64_t seed = 1;
  std::size_t max_rounds = 200000;
};

struct VertexSearchStats {
  std::size_t lp_rounds = 0;
  std::size_t harvested = 0;
  std::size_t rejected = 0;
  std::size_t classes_from_lp = 0;
  std::size_t classes_from_translation = 0;
};

// Every vertex of the cell, classified under the group, with Schreier trees for witnesses.
class VertexSet {
 public:
  VertexSet(const Lattice& l, std::shared_ptr<const LatticeGroup> g);

  const Lattice& lattice() const { return *lattice_; }
  const LatticeGroup& group() const { return *group_; }
  std::shared_ptr<const LatticeGroup> group_ptr() const { return group_; }
  const ClassifiedPoints& normal_classes() const { return *normal_classes_; }
  const FacetSystem& system() const { return *system_; }
  std::size_t dim() const { return lattice_->dim(); }

  std::size_t size() const { return store_.size(); }
  std::span<const Point> normals(std::uint32_t v) const { return store_.normals(v); }
  std::optional<std::uint32_t> find(std::span<const Point> sorted_normals) const { return store_.find(sorted_normals); }
  std::size_t classes() const { return classes_.size(); }
  std::size_t class_of(std::uint32_t v) const { return class_of_[v]; }
  std::uint32_t representative(std::size_t c) const { return classes_[c].rep; }
  std::size_t orbit_size(std::size_t c) const { return classes_[c].size; }

  // Image of a vertex; throws Consistency if it is not stored.
  std::uint32_t act(std::uint32_t v, const Perm& g) const;
  Action action() const;
  Perm witness(std::uint32_t v) const;  // maps the class representative to v
  std::shared_ptr<const PermGroup> rep_stabilizer(std::size_t c) const;
  // Exact coordinates, computed from the normal set and cached.
  QVec coords(std::uint32_t v) const;

  // Adds a vertex class through x (exact, a vertex) and its whole orbit; returns true if new.
  bool add_class(const QVec& x, std::span<const Point> sorted_normals);
  // Orders classes canonically by the smallest normal-set key of their members.
  void finalize();

  VertexSearchStats stats;

 private:
  struct Class {
    std::uint32_t root;  // BFS root
    std::uint32_t rep;
    std::size_t size;
    Perm root_to_rep_inverse;
  };
  Perm from_root(std::uint32_t v) const;

  std::shared_ptr<const Lattice> lattice_;
  std::shared_ptr<const LatticeGroup> group_;
  std::unique_ptr<ClassifiedPoints> normal_classes_;
  std::unique_ptr<FacetSystem> system_;
  VertexStore store_;
  std::vector<std::uint32_t> class_of_;
  std::vector<std::uint32_t> parent_;
  std::vector<std::int32_t> label_;
  std::vector<Class> classes_;
  mutable std::vector<std::shared_ptr<const PermGroup>> stab_;
  mutable std::unordered_map<std::uint32_t, QVec> coords_;
  mutable std::mutex mu_;
};

struct LpVertex {
  DVec x;
  std::vector<Point> active;  // n independent tight normals
};
// Float active-set LP over the cell: maximizes c.x from the origin and returns every vertex
// passed on the way. Throws Consistency when unbounded.
std::vector<LpVertex> lp_vertex_walk(const FacetSystem& sys, const DVec& c, std::size_t max_iter = 0);

std::unique_ptr<VertexSet> find_vertices(const Lattice& l, std::shared_ptr<const LatticeGroup> g,
                                         const VertexSearchOptions& opt = {});

// ---- faces ------------------------------------------------------------------------

struct Face {
  int dim = 0;
  std::vector<std::uint32_t> vertices;  // sorted vertex ids
  std::vector<Point> normals;           // N(F), sorted
  std::vector<std::uint32_t> parents;
  std::vector<std::uint32_t> children;
  std::int64_t class_id = -1;        // set on representatives
  std::int64_t representative = -1;  // set on the others
  std::vector<Point> transformation;  // frame images of g with F = g F_rep
  std::optional<Point> normal;        // facets
  bool is_rep() const { return representative < 0; }
};

struct ClassifyStats {
  std::size_t comparisons = 0;
  std::size_t equivalences = 0;
  std::size_t nodes = 0;  // pool restrictions tried
  std::size_t max_nodes = 0;
};

struct HierarchyOptions {
  std::size_t permutation_budget = 10000000;  // per face pair
  std::size_t chain_cap = 16;
  unsigned long chain_min_order = 12;
  bool use_subgroups = true;
  bool verify_witnesses = true;
  std::uint64_t seed = 1;
  double rank_eps = 1e-9;  // shadow rank threshold, relative to row norms; accepts are rechecked exactly
};

struct FaceHierarchy {
  std::size_t n = 0;
  std::vector<Face> faces;
  std::vector<std::vector<std::uint32_t>> levels;  // face ids by dimension
  std::uint32_t top = 0;
  std::vector<Integer> subgroup_orders;
  ClassifyStats stats;

  std::vector<std::size_t> class_counts() const;
  std::vector<std::uint32_t> representatives(int d) const;
  std::uint32_t rep_of(std::uint32_t f) const {
    return faces[f].is_rep() ? f : static_cast<std::uint32_t>(faces[f].representative);
  }
  std::size_t total_classes() const;
};

// N(F) as the common normals of the vertices.
std::vector<Point> face_normals(const VertexSet& vs, std::span<const std::uint32_t> vertices);
// Affine dimension n - rank N(F); float rank confirmed exactly.
int face_dimension(const VertexSet& vs, const std::vector<Point>& normals);

// Facets with their vertex sets; throws Consistency if one has dimension below n - 1.
std::vector<Face> assemble_facets(const VertexSet& vs, const std::vector<Point>& which);

// Per-class counts over V(F) and N(F); vertex classes tagged 0, normal classes tagged 1.
using Fingerprint = std::vector<std::pair<std::uint64_t, std::uint32_t>>;
Fingerprint fingerprint(const VertexSet& vs, const Face& f);

enum class DefiningKind { Vertices, Normals };
struct DefiningSet {
  DefiningKind kind;
  // subsets of equivalent points, ordered by class id, then stably by size
  std::vector<std::vector<Point>> parts;
  std::vector<std::uint64_t> part_class;
};
DefiningSet choose_defining_set(const VertexSet& vs, const Face& f);

// Equivalence search. `group` is the full group when null.
class TransformationFinder {
 public:
  TransformationFinder(const VertexSet& vs, std::size_t budget);
  // g with F' = g F, or nullopt. F is the side whose stabilizer chain gets cached under `key`.
  std::optional<Perm> find(const Face& f, const Face& f2, std::shared_ptr<const PermGroup> group,
                           std::uint64_t key, ClassifyStats* stats = nullptr);
  void clear() { chains_.clear(); }

 private:
  struct Level {
    std::shared_ptr<const PermGroup> k;  // pointwise stabilizer of the earlier points
    std::unique_ptr<OrbitTree> tree;     // orbit of this level's point under k
  };
  struct Chain {
    DefiningSet def;
    std::vector<Point> xs;
    std::vector<std::size_t> part_of;
    std::shared_ptr<const PermGroup> group;  // null: full group
    std::vector<Level> levels;
    bool full_group = false;
  };
  Chain& chain_for(const Face& f, std::shared_ptr<const PermGroup> group, std::uint64_t key);
  void extend(Chain& c, std::size_t k);

  const VertexSet& vs_;
  std::size_t budget_;
  std::map<std::uint64_t, std::unique_ptr<Chain>> chains_;
};

// Classifies faces of one dimension under U_1, ..., U_k and then the full group, each round
// comparing only the representatives left by the previous one.
void iterated_classify(const VertexSet& vs, std::vector<Face>& faces, const std::vector<std::uint32_t>& ids,
                       const std::vector<std::shared_ptr<const PermGroup>>& chain, TransformationFinder& finder,
                       ClassifyStats& stats, bool verify = true);

FaceHierarchy construct_face_hierarchy(const VertexSet& vs, const HierarchyOptions& opt = {});

// Re-checks hierarchy property (i) at every level: each representative intersected with the
// children of one representative parent gives back exactly its recorded children.
bool check_children_complete(const VertexSet& vs, const FaceHierarchy& h);
// Every transformation maps the representative's vertex set onto the face's.
bool check_face_witnesses(const VertexSet& vs, const FaceHierarchy& h);

}  // namespace latq
