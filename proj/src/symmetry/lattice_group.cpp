#include <algorithm>
#include <map>

#include "latq/error.hpp"
#include "latq/symmetry.hpp"

namespace latq {

std::size_t QVecHash::operator()(const QVec& v) const {
  std::size_t h = 0x9e3779b97f4a7c15ULL ^ v.size();
  for (const Rational& q : v) h = (h ^ hash_value(q)) * 0x100000001b3ULL + (h >> 29);
  return h;
}

VectorIndex::VectorIndex(const std::vector<QVec>& vs) {
  for (const QVec& v : vs) insert(v);
}

Point VectorIndex::insert(const QVec& v) {
  auto [it, fresh] = map_.emplace(v, static_cast<Point>(items_.size()));
  if (fresh) items_.push_back(v);
  return it->second;
}

std::optional<Point> VectorIndex::find(const QVec& v) const {
  auto it = map_.find(v);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

namespace {

// n independent ground vectors, exact.
std::vector<Point> choose_frame(const VectorIndex& ground, std::size_t n) {
  if (ground.size() == 0) fail(ErrorKind::Faithfulness, "empty ground set");
  DMat rows;
  for (const QVec& v : ground.items()) rows.push_back(shadow(v));
  std::vector<std::size_t> pick = independent_rows(rows, n, 1e-9);
  if (pick.size() < n) fail(ErrorKind::Faithfulness, "ground set does not span the space");
  QMat f;
  for (std::size_t i : pick) f.push_back(ground[static_cast<Point>(i)]);
  if (rank(f) != n) fail(ErrorKind::Faithfulness, "ground set does not span the space");
  return {pick.begin(), pick.end()};
}

QMat frame_matrix(const VectorIndex& ground, const std::vector<Point>& frame) {
  QMat f;
  for (Point p : frame) f.push_back(ground[p]);
  return f;
}

}  // namespace

LatticeGroup::LatticeGroup(const MatrixGroup& g, const std::vector<QVec>& ground,
                           std::optional<Integer> known_order, std::uint64_t seed)
    : ground_(std::make_shared<VectorIndex>(ground)) {
  const std::size_t n = ground.empty() ? 0 : ground.front().size();
  if (ground_->size() != ground.size()) fail(ErrorKind::Parameter, "ground set has duplicates");
  frame_ = choose_frame(*ground_, n);
  frame_inverse_ = *inverse(frame_matrix(*ground_, frame_));
  init_coords();
  std::vector<Perm> gens;
  for (const QMat& r : g.generators) {
    if (r.size() != n) fail(ErrorKind::Shape, "generator size mismatch");
    Perm p = permutation(r);
    if (!(matrix(p) == r)) fail(ErrorKind::Consistency, "permutation image does not round-trip");
    gens.push_back(std::move(p));
  }
  if (known_order)
    perm_ = std::make_shared<PermGroup>(PermGroup::with_known_order(ground_->size(), gens, *known_order, seed));
  else
    perm_ = std::make_shared<PermGroup>(PermGroup::schreier_sims(ground_->size(), gens, {}, seed));
}

LatticeGroup::LatticeGroup(std::shared_ptr<const VectorIndex> ground, std::shared_ptr<const PermGroup> perm,
                           std::vector<Point> frame, QMat frame_inverse)
    : ground_(std::move(ground)), perm_(std::move(perm)), frame_(std::move(frame)),
      frame_inverse_(std::move(frame_inverse)) {
  init_coords();
}

void LatticeGroup::init_coords() {
  auto c = std::make_shared<std::vector<QVec>>();
  for (const QVec& v : ground_->items()) c->push_back(frame_coordinates(v));
  ground_coords_ = c;
}

LatticeGroup LatticeGroup::with_group(std::shared_ptr<const PermGroup> perm) const {
  return LatticeGroup(ground_, std::move(perm), frame_, frame_inverse_);
}

Perm LatticeGroup::permutation(const QMat& r) const {
  std::vector<Point> img(ground_->size());
  for (Point i = 0; i < ground_->size(); ++i) {
    auto j = ground_->find(vecmat((*ground_)[i], r));
    if (!j) fail(ErrorKind::Invariance, "ground set not invariant under " + std::string("generator"));
    img[i] = *j;
  }
  return Perm(std::move(img));
}

QMat LatticeGroup::matrix(const Perm& g) const {
  QMat img;
  for (Point p : frame_) img.push_back((*ground_)[g[p]]);
  return matmul(frame_inverse_, img);
}

QVec LatticeGroup::frame_coordinates(const QVec& x) const { return vecmat(x, frame_inverse_); }

QVec LatticeGroup::apply_coords(const Perm& g, const QVec& c) const {
  const std::size_t n = frame_.size();
  QVec out(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(c[i]) == 0) continue;
    const QVec& v = (*ground_)[g[frame_[i]]];
    for (std::size_t j = 0; j < n; ++j) out[j] += c[i] * v[j];
  }
  return out;
}

QVec LatticeGroup::apply(const Perm& g, const QVec& x) const { return apply_coords(g, frame_coordinates(x)); }

std::vector<Point> LatticeGroup::compress(const Perm& g) const {
  std::vector<Point> img;
  img.reserve(frame_.size());
  for (Point p : frame_) img.push_back(g[p]);
  return img;
}

QMat LatticeGroup::matrix_from_images(const std::vector<Point>& frame_images) const {
  QMat img;
  for (Point p : frame_images) img.push_back((*ground_)[p]);
  return matmul(frame_inverse_, img);
}

Perm LatticeGroup::expand(const std::vector<Point>& frame_images) const {
  const auto& coords = ground_coords_;
  const std::size_t n = frame_.size();
  std::vector<Point> img(ground_->size());
  for (Point i = 0; i < ground_->size(); ++i) {
    QVec out(n, Rational(0));
    const QVec& c = (*coords)[i];
    for (std::size_t k = 0; k < n; ++k) {
      if (sgn(c[k]) == 0) continue;
      const QVec& v = (*ground_)[frame_images[k]];
      for (std::size_t j = 0; j < n; ++j) out[j] += c[k] * v[j];
    }
    auto j = ground_->find(out);
    if (!j) fail(ErrorKind::Invariance, "frame images do not define a symmetry");
    img[i] = *j;
  }
  return Perm(std::move(img));
}

MatrixGroup LatticeGroup::matrix_generators() const {
  MatrixGroup m;
  for (const Perm& g : perm_->generators()) m.generators.push_back(matrix(g));
  return m;
}

LatticeGroup to_permutation_group(const MatrixGroup& g, const RelevantVectorSet& ground, std::uint64_t seed) {
  return LatticeGroup(g, ground.vectors, std::nullopt, seed);
}

// ---- classified ground points --------------------------------------------------

ClassifiedPoints::ClassifiedPoints(std::shared_ptr<const LatticeGroup> g, std::size_t cap) : g_(std::move(g)) {
  const std::size_t deg = g_->perm().degree();
  const VectorIndex& ground = g_->ground();
  std::vector<std::int64_t> orbit_id(deg, -1);
  std::vector<Point> mins;
  for (Point x = 0; x < deg; ++x) {
    if (orbit_id[x] >= 0) continue;
    std::int64_t id = static_cast<std::int64_t>(mins.size());
    Point best = x;
    for (Point p : g_->perm().orbit(x)) {
      orbit_id[p] = id;
      if (canonical_less(ground[p], ground[best])) best = p;
    }
    mins.push_back(best);
  }
  std::vector<std::size_t> order(mins.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return canonical_less(ground[mins[a]], ground[mins[b]]); });
  std::vector<std::size_t> rank(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
  class_.resize(deg);
  for (Point x = 0; x < deg; ++x) class_[x] = rank[orbit_id[x]];
  for (std::size_t i : order) {
    reps_.push_back(mins[i]);
    trees_.push_back(std::make_unique<OrbitTree>(mins[i], g_->perm().generators_ptr(), point_action(), cap));
  }
  stab_.resize(reps_.size());
}

Perm ClassifiedPoints::witness(Point p) const { return trees_[class_[p]]->transporter(p); }

std::shared_ptr<const PermGroup> ClassifiedPoints::rep_stabilizer(std::size_t c) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (stab_[c]) return stab_[c];
  }
  auto s = std::make_shared<const PermGroup>(latq::stabilizer(g_->perm(), reps_[c], point_action(), 1 + c));
  std::lock_guard<std::mutex> lock(mu_);
  stab_[c] = s;
  return s;
}

PermGroup ClassifiedPoints::stabilizer(Point p) const {
  return rep_stabilizer(class_[p])->conjugate(witness(p));
}

Coset ClassifiedPoints::transformation_coset(Point x, Point y) const {
  if (class_[x] != class_[y]) fail(ErrorKind::ClassMismatch, "points lie in different classes");
  Perm gx = witness(x);
  Perm gy = witness(y);
  auto stab = std::make_shared<const PermGroup>(rep_stabilizer(class_[x])->conjugate(gx));
  return {gy * gx.inverse(), stab};
}

// ---- matrix orbits --------------------------------------------------------------

std::vector<OrbitEntry> orbit_with_witnesses(const MatrixGroup& g, const QVec& v, std::size_t cap) {
  std::vector<OrbitEntry> out;
  VectorIndex seen;
  seen.insert(v);
  out.push_back({v, identity<Rational>(v.size())});
  for (std::size_t h = 0; h < out.size(); ++h) {
    for (const QMat& r : g.generators) {
      QVec w = vecmat(out[h].vector, r);
      if (seen.find(w)) continue;
      seen.insert(w);
      out.push_back({std::move(w), matmul(out[h].witness, r)});
      if (out.size() > cap) fail(ErrorKind::Resource, "orbit exceeds cap");
    }
  }
  return out;
}

// ---- laminations --------------------------------------------------------------------

namespace {

QMat block_diag(const QMat& r, const Rational& e) {
  const std::size_t n = r.size();
  QMat m(n + 1, QVec(n + 1, Rational(0)));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = r[i][j];
  m[n][n] = e;
  return m;
}

}  // namespace

LatticeGroup discover_laminated_symmetry(const Lattice& laminated, const LatticeGroup& base_group,
                                         const RelevantVectorSet& relevant, std::uint64_t seed) {
  if (!laminated.lamination) fail(ErrorKind::Structure, "lattice is not a lamination");
  const Lattice& base = *laminated.lamination->base;
  const QVec& h = laminated.lamination->offset;
  if (base_group.dim() != base.dim()) fail(ErrorKind::Shape, "base group dimension mismatch");

  // Classes of R^n / base lattice, keyed by fractional lattice coordinates.
  auto key = [&base](const QVec& x) {
    QVec z = base.coordinates(x);
    for (Rational& c : z) {
      Integer f;
      mpz_fdiv_q(f.get_mpz_t(), c.get_num_mpz_t(), c.get_den_mpz_t());
      c -= f;
    }
    return vecmat(z, base.basis);
  };
  auto classes = std::make_shared<VectorIndex>();
  Point start = classes->insert(key(h));
  Action act = [&base_group, classes, &key](Point p, const Perm& g) {
    return classes->insert(key(base_group.apply(g, (*classes)[p])));
  };
  OrbitTree tree(start, base_group.perm().generators_ptr(), act);
  PermGroup plus = stabilizer(base_group.perm(), start, act, seed);

  std::vector<QMat> gens;
  for (const Perm& s : plus.generators()) gens.push_back(block_diag(base_group.matrix(s), Rational(1)));
  Integer order = plus.order();
  QVec minus_h = h;
  for (Rational& c : minus_h) c = -c;
  auto neg = classes->find(key(minus_h));
  if (neg && tree.contains(*neg)) {
    gens.push_back(block_diag(base_group.matrix(tree.transporter(*neg)), Rational(-1)));
    order *= 2;
  }
  if (gens.empty()) gens.push_back(identity<Rational>(base.dim() + 1));
  // the permutation image checks that every element keeps the relevant vectors
  return LatticeGroup(MatrixGroup{gens}, relevant.vectors, order, seed);
}

}  // namespace latq
