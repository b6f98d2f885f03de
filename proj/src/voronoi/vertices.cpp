#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "latq/error.hpp"
#include "latq/voronoi.hpp"

namespace latq {

// ---- store ------------------------------------------------------------------------

std::uint64_t VertexStore::hash(std::span<const Point> key) {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ key.size();
  for (Point p : key) {
    h ^= p + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h *= 0xbf58476d1ce4e5b9ULL;
  }
  return h ^ (h >> 31);
}

std::optional<std::uint32_t> VertexStore::find(std::span<const Point> key) const {
  if (slots_.empty()) return std::nullopt;
  const std::size_t mask = slots_.size() - 1;
  for (std::size_t i = hash(key) & mask;; i = (i + 1) & mask) {
    std::uint32_t id = slots_[i];
    if (id == ~0u) return std::nullopt;
    auto have = normals(id);
    if (std::equal(have.begin(), have.end(), key.begin(), key.end())) return id;
  }
}

void VertexStore::grow() {
  std::size_t cap = slots_.empty() ? 1024 : slots_.size() * 2;
  slots_.assign(cap, ~0u);
  const std::size_t mask = cap - 1;
  for (std::uint32_t id = 0; id < size(); ++id) {
    std::size_t i = hash(normals(id)) & mask;
    while (slots_[i] != ~0u) i = (i + 1) & mask;
    slots_[i] = id;
  }
}

std::pair<std::uint32_t, bool> VertexStore::insert(std::span<const Point> key) {
  if (auto id = find(key)) return {*id, false};
  if ((size() + 1) * 2 > slots_.size()) grow();
  auto id = static_cast<std::uint32_t>(size());
  data_.insert(data_.end(), key.begin(), key.end());
  offsets_.push_back(data_.size());
  const std::size_t mask = slots_.size() - 1;
  std::size_t i = hash(key) & mask;
  while (slots_[i] != ~0u) i = (i + 1) & mask;
  slots_[i] = id;
  return {id, true};
}

// ---- inequalities -------------------------------------------------------------------

FacetSystem::FacetSystem(const Lattice& l, const std::vector<QVec>& relevant) : lattice(&l), normals(relevant) {
  for (const QVec& r : normals) {
    QVec m = vecmat(r, l.metric);
    rhs.push_back(dot(m, r));
    DVec row = shadow(m);
    for (double& x : row) x *= 2;
    a.push_back(std::move(row));
    b.push_back(shadow(rhs.back()));
    mn.push_back(std::move(m));
  }
}

std::optional<std::vector<Point>> FacetSystem::tight_set(const QVec& x) const {
  std::vector<Point> out;
  DVec xs = shadow(x);
  Rational s;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    double f = 0;
    for (std::size_t j = 0; j < xs.size(); ++j) f += a[i][j] * xs[j];
    double gap = b[i] - f;
    if (gap > 1e-7 * (1 + std::abs(b[i]))) continue;  // clearly inside
    s = 2 * dot(x, mn[i]);
    int c = cmp(s, rhs[i]);
    if (c > 0) return std::nullopt;
    if (c == 0) out.push_back(static_cast<Point>(i));
  }
  return out;
}

std::vector<Point> FacetSystem::float_tight_set(const DVec& x, double tol) const {
  std::vector<Point> out;
  for (std::size_t i = 0; i < normals.size(); ++i) {
    double f = 0;
    for (std::size_t j = 0; j < x.size(); ++j) f += a[i][j] * x[j];
    if (std::abs(b[i] - f) <= tol * (1 + std::abs(b[i]))) out.push_back(static_cast<Point>(i));
  }
  return out;
}

QVec FacetSystem::lift(std::span<const Point> ids) const {
  const std::size_t n = lattice->dim();
  DMat rows;
  for (Point p : ids) rows.push_back(a[p]);
  std::vector<std::size_t> pick = independent_rows(rows, n, 1e-9);
  if (pick.size() < n) fail(ErrorKind::RankDeficiency, "normal set does not determine a point");
  QMat sel;
  for (std::size_t i : pick) sel.push_back(normals[ids[i]]);
  return solve_vertex_lift(sel, lattice->metric);
}

// ---- classified vertex set ------------------------------------------------------------

VertexSet::VertexSet(const Lattice& l, std::shared_ptr<const LatticeGroup> g)
    : lattice_(std::make_shared<Lattice>(l)), group_(std::move(g)) {
  normal_classes_ = std::make_unique<ClassifiedPoints>(group_);
  system_ = std::make_unique<FacetSystem>(*lattice_, group_->ground().items());
}

std::uint32_t VertexSet::act(std::uint32_t v, const Perm& g) const {
  thread_local std::vector<Point> buf;
  auto ns = store_.normals(v);
  buf.assign(ns.begin(), ns.end());
  for (Point& p : buf) p = g[p];
  std::sort(buf.begin(), buf.end());
  auto id = store_.find(buf);
  if (!id) fail(ErrorKind::Consistency, "vertex image not in the vertex set");
  return *id;
}

Action VertexSet::action() const {
  return [this](Point v, const Perm& g) { return act(v, g); };
}

Perm VertexSet::from_root(std::uint32_t v) const {
  const auto& gens = group_->perm().generators();
  Perm g = group_->perm().identity();
  while (label_[v] >= 0) {
    g = g * gens[static_cast<std::size_t>(label_[v])];
    v = parent_[v];
  }
  return g;
}

Perm VertexSet::witness(std::uint32_t v) const {
  return from_root(v) * classes_[class_of_[v]].root_to_rep_inverse;
}

std::shared_ptr<const PermGroup> VertexSet::rep_stabilizer(std::size_t c) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (stab_.size() != classes_.size()) stab_.assign(classes_.size(), nullptr);
    if (stab_[c]) return stab_[c];
  }
  auto s = std::make_shared<const PermGroup>(latq::stabilizer(
      group_->perm(), classes_[c].rep, classes_[c].size, [this](Point p) { return witness(p); }, action(),
      1 + c));
  std::lock_guard<std::mutex> lock(mu_);
  stab_[c] = s;
  return s;
}

QVec VertexSet::coords(std::uint32_t v) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = coords_.find(v);
    if (it != coords_.end()) return it->second;
  }
  QVec x = system_->lift(store_.normals(v));
  std::lock_guard<std::mutex> lock(mu_);
  coords_.emplace(v, x);
  return x;
}

bool VertexSet::add_class(const QVec& x, std::span<const Point> key) {
  if (store_.find(key)) return false;
  const auto& gens = group_->perm().generators();
  const auto c = static_cast<std::uint32_t>(classes_.size());
  auto [root, fresh] = store_.insert(key);
  (void)fresh;
  class_of_.push_back(c);
  parent_.push_back(root);
  label_.push_back(-1);
  {
    std::lock_guard<std::mutex> lock(mu_);
    coords_.emplace(root, x);
  }
  std::vector<Point> buf;
  for (std::uint32_t u = root; u < store_.size(); ++u) {
    for (std::size_t s = 0; s < gens.size(); ++s) {
      auto ns = store_.normals(u);
      buf.assign(ns.begin(), ns.end());
      for (Point& p : buf) p = gens[s][p];
      std::sort(buf.begin(), buf.end());
      auto [w, added] = store_.insert(buf);
      if (!added) continue;
      class_of_.push_back(c);
      parent_.push_back(u);
      label_.push_back(static_cast<std::int32_t>(s));
      (void)w;
    }
  }
  Class cl;
  cl.root = root;
  cl.size = store_.size() - root;
  cl.rep = root;
  for (std::uint32_t u = root + 1; u < store_.size(); ++u) {
    auto a = store_.normals(u), b = store_.normals(cl.rep);
    if (std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end())) cl.rep = u;
  }
  cl.root_to_rep_inverse = from_root(cl.rep).inverse();
  classes_.push_back(std::move(cl));
  return true;
}

void VertexSet::finalize() {
  std::vector<std::size_t> order(classes_.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    auto a = store_.normals(classes_[x].rep), b = store_.normals(classes_[y].rep);
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  });
  std::vector<std::uint32_t> rank(order.size());
  std::vector<Class> sorted;
  for (std::size_t i = 0; i < order.size(); ++i) {
    rank[order[i]] = static_cast<std::uint32_t>(i);
    sorted.push_back(std::move(classes_[order[i]]));
  }
  classes_ = std::move(sorted);
  for (auto& c : class_of_) c = rank[c];
  std::lock_guard<std::mutex> lock(mu_);
  stab_.assign(classes_.size(), nullptr);
}

// ---- search ---------------------------------------------------------------------------

std::unique_ptr<VertexSet> find_vertices(const Lattice& l, std::shared_ptr<const LatticeGroup> g,
                                         const VertexSearchOptions& opt) {
  auto vs = std::make_unique<VertexSet>(l, std::move(g));
  const FacetSystem& sys = vs->system();
  const std::size_t n = l.dim();
  const std::size_t m = sys.normals.size();
  if (m == 0) fail(ErrorKind::Consistency, "no relevant vectors");
  Enumerator en(vs->lattice());
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);

  std::deque<QVec> pending;  // new class roots still to be translated
  auto add = [&](const QVec& x, const std::vector<Point>& key) {
    if (!vs->add_class(x, key)) return false;
    pending.push_back(x);
    return true;
  };
  auto translate_all = [&] {
    while (!pending.empty()) {
      QVec v = std::move(pending.front());
      pending.pop_front();
      for (const QVec& p : closest_lattice_points(vs->lattice(), en, v)) {
        bool zero = std::all_of(p.begin(), p.end(), [](const Rational& q) { return sgn(q) == 0; });
        if (zero) continue;
        QVec w = sub(v, p);
        auto key = sys.tight_set(w);
        if (!key || key->size() < n) fail(ErrorKind::Consistency, "translated vertex left the cell");
        if (add(w, *key)) ++vs->stats.classes_from_translation;
      }
    }
  };

  std::size_t streak = 0;
  for (std::size_t round = 0; round < opt.max_rounds && streak < opt.streak; ++round) {
    ++vs->stats.lp_rounds;
    const QVec& r = sys.normals[pick(rng)];
    DVec dir = shadow(r);
    double len = 0;
    for (double x : dir) len = std::max(len, std::abs(x));
    for (double& x : dir) x += opt.perturbation * len * unit(rng);
    // objective x M dir^T in frame coordinates
    DVec c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c[i] += shadow(l.metric[i][j]) * dir[j];
    bool found = false;
    for (const LpVertex& lv : lp_vertex_walk(sys, c)) {
      ++vs->stats.harvested;
      auto guess = sys.float_tight_set(lv.x);
      if (vs->find(guess)) continue;
      QVec x;
      try {
        x = sys.lift(lv.active);
      } catch (const Error&) {
        ++vs->stats.rejected;
        continue;
      }
      auto key = sys.tight_set(x);
      if (!key) {
        ++vs->stats.rejected;
        continue;
      }
      if (add(x, *key)) {
        ++vs->stats.classes_from_lp;
        found = true;
      }
      translate_all();
    }
    streak = found ? 0 : streak + 1;
  }
  vs->finalize();
  return vs;
}

}  // namespace latq
