#include <algorithm>
#include <deque>
#include <numeric>

#include "latq/error.hpp"
#include "latq/symmetry.hpp"

namespace latq {

Perm::Perm(std::size_t degree) : img_(degree) { std::iota(img_.begin(), img_.end(), Point{0}); }

Perm::Perm(std::vector<Point> images) : img_(std::move(images)) {
  std::vector<char> seen(img_.size(), 0);
  for (Point p : img_) {
    if (p >= img_.size() || seen[p]) fail(ErrorKind::Parameter, "not a permutation");
    seen[p] = 1;
  }
}

bool Perm::is_identity() const {
  for (std::size_t i = 0; i < img_.size(); ++i)
    if (img_[i] != i) return false;
  return true;
}

Perm Perm::inverse() const {
  Perm r;
  r.img_.resize(img_.size());
  for (std::size_t i = 0; i < img_.size(); ++i) r.img_[img_[i]] = static_cast<Point>(i);
  return r;
}

Perm operator*(const Perm& a, const Perm& b) {
  Perm r;
  r.img_.resize(b.img_.size());
  const Point* pa = a.img_.data();
  const Point* pb = b.img_.data();
  Point* pr = r.img_.data();
  for (std::size_t i = 0, n = b.img_.size(); i < n; ++i) pr[i] = pa[pb[i]];
  return r;
}

Action point_action() {
  return [](Point p, const Perm& g) { return g[p]; };
}

// ---- OrbitTree ---------------------------------------------------------------

OrbitTree::OrbitTree(Point root, std::shared_ptr<const std::vector<Perm>> gens, const Action& act,
                     std::size_t cap)
    : gens_(std::move(gens)) {
  points_.push_back(root);
  edges_.push_back({0, -1});
  index_.emplace(root, 0);
  for (std::size_t head = 0; head < points_.size(); ++head) {
    Point p = points_[head];
    for (std::size_t s = 0; s < gens_->size(); ++s) {
      Point q = act(p, (*gens_)[s]);
      if (index_.count(q)) continue;
      index_.emplace(q, static_cast<std::uint32_t>(points_.size()));
      points_.push_back(q);
      edges_.push_back({static_cast<std::uint32_t>(head), static_cast<std::int32_t>(s)});
      if (cap && points_.size() > cap) fail(ErrorKind::Resource, "orbit exceeds cap");
    }
  }
}

Perm OrbitTree::transporter(Point p) const {
  auto it = index_.find(p);
  if (it == index_.end()) fail(ErrorKind::Domain, "point outside orbit");
  std::size_t deg = gens_->empty() ? 0 : (*gens_)[0].degree();
  Perm u(deg);
  // p = s_k(...s_1(root)); u = s_k * ... * s_1
  for (std::uint32_t i = it->second; edges_[i].label >= 0; i = edges_[i].parent)
    u = u * (*gens_)[edges_[i].label];
  return u;
}

std::size_t OrbitTree::depth(Point p) const {
  auto it = index_.find(p);
  if (it == index_.end()) fail(ErrorKind::Domain, "point outside orbit");
  std::size_t d = 0;
  for (std::uint32_t i = it->second; edges_[i].label >= 0; i = edges_[i].parent) ++d;
  return d;
}

// ---- PermGroup ---------------------------------------------------------------

namespace {

class ProductReplacement {
 public:
  ProductReplacement(std::size_t degree, const std::vector<Perm>& gens, std::uint64_t seed)
      : rng_(seed), acc_(degree) {
    if (gens.empty()) return;
    while (r_.size() < 10)
      for (const Perm& g : gens) r_.push_back(g);
    for (int i = 0; i < 50; ++i) next();
  }
  Perm next() {
    if (r_.empty()) return acc_;
    std::uniform_int_distribution<std::size_t> pick(0, r_.size() - 1);
    std::size_t i = pick(rng_), j = pick(rng_);
    while (j == i) j = pick(rng_);
    if (rng_() & 1)
      r_[i] = r_[i] * r_[j];
    else
      r_[i] = r_[i] * r_[j].inverse();
    acc_ = acc_ * r_[i];
    return acc_;
  }

 private:
  std::mt19937_64 rng_;
  std::vector<Perm> r_;
  Perm acc_;
};

}  // namespace

PermGroup::PermGroup(std::size_t degree) : degree_(degree), gens_(std::make_shared<std::vector<Perm>>()) {}

std::vector<Point> PermGroup::base() const {
  std::vector<Point> b;
  for (const Level& lv : levels_) b.push_back(lv.beta);
  return b;
}

Integer PermGroup::order() const {
  Integer o = 1;
  for (const Level& lv : levels_) o *= static_cast<unsigned long>(lv.orbit.size());
  return o;
}

bool PermGroup::is_trivial() const {
  for (const Level& lv : levels_)
    if (lv.orbit.size() > 1) return false;
  return true;
}

void PermGroup::rebuild_orbit(Level& lv) const {
  lv.label.assign(degree_, -1);
  lv.orbit.assign(1, lv.beta);
  lv.label[lv.beta] = -2;
  for (std::size_t head = 0; head < lv.orbit.size(); ++head) {
    Point p = lv.orbit[head];
    for (std::size_t s = 0; s < lv.gens.size(); ++s) {
      Point q = lv.gens[s][p];
      if (lv.label[q] != -1) continue;
      lv.label[q] = static_cast<std::int32_t>(s);
      lv.orbit.push_back(q);
    }
  }
}

bool PermGroup::in_basic_orbit(std::size_t level, Point p) const { return levels_[level].label[p] != -1; }

Perm PermGroup::transversal(std::size_t level, Point p) const {
  const Level& lv = levels_[level];
  if (lv.label[p] == -1) fail(ErrorKind::Domain, "point outside basic orbit");
  Perm u(degree_);
  while (p != lv.beta) {
    std::int32_t s = lv.label[p];
    u = u * lv.gens[s];
    p = lv.inv[s][p];
  }
  return u;
}

Perm PermGroup::strip(std::size_t level, Point p, Perm g) const {
  const Level& lv = levels_[level];
  while (p != lv.beta) {
    std::int32_t s = lv.label[p];
    g = lv.inv[s] * g;
    p = lv.inv[s][p];
  }
  return g;
}

std::pair<Perm, std::size_t> PermGroup::sift_from(Perm g, std::size_t start) const {
  for (std::size_t i = start; i < levels_.size(); ++i) {
    Point p = g[levels_[i].beta];
    if (levels_[i].label[p] == -1) return {std::move(g), i};
    g = strip(i, p, std::move(g));
  }
  return {std::move(g), levels_.size()};
}

std::pair<Perm, std::size_t> PermGroup::sift(Perm g) const {
  if (g.degree() != degree_) fail(ErrorKind::Shape, "permutation degree mismatch");
  return sift_from(std::move(g), 0);
}

bool PermGroup::contains(const Perm& g) const {
  auto [r, j] = sift(g);
  return j == levels_.size() && r.is_identity();
}

Point PermGroup::choose_base_point(const Perm& h) const {
  if (!preference_.empty()) {
    for (Point p : preference_)
      if (h[p] != p) return p;
  }
  for (Point p = 0; p < degree_; ++p)
    if (h[p] != p) return p;
  fail(ErrorKind::Consistency, "identity has no moved point");
}

void PermGroup::add_strong_generator(const Perm& h, std::size_t upto) {
  if (upto == levels_.size()) {
    Level lv;
    lv.beta = choose_base_point(h);
    levels_.push_back(std::move(lv));
  }
  Perm hi = h.inverse();
  for (std::size_t l = 0; l <= upto; ++l) {
    levels_[l].gens.push_back(h);
    levels_[l].inv.push_back(hi);
    rebuild_orbit(levels_[l]);
  }
  gens_->push_back(h);
}

bool PermGroup::insert_residue(const Perm& g) {
  auto [r, j] = sift(g);
  if (j == levels_.size() && r.is_identity()) return false;
  add_strong_generator(r, j);
  return true;
}

namespace {

// Points ranked by the size of their orbit under gens, smallest first.
std::vector<std::uint32_t> orbit_preference(std::size_t degree, const std::vector<Perm>& gens) {
  std::vector<std::int64_t> orbit_of(degree, -1);
  std::vector<std::size_t> sizes;
  for (Point x = 0; x < degree; ++x) {
    if (orbit_of[x] >= 0) continue;
    std::int64_t id = static_cast<std::int64_t>(sizes.size());
    std::vector<Point> queue{x};
    orbit_of[x] = id;
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (const Perm& g : gens) {
        Point q = g[queue[h]];
        if (orbit_of[q] < 0) {
          orbit_of[q] = id;
          queue.push_back(q);
        }
      }
    sizes.push_back(queue.size());
  }
  std::vector<std::uint32_t> order(degree);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return sizes[orbit_of[a]] < sizes[orbit_of[b]];
  });
  return order;
}

}  // namespace

PermGroup PermGroup::schreier_sims(std::size_t degree, const std::vector<Perm>& gens,
                                   const std::vector<Point>& base_prefix, std::uint64_t seed) {
  PermGroup g(degree);
  for (const Perm& s : gens)
    if (s.degree() != degree) fail(ErrorKind::Shape, "generator degree mismatch");
  g.preference_ = orbit_preference(degree, gens);
  for (Point b : base_prefix) {
    Level lv;
    lv.beta = b;
    g.levels_.push_back(std::move(lv));
    g.rebuild_orbit(g.levels_.back());
  }
  for (const Perm& s : gens) g.insert_residue(s);

  // Random phase: stop after a streak of elements that sift through.
  ProductReplacement pr(degree, gens, seed);
  for (int streak = 0; streak < 30 && !gens.empty();) {
    if (g.insert_residue(pr.next()))
      streak = 0;
    else
      ++streak;
  }

  // Deterministic phase: every Schreier generator of every level sifts through the levels below.
  std::ptrdiff_t i = static_cast<std::ptrdiff_t>(g.levels_.size()) - 1;
  while (i >= 0) {
    bool clean = true;
    const std::size_t li = static_cast<std::size_t>(i);
    for (std::size_t oi = 0; oi < g.levels_[li].orbit.size() && clean; ++oi) {
      Point p = g.levels_[li].orbit[oi];
      Perm up = g.transversal(li, p);
      for (std::size_t s = 0; s < g.levels_[li].gens.size(); ++s) {
        const Level& lv = g.levels_[li];
        Point q = lv.gens[s][p];
        if (lv.label[q] == static_cast<std::int32_t>(s) && lv.inv[s][q] == p) continue;  // tree edge
        Perm h = g.strip(li, q, lv.gens[s] * up);
        auto [r, j] = g.sift_from(std::move(h), li + 1);
        if (j == g.levels_.size() && r.is_identity()) continue;
        g.add_strong_generator(r, j);
        i = static_cast<std::ptrdiff_t>(j);
        clean = false;
        break;
      }
    }
    if (clean) --i;
  }
  g.preference_.clear();
  return g;
}

PermGroup PermGroup::with_known_order(std::size_t degree, const std::vector<Perm>& gens,
                                      const Integer& order, const std::function<Perm()>& random,
                                      const std::vector<Point>& base_prefix) {
  PermGroup g(degree);
  for (Point b : base_prefix) {
    Level lv;
    lv.beta = b;
    g.levels_.push_back(std::move(lv));
    g.rebuild_orbit(g.levels_.back());
  }
  for (const Perm& s : gens) {
    if (s.degree() != degree) fail(ErrorKind::Shape, "generator degree mismatch");
    if (g.order() == order) break;
    g.insert_residue(s);
  }
  std::size_t misses = 0;
  while (g.order() < order) {
    if (g.insert_residue(random()))
      misses = 0;
    else if (++misses > 100000)
      fail(ErrorKind::Consistency, "random elements stopped producing new group elements");
  }
  if (g.order() != order) fail(ErrorKind::Consistency, "group exceeds its known order");
  return g;
}

PermGroup PermGroup::with_known_order(std::size_t degree, const std::vector<Perm>& gens,
                                      const Integer& order, std::uint64_t seed,
                                      const std::vector<Point>& base_prefix) {
  auto pr = std::make_shared<ProductReplacement>(degree, gens, seed);
  return with_known_order(degree, gens, order, [pr] { return pr->next(); }, base_prefix);
}

Perm PermGroup::random_element(std::mt19937_64& rng) const {
  Perm g(degree_);
  for (std::size_t l = 0; l < levels_.size(); ++l) {
    const auto& orb = levels_[l].orbit;
    std::uniform_int_distribution<std::size_t> pick(0, orb.size() - 1);
    g = g * transversal(l, orb[pick(rng)]);
  }
  return g;
}

void PermGroup::for_each_element(const std::function<bool(const Perm&)>& f) const {
  std::function<bool(std::size_t, const Perm&)> rec = [&](std::size_t l, const Perm& g) {
    if (l == levels_.size()) return f(g);
    for (Point p : levels_[l].orbit)
      if (!rec(l + 1, g * transversal(l, p))) return false;
    return true;
  };
  rec(0, Perm(degree_));
}

std::vector<Point> PermGroup::orbit(Point x) const {
  std::vector<char> seen(degree_, 0);
  std::vector<Point> out{x};
  seen[x] = 1;
  for (std::size_t h = 0; h < out.size(); ++h)
    for (const Perm& g : *gens_) {
      Point q = g[out[h]];
      if (!seen[q]) {
        seen[q] = 1;
        out.push_back(q);
      }
    }
  return out;
}

PermGroup PermGroup::conjugate(const Perm& g) const {
  PermGroup c(degree_);
  Perm gi = g.inverse();
  for (const Perm& s : *gens_) c.gens_->push_back(g * s * gi);
  for (const Level& lv : levels_) {
    Level n;
    n.beta = g[lv.beta];
    for (const Perm& s : lv.gens) n.gens.push_back(g * s * gi);
    for (const Perm& s : lv.inv) n.inv.push_back(g * s * gi);
    n.orbit.reserve(lv.orbit.size());
    for (Point p : lv.orbit) n.orbit.push_back(g[p]);
    n.label.assign(degree_, -1);
    for (Point p = 0; p < degree_; ++p) n.label[g[p]] = lv.label[p];
    c.levels_.push_back(std::move(n));
  }
  return c;
}

PermGroup PermGroup::rebase(const std::vector<Point>& prefix, std::uint64_t seed) const {
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return with_known_order(degree_, *gens_, order(), [this, rng] { return random_element(*rng); }, prefix);
}

}  // namespace latq
