#include <algorithm>
#include <functional>
#include <map>

#include "latq/error.hpp"
#include "latq/voronoi.hpp"

namespace latq {

namespace {

constexpr std::uint64_t kNormalTag = 1ULL << 40;

Integer factorial_product(const std::map<std::uint64_t, std::uint32_t>& counts) {
  Integer p = 1;
  for (const auto& [c, k] : counts) {
    Integer f;
    mpz_fac_ui(f.get_mpz_t(), k);
    p *= f;
  }
  return p;
}

std::size_t point_class(const VertexSet& vs, DefiningKind kind, Point p) {
  return kind == DefiningKind::Vertices ? vs.class_of(p) : vs.normal_classes().class_of(p);
}

const std::vector<Point>& defining_points(const Face& f, DefiningKind kind) {
  return kind == DefiningKind::Vertices ? f.vertices : f.normals;
}

}  // namespace

Fingerprint fingerprint(const VertexSet& vs, const Face& f) {
  std::map<std::uint64_t, std::uint32_t> counts;
  for (std::uint32_t v : f.vertices) ++counts[vs.class_of(v)];
  for (Point q : f.normals) ++counts[kNormalTag | vs.normal_classes().class_of(q)];
  return {counts.begin(), counts.end()};
}

DefiningSet choose_defining_set(const VertexSet& vs, const Face& f) {
  std::map<std::uint64_t, std::uint32_t> cv, cn;
  for (std::uint32_t v : f.vertices) ++cv[vs.class_of(v)];
  for (Point q : f.normals) ++cn[vs.normal_classes().class_of(q)];
  Integer pv = factorial_product(cv), pn = factorial_product(cn);
  DefiningKind kind;
  if (pv != pn)
    kind = pv < pn ? DefiningKind::Vertices : DefiningKind::Normals;
  else
    kind = f.vertices.size() < f.normals.size() ? DefiningKind::Vertices : DefiningKind::Normals;

  DefiningSet d{kind, {}, {}};
  std::map<std::uint64_t, std::vector<Point>> by_class;
  for (Point p : defining_points(f, kind)) by_class[point_class(vs, kind, p)].push_back(p);
  std::vector<std::pair<std::uint64_t, std::vector<Point>>> parts(by_class.begin(), by_class.end());
  std::stable_sort(parts.begin(), parts.end(),
                   [](const auto& a, const auto& b) { return a.second.size() < b.second.size(); });
  for (auto& [c, pts] : parts) {
    d.part_class.push_back(c);
    d.parts.push_back(std::move(pts));
  }
  return d;
}

// ---- transformations ---------------------------------------------------------------------

TransformationFinder::TransformationFinder(const VertexSet& vs, std::size_t budget) : vs_(vs), budget_(budget) {}

TransformationFinder::Chain& TransformationFinder::chain_for(const Face& f, std::shared_ptr<const PermGroup> group,
                                                             std::uint64_t key) {
  auto it = chains_.find(key);
  if (it != chains_.end()) return *it->second;
  auto c = std::make_unique<Chain>();
  c->def = choose_defining_set(vs_, f);
  for (std::size_t i = 0; i < c->def.parts.size(); ++i)
    for (Point p : c->def.parts[i]) {
      c->xs.push_back(p);
      c->part_of.push_back(i);
    }
  c->full_group = group == nullptr;
  c->group = group ? group : vs_.group().perm_ptr();
  Level l0;
  l0.k = c->group;
  c->levels.push_back(std::move(l0));
  return *chains_.emplace(key, std::move(c)).first->second;
}

// Makes levels[k] available: K_k fixes xs[0..k) pointwise; its orbit tree is on xs[k].
void TransformationFinder::extend(Chain& c, std::size_t k) {
  Action act = c.def.kind == DefiningKind::Vertices ? vs_.action() : point_action();
  for (;;) {
    std::size_t j = c.levels.size() - 1;
    Level& lv = c.levels[j];
    if (!lv.tree && j < c.xs.size() && !(j == 0 && c.full_group))
      lv.tree = std::make_unique<OrbitTree>(c.xs[j], lv.k->generators_ptr(), act);
    if (j >= k) return;
    Level next;
    if (j == 0 && c.full_group) {
      // the full group's stabilizer comes from the class witnesses
      Point x = c.xs[0];
      if (c.def.kind == DefiningKind::Vertices)
        next.k = std::make_shared<const PermGroup>(vs_.rep_stabilizer(vs_.class_of(x))->conjugate(vs_.witness(x)));
      else
        next.k = std::make_shared<const PermGroup>(vs_.normal_classes().stabilizer(x));
    } else {
      const OrbitTree* t = lv.tree.get();
      next.k = std::make_shared<const PermGroup>(
          stabilizer(*lv.k, c.xs[j], t->size(), [t](Point p) { return t->transporter(p); }, act, 1 + j));
    }
    c.levels.push_back(std::move(next));
  }
}

std::optional<Perm> TransformationFinder::find(const Face& f, const Face& f2, std::shared_ptr<const PermGroup> group,
                                               std::uint64_t key, ClassifyStats* stats) {
  if (stats) ++stats->comparisons;
  const Perm id = vs_.group().perm().identity();
  if (f.vertices == f2.vertices) return id;
  if (f.vertices.size() != f2.vertices.size() || f.normals.size() != f2.normals.size()) return std::nullopt;
  Chain& c = chain_for(f, group, key);
  const DefiningKind kind = c.def.kind;
  Action act = kind == DefiningKind::Vertices ? vs_.action() : point_action();
  const std::vector<Point>& target = defining_points(f2, kind);

  // candidate images per part
  std::map<std::uint64_t, std::vector<Point>> by_class;
  for (Point p : target) by_class[point_class(vs_, kind, p)].push_back(p);
  std::vector<const std::vector<Point>*> cand(c.def.parts.size());
  for (std::size_t i = 0; i < c.def.parts.size(); ++i) {
    auto it = by_class.find(c.def.part_class[i]);
    if (it == by_class.end() || it->second.size() != c.def.parts[i].size()) return std::nullopt;
    cand[i] = &it->second;
  }
  std::vector<Point> sorted_target(target);
  std::sort(sorted_target.begin(), sorted_target.end());
  auto in_target = [&](Point p) { return std::binary_search(sorted_target.begin(), sorted_target.end(), p); };

  std::size_t nodes = 0;
  std::vector<Point> used;
  std::optional<Perm> result;
  std::function<bool(std::size_t, const Perm&)> dfs = [&](std::size_t k, const Perm& g) -> bool {
    if (k < c.xs.size()) extend(c, k);
    if (k == c.xs.size() || c.levels[k].k->is_trivial()) {
      for (std::size_t j = k; j < c.xs.size(); ++j)
        if (!in_target(act(c.xs[j], g))) return false;
      result = g;
      return true;
    }
    const OrbitTree* tree = c.levels[k].tree.get();  // levels may grow below us
    Perm gi = g.inverse();
    for (Point y : *cand[c.part_of[k]]) {
      if (std::find(used.begin(), used.end(), y) != used.end()) continue;
      if (++nodes > budget_) fail(ErrorKind::BudgetExceeded, "permutation budget exceeded in face comparison");
      Perm next;
      if (k == 0 && c.full_group) {
        if (kind == DefiningKind::Vertices)
          next = vs_.witness(y) * vs_.witness(c.xs[0]).inverse();
        else
          next = vs_.normal_classes().witness(y) * vs_.normal_classes().witness(c.xs[0]).inverse();
      } else {
        Point z = act(y, gi);
        if (!tree->contains(z)) continue;
        next = g * tree->transporter(z);
      }
      used.push_back(y);
      bool ok = dfs(k + 1, next);
      used.pop_back();
      if (ok) return true;
    }
    return false;
  };
  dfs(0, id);
  if (stats) {
    stats->nodes += nodes;
    stats->max_nodes = std::max(stats->max_nodes, nodes);
  }
  if (!result) return std::nullopt;
  // the image of V(F) must be V(F') exactly
  std::vector<std::uint32_t> img;
  img.reserve(f.vertices.size());
  for (std::uint32_t v : f.vertices) img.push_back(vs_.act(v, *result));
  std::sort(img.begin(), img.end());
  if (img != f2.vertices) fail(ErrorKind::Consistency, "transformation does not map the vertex sets");
  if (stats) ++stats->equivalences;
  return result;
}

// ---- classification -------------------------------------------------------------------

void iterated_classify(const VertexSet& vs, std::vector<Face>& faces, const std::vector<std::uint32_t>& ids,
                       const std::vector<std::shared_ptr<const PermGroup>>& chain, TransformationFinder& finder,
                       ClassifyStats& stats, bool verify) {
  std::vector<std::shared_ptr<const PermGroup>> groups(chain);
  groups.push_back(nullptr);
  std::map<Fingerprint, std::vector<std::uint32_t>> buckets;
  for (std::uint32_t f : ids) buckets[fingerprint(vs, faces[f])].push_back(f);

  struct Link {
    std::uint32_t to;
    Perm g;  // face = g(to)
  };
  std::map<std::uint32_t, Link> link;
  std::vector<std::uint32_t> reps;
  for (auto& [fp, members] : buckets) {
    std::vector<std::uint32_t> pending = members;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
      std::vector<std::uint32_t> kept;
      for (std::uint32_t f : pending) {
        bool merged = false;
        for (std::uint32_t r : kept) {
          auto g = finder.find(faces[r], faces[f], groups[gi], (std::uint64_t(r) << 6) | gi, &stats);
          if (!g) continue;
          link[f] = {r, std::move(*g)};
          merged = true;
          break;
        }
        if (!merged) kept.push_back(f);
      }
      pending = std::move(kept);
    }
    reps.insert(reps.end(), pending.begin(), pending.end());
  }

  const LatticeGroup& lg = vs.group();
  std::int64_t next_class = 0;
  for (std::uint32_t r : reps) {
    faces[r].class_id = next_class++;
    faces[r].representative = -1;
    faces[r].transformation.clear();
  }
  for (auto& [f, l] : link) {
    Perm g = l.g;
    std::uint32_t r = l.to;
    for (auto it = link.find(r); it != link.end(); it = link.find(r)) {
      g = g * it->second.g;
      r = it->second.to;
    }
    if (verify) {
      std::vector<std::uint32_t> img;
      for (std::uint32_t v : faces[r].vertices) img.push_back(vs.act(v, g));
      std::sort(img.begin(), img.end());
      if (img != faces[f].vertices) fail(ErrorKind::Consistency, "composed face witness fails");
    }
    faces[f].class_id = -1;
    faces[f].representative = r;
    faces[f].transformation = lg.compress(g);
  }
}

}  // namespace latq
