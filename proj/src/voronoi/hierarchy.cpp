#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "latq/error.hpp"
#include "latq/voronoi.hpp"

namespace latq {

std::vector<Point> face_normals(const VertexSet& vs, std::span<const std::uint32_t> vertices) {
  if (vertices.empty()) return {};
  std::uint32_t first = vertices[0];
  for (std::uint32_t v : vertices)
    if (vs.normals(v).size() < vs.normals(first).size()) first = v;
  auto seed = vs.normals(first);
  std::vector<Point> common(seed.begin(), seed.end()), tmp;
  for (std::uint32_t v : vertices) {
    auto ns = vs.normals(v);
    tmp.clear();
    std::set_intersection(common.begin(), common.end(), ns.begin(), ns.end(), std::back_inserter(tmp));
    common.swap(tmp);
    if (common.empty()) break;
  }
  return common;
}

namespace {

std::size_t float_rank(const VertexSet& vs, const std::vector<Point>& normals, double eps) {
  DMat rows;
  for (Point q : normals) rows.push_back(vs.system().a[q]);
  return rank_float(rows, eps);
}

std::size_t exact_rank(const VertexSet& vs, const std::vector<Point>& normals) {
  QMat rows;
  for (Point q : normals) rows.push_back(vs.system().normals[q]);
  return rank(rows);
}

std::uint64_t list_hash(const std::vector<std::uint32_t>& v) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ v.size();
  for (std::uint32_t x : v) h = (h ^ x) * 0x100000001b3ULL;
  return h;
}

void add_unique(std::vector<std::uint32_t>& v, std::uint32_t x) {
  if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
}

}  // namespace

int face_dimension(const VertexSet& vs, const std::vector<Point>& normals) {
  return static_cast<int>(vs.dim() - exact_rank(vs, normals));
}

std::vector<Face> assemble_facets(const VertexSet& vs, const std::vector<Point>& which) {
  const std::size_t n = vs.dim();
  std::unordered_map<Point, std::size_t> slot;
  std::vector<Face> out(which.size());
  for (std::size_t i = 0; i < which.size(); ++i) {
    slot[which[i]] = i;
    out[i].dim = static_cast<int>(n) - 1;
    out[i].normal = which[i];
  }
  for (std::uint32_t v = 0; v < vs.size(); ++v)
    for (Point q : vs.normals(v)) {
      auto it = slot.find(q);
      if (it != slot.end()) out[it->second].vertices.push_back(v);
    }
  for (Face& f : out) {
    f.normals = face_normals(vs, f.vertices);
    if (f.vertices.size() < n || face_dimension(vs, f.normals) != static_cast<int>(n) - 1)
      fail(ErrorKind::Consistency, "facet of low dimension: the vertex set is incomplete");
  }
  return out;
}

namespace {

// Vertex sets of the children of p1 found by intersecting it with the children of `parent`.
std::vector<std::vector<std::uint32_t>> intersect_children(const VertexSet& vs, const std::vector<Face>& faces,
                                                           std::uint32_t p1, std::uint32_t parent, double eps = 1e-9) {
  const Face& f = faces[p1];
  const int d = f.dim;
  const std::size_t n = vs.dim();
  std::vector<std::vector<std::uint32_t>> cands;
  if (d == static_cast<int>(n) - 1 && faces[parent].dim == static_cast<int>(n)) {
    // siblings are all facets: bucket the vertices of p1 by their other normals
    std::unordered_map<Point, std::vector<std::uint32_t>> bucket;
    for (std::uint32_t v : f.vertices)
      for (Point q : vs.normals(v))
        if (q != *f.normal) bucket[q].push_back(v);
    std::vector<Point> keys;
    for (auto& [q, b] : bucket)
      if (b.size() >= static_cast<std::size_t>(d)) keys.push_back(q);
    std::sort(keys.begin(), keys.end());
    for (Point q : keys) cands.push_back(std::move(bucket[q]));
  } else {
    for (std::uint32_t s : faces[parent].children) {
      if (s == p1) continue;
      std::vector<std::uint32_t> c;
      const auto& a = f.vertices;
      const auto& b = faces[s].vertices;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(c));
      if (c.size() >= static_cast<std::size_t>(d)) cands.push_back(std::move(c));
    }
  }
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  std::vector<std::vector<std::uint32_t>> out;
  for (auto& c : cands) {
    std::vector<Point> ns = face_normals(vs, c);
    if (static_cast<int>(n - float_rank(vs, ns, eps)) != d - 1) continue;
    if (static_cast<int>(n - exact_rank(vs, ns)) != d - 1) continue;
    out.push_back(std::move(c));
  }
  return out;
}

void classify_vertices(const VertexSet& vs, FaceHierarchy& h) {
  const LatticeGroup& lg = vs.group();
  std::vector<std::int64_t> rep_face(vs.classes(), -1);
  for (std::uint32_t f : h.levels[0]) {
    std::uint32_t v = h.faces[f].vertices[0];
    std::size_t c = vs.class_of(v);
    std::int64_t& r = rep_face[c];
    if (r < 0 || v == vs.representative(c) ||
        (h.faces[r].vertices[0] != vs.representative(c) && v < h.faces[r].vertices[0]))
      r = f;
  }
  for (std::uint32_t f : h.levels[0]) {
    Face& face = h.faces[f];
    std::size_t c = vs.class_of(face.vertices[0]);
    auto r = static_cast<std::uint32_t>(rep_face[c]);
    if (r == f) {
      face.class_id = static_cast<std::int64_t>(c);
      face.representative = -1;
    } else {
      face.class_id = -1;
      face.representative = r;
      Perm g = vs.witness(face.vertices[0]) * vs.witness(h.faces[r].vertices[0]).inverse();
      face.transformation = lg.compress(g);
    }
  }
  // class ids dense over the classes present
  std::vector<std::int64_t> dense(vs.classes(), -1);
  std::int64_t next = 0;
  for (std::size_t c = 0; c < vs.classes(); ++c)
    if (rep_face[c] >= 0) dense[c] = next++;
  for (std::uint32_t f : h.levels[0])
    if (h.faces[f].is_rep()) h.faces[f].class_id = dense[static_cast<std::size_t>(h.faces[f].class_id)];
}

bool same_group(const PermGroup& a, const PermGroup& b) {
  if (a.order() != b.order()) return false;
  for (const Perm& g : b.generators())
    if (!a.contains(g)) return false;
  return true;
}

void add_subgroup(std::vector<std::shared_ptr<const PermGroup>>& chain, std::shared_ptr<const PermGroup> u,
                  const Integer& full, const HierarchyOptions& opt) {
  if (u->order() < opt.chain_min_order || u->order() >= full) return;
  for (const auto& c : chain)
    if (same_group(*c, *u)) return;
  chain.push_back(std::move(u));
}

void finish_chain(std::vector<std::shared_ptr<const PermGroup>>& chain, const HierarchyOptions& opt) {
  std::stable_sort(chain.begin(), chain.end(), [](const auto& a, const auto& b) { return a->order() < b->order(); });
  if (chain.size() > opt.chain_cap) chain.resize(opt.chain_cap);
}

}  // namespace

FaceHierarchy construct_face_hierarchy(const VertexSet& vs, const HierarchyOptions& opt) {
  const std::size_t n = vs.dim();
  const ClassifiedPoints& nc = vs.normal_classes();
  const LatticeGroup& lg = vs.group();
  const std::size_t m = lg.ground().size();
  FaceHierarchy h;
  h.n = n;
  h.levels.resize(n + 1);

  Face top;
  top.dim = static_cast<int>(n);
  top.vertices.resize(vs.size());
  std::iota(top.vertices.begin(), top.vertices.end(), 0u);
  top.class_id = 0;
  h.faces.push_back(std::move(top));
  h.top = 0;
  h.levels[n] = {0};

  // facets: explicit vertex lists for all of them when affordable, else for representatives
  std::size_t incidences = 0;
  for (std::uint32_t v = 0; v < vs.size(); ++v) incidences += vs.normals(v).size();
  std::vector<Point> which;
  for (Point q = 0; q < m; ++q)
    if (incidences <= 20000000 || nc.representative(nc.class_of(q)) == q) which.push_back(q);
  std::vector<Face> assembled = assemble_facets(vs, which);
  std::vector<std::int64_t> slot(m, -1);
  for (std::size_t i = 0; i < which.size(); ++i) slot[which[i]] = static_cast<std::int64_t>(i);
  for (Point q = 0; q < m; ++q) {
    Face f;
    if (slot[q] >= 0) {
      f = std::move(assembled[static_cast<std::size_t>(slot[q])]);
    } else {
      f.dim = static_cast<int>(n) - 1;
      f.normal = q;
      f.normals = {q};
    }
    f.parents = {h.top};
    std::size_t c = nc.class_of(q);
    Point r = nc.representative(c);
    if (r == q) {
      f.class_id = static_cast<std::int64_t>(c);
    } else {
      f.representative = 1 + r;
      f.transformation = lg.compress(nc.witness(q));
    }
    auto id = static_cast<std::uint32_t>(h.faces.size());
    h.faces[h.top].children.push_back(id);
    h.levels[n - 1].push_back(id);
    h.faces.push_back(std::move(f));
  }

  std::vector<std::shared_ptr<const PermGroup>> chain;
  const Integer full = lg.order();
  if (opt.use_subgroups) {
    for (std::size_t c = 0; c < nc.classes(); ++c) add_subgroup(chain, nc.rep_stabilizer(c), full, opt);
    finish_chain(chain, opt);
  }
  TransformationFinder finder(vs, opt.permutation_budget);

  for (int d = static_cast<int>(n) - 2; d >= 0; --d) {
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> seen;
    for (std::uint32_t p1 : h.levels[d + 1]) {
      if (!h.faces[p1].is_rep()) continue;
      std::uint32_t parent = h.faces[p1].parents.front();
      if (!h.faces[parent].is_rep()) fail(ErrorKind::Structural, "face without a representative parent");
      for (auto& c : intersect_children(vs, h.faces, p1, parent, opt.rank_eps)) {
        std::uint64_t key = list_hash(c);
        std::int64_t found = -1;
        for (std::uint32_t id : seen[key])
          if (h.faces[id].vertices == c) found = id;
        std::uint32_t id;
        if (found >= 0) {
          id = static_cast<std::uint32_t>(found);
          add_unique(h.faces[id].parents, p1);
        } else {
          Face f;
          f.dim = d;
          f.normals = face_normals(vs, c);
          f.vertices = std::move(c);
          f.parents = {p1};
          id = static_cast<std::uint32_t>(h.faces.size());
          h.faces.push_back(std::move(f));
          seen[key].push_back(id);
          h.levels[d].push_back(id);
        }
        add_unique(h.faces[p1].children, id);
      }
    }
    for (std::uint32_t f : h.levels[d]) {
      bool ok = false;
      for (std::uint32_t p : h.faces[f].parents) ok = ok || h.faces[p].is_rep();
      if (!ok) fail(ErrorKind::Structural, "face without a representative parent");
    }

    if (d == 0)
      classify_vertices(vs, h);
    else
      iterated_classify(vs, h.faces, h.levels[d], chain, finder, h.stats, opt.verify_witnesses);
    finder.clear();

    if (opt.use_subgroups && d == static_cast<int>(n) - 2) {
      for (std::uint32_t f : h.levels[d])
        if (h.faces[f].is_rep())
          add_subgroup(chain,
                       std::make_shared<const PermGroup>(set_stabilizer(lg.perm(), h.faces[f].normals, point_action(),
                                                                        opt.seed + f)),
                       full, opt);
      finish_chain(chain, opt);
    }
  }
  for (const auto& u : chain) h.subgroup_orders.push_back(u->order());
  return h;
}

// ---- checks and summaries --------------------------------------------------------------

bool check_children_complete(const VertexSet& vs, const FaceHierarchy& h) {
  for (std::size_t d = 1; d < h.n; ++d)
    for (std::uint32_t p1 : h.levels[d]) {
      const Face& f = h.faces[p1];
      if (!f.is_rep()) continue;
      auto want = intersect_children(vs, h.faces, p1, f.parents.back());
      std::vector<std::vector<std::uint32_t>> have;
      for (std::uint32_t c : f.children) have.push_back(h.faces[c].vertices);
      std::sort(have.begin(), have.end());
      if (want != have) return false;
    }
  return true;
}

bool check_face_witnesses(const VertexSet& vs, const FaceHierarchy& h) {
  const LatticeGroup& lg = vs.group();
  for (const Face& f : h.faces) {
    if (f.is_rep()) continue;
    const Face& r = h.faces[static_cast<std::size_t>(f.representative)];
    Perm g = lg.expand(f.transformation);
    if (f.vertices.empty() || r.vertices.empty()) {
      std::vector<Point> img;
      for (Point q : r.normals) img.push_back(g[q]);
      std::sort(img.begin(), img.end());
      if (img != f.normals) return false;
      continue;
    }
    std::vector<std::uint32_t> img;
    for (std::uint32_t v : r.vertices) img.push_back(vs.act(v, g));
    std::sort(img.begin(), img.end());
    if (img != f.vertices) return false;
  }
  return true;
}

std::vector<std::size_t> FaceHierarchy::class_counts() const {
  std::vector<std::size_t> c(levels.size(), 0);
  for (std::size_t d = 0; d < levels.size(); ++d)
    for (std::uint32_t f : levels[d])
      if (faces[f].is_rep()) ++c[d];
  return c;
}

std::vector<std::uint32_t> FaceHierarchy::representatives(int d) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t f : levels[static_cast<std::size_t>(d)])
    if (faces[f].is_rep()) out.push_back(f);
  return out;
}

std::size_t FaceHierarchy::total_classes() const {
  auto c = class_counts();
  return std::accumulate(c.begin(), c.end(), std::size_t{0});
}

}  // namespace latq
