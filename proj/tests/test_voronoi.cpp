#include "doctest.h"

#include <map>
#include <set>

#include "latq/error.hpp"
#include "latq/naive.hpp"
#include "latq/voronoi.hpp"

using namespace latq;

namespace {

struct Built {
  Lattice lattice;
  RelevantVectorSet rv;
  std::shared_ptr<const LatticeGroup> group;
  std::unique_ptr<VertexSet> vs;
};

Built build(const Lattice& l, VertexSearchOptions opt = {}) {
  Built b{l, relevant_vectors(l), nullptr, nullptr};
  b.group = std::make_shared<const LatticeGroup>(to_permutation_group(MatrixGroup{l.symmetry}, b.rv));
  opt.streak = 60;
  b.vs = find_vertices(b.lattice, b.group, opt);
  return b;
}

struct CanonicalLess {
  bool operator()(const QVec& a, const QVec& b) const { return canonical_less(a, b); }
};

// Orbits of the naive faces of one dimension under every group element.
std::size_t naive_orbits(const NaiveCell& cell, std::size_t d, const LatticeGroup& g) {
  std::map<QVec, std::size_t, CanonicalLess> index;
  for (std::size_t i = 0; i < cell.vertices.size(); ++i) index[cell.vertices[i]] = i;
  std::vector<QMat> mats;
  g.perm().for_each_element([&](const Perm& p) {
    mats.push_back(g.matrix(p));
    return true;
  });
  std::map<std::vector<std::size_t>, std::size_t> face_id;
  for (std::size_t i = 0; i < cell.levels[d].size(); ++i) face_id[cell.levels[d][i].vertices] = i;
  std::vector<char> seen(cell.levels[d].size(), 0);
  std::size_t orbits = 0;
  for (std::size_t i = 0; i < cell.levels[d].size(); ++i) {
    if (seen[i]) continue;
    ++orbits;
    for (const QMat& r : mats) {
      std::vector<std::size_t> img;
      for (std::size_t v : cell.levels[d][i].vertices) img.push_back(index.at(vecmat(cell.vertices[v], r)));
      std::sort(img.begin(), img.end());
      seen[face_id.at(img)] = 1;
    }
  }
  return orbits;
}

std::set<QVec, CanonicalLess> coords_of(const VertexSet& vs, const std::vector<std::uint32_t>& ids) {
  std::set<QVec, CanonicalLess> s;
  for (std::uint32_t v : ids) s.insert(vs.coords(v));
  return s;
}

void compare_with_naive(const Lattice& l) {
  CAPTURE(l.name);
  Built b = build(l);
  const VertexSet& vs = *b.vs;
  NaiveCell cell = naive_cell(b.lattice, b.rv.vectors);
  const std::size_t n = l.dim();

  REQUIRE(vs.size() == cell.vertices.size());
  std::set<QVec, CanonicalLess> ours;
  for (std::uint32_t v = 0; v < vs.size(); ++v) ours.insert(vs.coords(v));
  CHECK(std::equal(ours.begin(), ours.end(), cell.vertices.begin(), cell.vertices.end()));
  CHECK(cell.volume == b.lattice.frame_volume());
  std::size_t orbit_total = 0;
  for (std::size_t c = 0; c < vs.classes(); ++c) orbit_total += vs.orbit_size(c);
  CHECK(orbit_total == vs.size());
  CHECK(vs.classes() == naive_orbits(cell, 0, *b.group));

  for (bool sub : {false, true}) {
    HierarchyOptions opt;
    opt.use_subgroups = sub;
    opt.chain_min_order = 2;
    FaceHierarchy h = construct_face_hierarchy(vs, opt);
    CHECK(check_children_complete(vs, h));
    CHECK(check_face_witnesses(vs, h));
    auto counts = h.class_counts();
    for (std::size_t d = 0; d <= n; ++d) {
      CAPTURE(d);
      CHECK(counts[d] == naive_orbits(cell, d, *b.group));
      CHECK(h.levels[d].size() <= cell.levels[d].size());
    }
    // children of every representative are exactly its naive subfaces
    std::map<std::set<QVec, CanonicalLess>, std::size_t> naive_faces[16];
    for (std::size_t d = 0; d <= n; ++d)
      for (std::size_t i = 0; i < cell.levels[d].size(); ++i) {
        std::set<QVec, CanonicalLess> s;
        for (std::size_t v : cell.levels[d][i].vertices) s.insert(cell.vertices[v]);
        naive_faces[d][s] = i;
      }
    for (std::size_t d = 1; d <= n; ++d)
      for (std::uint32_t f : h.representatives(static_cast<int>(d))) {
        auto it = naive_faces[d].find(coords_of(vs, h.faces[f].vertices));
        REQUIRE(it != naive_faces[d].end());
        std::set<std::size_t> want(cell.levels[d][it->second].children.begin(),
                                   cell.levels[d][it->second].children.end());
        std::set<std::size_t> have;
        for (std::uint32_t c : h.faces[f].children) {
          auto jt = naive_faces[d - 1].find(coords_of(vs, h.faces[c].vertices));
          REQUIRE(jt != naive_faces[d - 1].end());
          have.insert(jt->second);
        }
        CHECK(have == want);
      }
    // every non-top face has a representative parent; normals are |N| >= n - d
    for (const Face& f : h.faces) {
      if (f.dim == static_cast<int>(n)) continue;
      bool rep_parent = false;
      for (std::uint32_t p : f.parents) rep_parent = rep_parent || h.faces[p].is_rep();
      CHECK(rep_parent);
      CHECK(f.normals.size() >= n - static_cast<std::size_t>(f.dim));
    }
  }
}

}  // namespace

TEST_CASE("Z2 cell has four vertices in one class") {
  Built b = build(catalog_lattice("Z2"));
  CHECK(b.vs->size() == 4);
  CHECK(b.vs->classes() == 1);
  for (std::uint32_t v = 0; v < 4; ++v) {
    QVec x = b.vs->coords(v);
    CHECK(abs(x[0]) == Rational(1, 2));
    CHECK(abs(x[1]) == Rational(1, 2));
    CHECK(b.vs->normals(v).size() == 2);
  }
}

TEST_CASE("facets") {
  Built z = build(catalog_lattice("Z2"));
  auto zf = assemble_facets(*z.vs, {0});
  CHECK(zf[0].vertices.size() == 2);

  Built a = build(catalog_lattice("A2"));
  std::vector<Point> all;
  for (Point q = 0; q < a.rv.vectors.size(); ++q) all.push_back(q);
  auto facets = assemble_facets(*a.vs, all);
  CHECK(facets.size() == 6);
  for (const Face& f : facets) {
    CHECK(f.vertices.size() == 2);
    CHECK(f.normals.size() == 1);
    for (std::uint32_t v : f.vertices) {
      QVec x = a.vs->coords(v);
      const QVec& q = a.rv.vectors[*f.normal];
      CHECK(2 * inner(x, q, a.lattice.metric) == norm2(q, a.lattice.metric));
    }
  }
}

TEST_CASE("every vertex satisfies all inequalities exactly") {
  for (const char* name : {"A3", "D4"}) {
    Built b = build(catalog_lattice(name));
    for (std::uint32_t v = 0; v < b.vs->size(); ++v) {
      auto key = b.vs->system().tight_set(b.vs->coords(v));
      REQUIRE(key);
      auto ns = b.vs->normals(v);
      CHECK(std::equal(key->begin(), key->end(), ns.begin(), ns.end()));
    }
  }
}

TEST_CASE("vertex witnesses and stabilizers") {
  Built b = build(catalog_lattice("D4"));
  const VertexSet& vs = *b.vs;
  for (std::uint32_t v = 0; v < vs.size(); ++v) {
    std::size_t c = vs.class_of(v);
    CHECK(vs.act(vs.representative(c), vs.witness(v)) == v);
    QVec img = b.group->apply(vs.witness(v), vs.coords(vs.representative(c)));
    CHECK(img == vs.coords(v));
  }
  for (std::size_t c = 0; c < vs.classes(); ++c)
    CHECK(vs.rep_stabilizer(c)->order() * static_cast<unsigned long>(vs.orbit_size(c)) == b.group->order());
}

TEST_CASE("hierarchy against the brute-force cell") {
  for (const char* name : {"Z2", "Z3", "A2", "A3", "D4"}) compare_with_naive(catalog_lattice(name));
  compare_with_naive(product_lattice(catalog_lattice("Z2"), catalog_lattice("Z1"), Rational(3, 2)));
  compare_with_naive(laminate(catalog_lattice("A2"), {Rational(2, 3), Rational(1, 3)}, Rational(1, 2)));
}

TEST_CASE("brute-force face counts") {
  auto counts = [](const char* name) {
    Lattice l = catalog_lattice(name);
    NaiveCell c = naive_cell(l, relevant_vectors(l).vectors);
    std::vector<std::size_t> out;
    for (const auto& lv : c.levels) out.push_back(lv.size());
    return out;
  };
  CHECK(counts("Z3") == std::vector<std::size_t>{8, 12, 6, 1});
  CHECK(counts("A2") == std::vector<std::size_t>{6, 6, 1});
  CHECK(counts("A3") == std::vector<std::size_t>{14, 24, 12, 1});
  CHECK(counts("D4") == std::vector<std::size_t>{24, 96, 96, 24, 1});
}

TEST_CASE("normals and defining sets on the cube") {
  Built b = build(catalog_lattice("Z3"));
  const VertexSet& vs = *b.vs;
  HierarchyOptions opt;
  FaceHierarchy h = construct_face_hierarchy(vs, opt);
  for (std::uint32_t f : h.levels[0]) {
    CHECK(h.faces[f].normals.size() == 3);
    CHECK(choose_defining_set(vs, h.faces[f]).kind == DefiningKind::Vertices);
  }
  for (std::uint32_t f : h.levels[2]) {
    const Face& face = h.faces[f];
    if (face.vertices.empty()) continue;
    CHECK(face.normals.size() == 1);
    CHECK(choose_defining_set(vs, face).kind == DefiningKind::Normals);
  }
  for (std::uint32_t f : h.levels[1]) {
    // 2 vertices of one class against 2 normals of one class: tie on count and size
    CHECK(choose_defining_set(vs, h.faces[f]).kind == DefiningKind::Normals);
    CHECK(face_dimension(vs, h.faces[f].normals) == 1);
  }
}

TEST_CASE("transformation search") {
  Built b = build(catalog_lattice("Z3"));
  const VertexSet& vs = *b.vs;
  FaceHierarchy h = construct_face_hierarchy(vs);
  TransformationFinder tf(vs, 1000);
  const auto& edges = h.levels[1];
  REQUIRE(edges.size() >= 2);
  const Face& e0 = h.faces[edges[0]];
  auto same = tf.find(e0, e0, nullptr, 1);
  REQUIRE(same);
  CHECK(same->is_identity());
  // the trivial group separates distinct edges
  auto trivial = std::make_shared<const PermGroup>(vs.group().perm().degree());
  CHECK_FALSE(tf.find(e0, h.faces[edges[1]], trivial, 2));
  // the full group joins them and maps vertex sets onto each other
  for (std::uint32_t e : edges) {
    auto g = tf.find(e0, h.faces[e], nullptr, 3);
    REQUIRE(g);
    std::vector<std::uint32_t> img;
    for (std::uint32_t v : e0.vertices) img.push_back(vs.act(v, *g));
    std::sort(img.begin(), img.end());
    CHECK(img == h.faces[e].vertices);
  }
  CHECK(fingerprint(vs, e0) == fingerprint(vs, h.faces[edges[1]]));
  TransformationFinder tiny(vs, 0);
  CHECK_THROWS_AS(tiny.find(e0, h.faces[edges[1]], nullptr, 1), Error);
}

TEST_CASE("LP walk reaches a vertex and detects unbounded systems") {
  Lattice l = catalog_lattice("Z2");
  RelevantVectorSet rv = relevant_vectors(l);
  FacetSystem sys(l, rv.vectors);
  auto path = lp_vertex_walk(sys, {1.0, 0.3});
  REQUIRE_FALSE(path.empty());
  CHECK(path.back().x[0] == doctest::Approx(0.5));
  CHECK(path.back().x[1] == doctest::Approx(0.5));
  FacetSystem half(l, {{Rational(1), Rational(0)}, {Rational(-1), Rational(0)}});
  try {
    lp_vertex_walk(half, {0.1, 1.0});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Consistency);
  }
}

TEST_CASE("vertex store") {
  VertexStore s;
  for (Point i = 0; i < 5000; ++i) {
    std::vector<Point> k{i, i + 1, 2 * i + 7};
    auto [id, fresh] = s.insert(k);
    CHECK(id == i);
    CHECK(fresh);
  }
  std::vector<Point> k{10, 11, 27};
  CHECK(s.find(k) == std::optional<std::uint32_t>(10));
  CHECK_FALSE(s.insert(k).second);
  std::vector<Point> missing{1, 2, 3};
  CHECK_FALSE(s.find(missing));
}
