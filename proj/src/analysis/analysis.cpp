#include "latq/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace latq {

namespace {

class Stopwatch {
 public:
  double lap() {
    auto now = std::chrono::steady_clock::now();
    double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

}  // namespace

std::shared_ptr<const LatticeGroup> lattice_group(const Lattice& l, const RelevantVectorSet& rv, std::uint64_t seed) {
  if (l.symmetry.empty() && l.lamination) {
    const Lattice& base = *l.lamination->base;
    LatticeGroup bg(MatrixGroup{base.symmetry}, relevant_vectors(base).vectors, std::nullopt, seed);
    return std::make_shared<const LatticeGroup>(discover_laminated_symmetry(l, bg, rv, seed));
  }
  return std::make_shared<const LatticeGroup>(LatticeGroup(MatrixGroup{l.symmetry}, rv.vectors, std::nullopt, seed));
}

Analysis analyze(const Lattice& l, const AnalysisOptions& opt) {
  l.validate();
  Analysis a;
  Stopwatch sw;
  a.relevant = relevant_vectors(l, opt.threads);
  a.timings.emplace_back("relevant", sw.lap());
  a.group = lattice_group(l, a.relevant, opt.seed);
  a.timings.emplace_back("group", sw.lap());
  VertexSearchOptions vo = opt.vertices;
  vo.seed = opt.seed;
  a.vertices = find_vertices(l, a.group, vo);
  a.timings.emplace_back("vertices", sw.lap());
  HierarchyOptions ho = opt.hierarchy;
  ho.seed = opt.seed;
  a.hierarchy = construct_face_hierarchy(*a.vertices, ho);
  a.timings.emplace_back("hierarchy", sw.lap());
  a.moments = quantizer_constant(*a.vertices, a.hierarchy, opt.moments);
  a.timings.emplace_back("moments", sw.lap());
  return a;
}

ClassStructure class_structure(const VertexSet& vs, const FaceHierarchy& h) {
  ClassStructure s;
  s.counts = h.class_counts();
  const ClassifiedPoints& nc = vs.normal_classes();
  for (std::size_t d = 0; d <= h.n; ++d) {
    std::vector<std::vector<std::pair<std::uint64_t, std::uint32_t>>> level;
    for (std::uint32_t f : h.representatives(static_cast<int>(d))) {
      std::map<std::uint64_t, std::uint32_t> counts;
      const Face& face = h.faces[f];
      for (std::uint32_t v : face.vertices) ++counts[vs.orbit_size(vs.class_of(v))];
      for (Point q : face.normals) ++counts[(std::uint64_t(1) << 40) | nc.orbit_size(nc.class_of(q))];
      level.emplace_back(counts.begin(), counts.end());
    }
    std::sort(level.begin(), level.end());
    s.fingerprints.push_back(std::move(level));
  }
  return s;
}

QVec deep_hole(const VertexSet& vs) {
  const QMat& m = vs.lattice().metric;
  QVec best;
  Rational bn = -1;
  for (std::size_t c = 0; c < vs.classes(); ++c) {
    QVec x = vs.coords(vs.representative(c));
    Rational r = norm2(x, m);
    if (r > bn || (r == bn && canonical_less(x, best))) {
      bn = r;
      best = std::move(x);
    }
  }
  return best;
}

QVec deep_hole(const Lattice& l) {
  auto rv = relevant_vectors(l);
  auto vs = find_vertices(l, lattice_group(l, rv));
  return deep_hole(*vs);
}

}  // namespace latq
