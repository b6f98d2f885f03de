#pragma once
// End-to-end analysis of one lattice: relevant vectors, symmetry group, vertex classes,
// face hierarchy and second moments.

#include <memory>
#include <string>
#include <vector>

#include "latq/moments.hpp"

namespace latq {

struct AnalysisOptions {
  VertexSearchOptions vertices;
  HierarchyOptions hierarchy;
  MomentOptions moments;
  unsigned threads = 1;
  std::uint64_t seed = 1;
};

// Relabelling-invariant summary of the class structure. Vertex and normal classes enter
// the fingerprints through their orbit sizes only, so two runs can be compared directly.
struct ClassStructure {
  std::vector<std::size_t> counts;  // classes per dimension
  std::vector<std::vector<std::vector<std::pair<std::uint64_t, std::uint32_t>>>> fingerprints;
  friend bool operator==(const ClassStructure&, const ClassStructure&) = default;
};

struct Analysis {
  RelevantVectorSet relevant;
  std::shared_ptr<const LatticeGroup> group;
  std::unique_ptr<VertexSet> vertices;
  FaceHierarchy hierarchy;
  SecondMomentResult moments;
  std::vector<std::pair<std::string, double>> timings;  // seconds per stage
  const Lattice& lattice() const { return vertices->lattice(); }
};

// The symmetry group used for l: its stored generators, or for a lamination without
// generators the symmetries discovered from the base group.
std::shared_ptr<const LatticeGroup> lattice_group(const Lattice& l, const RelevantVectorSet& rv,
                                                  std::uint64_t seed = 1);

Analysis analyze(const Lattice& l, const AnalysisOptions& opt = {});
ClassStructure class_structure(const VertexSet& vs, const FaceHierarchy& h);

// A vertex of the Voronoi cell of largest norm, in frame coordinates.
QVec deep_hole(const VertexSet& vs);
QVec deep_hole(const Lattice& l);

}  // namespace latq
