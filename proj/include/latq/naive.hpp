#pragma once
// Brute-force Voronoi cell for small lattices: vertices from every n-subset of relevant vectors,
// the full face lattice by pairwise intersection, and moments by a pulling triangulation.
// Only meant as a test oracle.

#include <vector>

#include "latq/lattice.hpp"

namespace latq {

struct NaiveFace {
  int dim = 0;
  std::vector<std::size_t> vertices;  // sorted indices into NaiveCell::vertices
  std::vector<std::size_t> children;  // indices into the level below
};

struct NaiveCell {
  std::vector<QVec> vertices;                  // canonical order
  std::vector<std::vector<NaiveFace>> levels;  // by dimension; levels[n] holds the cell
  Rational volume;                             // frame units
  Rational second_moment;                      // integral of x M x^T over the cell, frame units
  QMat tensor;                                 // integral of x^T x, frame coordinates
};

NaiveCell naive_cell(const Lattice& l, const std::vector<QVec>& relevant);

}  // namespace latq
