#pragma once

#include <cstdint>
#include <vector>

#include "sera/graph.hpp"
#include "sera/matrix.hpp"

namespace sera {

struct ErSpec {
  uint32_t n = 0;
  double p = 0.0;  // independent probability for each unordered pair
};

// Contiguous equal-size blocks: nodes [g*n/k, (g+1)*n/k) form group g.
struct SbmSpec {
  uint32_t n = 0;
  uint32_t k = 1;
  double p_in = 0.0;
  double p_out = 0.0;
};

struct SbmResult {
  Graph graph;
  std::vector<int32_t> membership;  // size n, values in [0, k)
};

Graph gen_er(const ErSpec& spec, uint64_t seed);
SbmResult gen_sbm(const SbmSpec& spec, uint64_t seed);

// Arbitrary symmetric probability matrix, zero diagonal, entries in [0, 1].
// Draws each pair independently; O(n^2), intended for small studies.
Graph gen_inhomogeneous(const DenseMatrix& probs, uint64_t seed);

// iid standard normal features, one row per node.
DenseMatrix gen_features(uint32_t n, uint32_t d, uint64_t seed);

}  // namespace sera
