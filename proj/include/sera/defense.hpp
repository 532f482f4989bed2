#pragma once

#include <cstdint>
#include <utility>

#include "sera/attack.hpp"
#include "sera/encoders.hpp"
#include "sera/graph.hpp"
#include "sera/matrix.hpp"

namespace sera {

struct PrivacyBound {
  double bound = 0.0;       // lower bound on FPR + FNR of any edge attacker
  double opnorm_sq = 0.0;   // sum over layers of ||W_l||_op^2
  double sensitivity_c = 0.0;  // aggregator constant: 1 one-sided, 4 two-sided
  bool vacuous = false;     // sigma == 0: no noise, bound collapses to 0
};

// Closed-form guarantee for noisy-aggregation encoders:
//   min error >= 1 - sqrt(1 - exp(-c * sum_l ||W_l||^2 / sigma^2)).
// Mean-style aggregators (GCN, mean-SAGE, GIN) move by at most one message
// when one edge flips (c = 1); max-SAGE and GAT can move on both endpoints'
// sides (c = 4). The input projection and the readout act per node, touch no
// edges, and stay outside the sum. Throws for the linear encoder, whose
// unnormalized propagation admits no such constant.
PrivacyBound nag_bound(const EncoderWeights& weights, double sigma);

// Same shape of guarantee for edge randomized response at privacy eps.
double edge_rr_bound(double eps);

// Randomized response on every node pair: each potential edge keeps its state
// with probability e^eps / (1 + e^eps) and flips otherwise. Touches all
// C(n, 2) pairs, so it refuses graphs beyond 20000 nodes.
Graph edge_rr(const Graph& g, double eps, uint64_t seed);

// Monte-Carlo floor for one pair: the exact best FPR + FNR any threshold
// attacker on sim(h_u, h_v) achieves for distinguishing the graph with the
// edge from the graph without it, over `trials` fresh noise draws per world.
double empirical_edge_error(const Graph& g, uint32_t u, uint32_t v, const DenseMatrix& x,
                            const EncoderWeights& weights, const NagConfig& cfg,
                            SimilarityKind sim, uint32_t trials, uint64_t seed);

}  // namespace sera
