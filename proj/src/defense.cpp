#include "sera/defense.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "sera/linalg.hpp"
#include "sera/rng.hpp"

namespace sera {

namespace {
constexpr uint64_t kRrRowTag = 0x72722d726f77ull;  // "rr-row"
}

PrivacyBound nag_bound(const EncoderWeights& weights, double sigma) {
  weights.validate();
  if (weights.arch == ArchKind::LINEAR)
    throw std::invalid_argument("nag_bound: linear encoder admits no aggregation bound");
  if (sigma < 0.0) throw std::invalid_argument("nag_bound: sigma must be >= 0");

  PrivacyBound out;
  switch (weights.arch) {
    case ArchKind::GCN:
    case ArchKind::MEAN_SAGE:
    case ArchKind::GIN:
      out.sensitivity_c = 1.0;
      break;
    case ArchKind::MAX_SAGE:
    case ArchKind::GAT:
      out.sensitivity_c = 4.0;
      break;
    case ArchKind::LINEAR:
      break;  // unreachable
  }
  for (const auto& w : weights.layers) {
    const double s = operator_norm(w);
    out.opnorm_sq += s * s;
  }
  if (sigma == 0.0) {
    out.vacuous = true;
    out.bound = 0.0;
    return out;
  }
  const double exponent = out.sensitivity_c * out.opnorm_sq / (sigma * sigma);
  out.bound = 1.0 - std::sqrt(1.0 - std::exp(-exponent));
  return out;
}

double edge_rr_bound(double eps) {
  if (eps < 0.0 || !std::isfinite(eps))
    throw std::invalid_argument("edge_rr_bound: eps must be finite and >= 0");
  return 1.0 - std::sqrt(1.0 - std::exp(-eps));
}

Graph edge_rr(const Graph& g, double eps, uint64_t seed) {
  if (eps < 0.0 || !std::isfinite(eps))
    throw std::invalid_argument("edge_rr: eps must be finite and >= 0");
  const uint32_t n = g.num_nodes();
  if (n > 20000)
    throw std::invalid_argument(
        "edge_rr: touches every node pair; refusing more than 20000 nodes");

  // flip probability 1 / (1 + e^eps); keep probability e^eps / (1 + e^eps)
  const double flip_p = 1.0 / (1.0 + std::exp(eps));
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  edges.reserve(g.num_edges());
  for (uint32_t u = 0; u < n; ++u) {
    rng::Stream row(seed, {kRrRowTag, u});
    auto nb = g.neighbors(u);
    std::size_t cursor = std::lower_bound(nb.begin(), nb.end(), u + 1) - nb.begin();
    for (uint32_t v = u + 1; v < n; ++v) {
      bool present = cursor < nb.size() && nb[cursor] == v;
      if (present) ++cursor;
      if (row.next_unit() < flip_p) present = !present;
      if (present) edges.emplace_back(u, v);
    }
  }
  return Graph::from_edges(n, edges);
}

double empirical_edge_error(const Graph& g, uint32_t u, uint32_t v, const DenseMatrix& x,
                            const EncoderWeights& weights, const NagConfig& cfg,
                            SimilarityKind sim, uint32_t trials, uint64_t seed) {
  const uint32_t n = g.num_nodes();
  if (u >= n || v >= n || u == v)
    throw std::invalid_argument("empirical_edge_error: invalid node pair");
  if (trials == 0) throw std::invalid_argument("empirical_edge_error: needs trials >= 1");

  // the two neighboring worlds: identical graphs except for the one edge
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  edges.reserve(g.num_edges() + 1);
  g.for_each_edge([&](uint32_t a, uint32_t b) {
    if (!(std::min(a, b) == std::min(u, v) && std::max(a, b) == std::max(u, v)))
      edges.emplace_back(a, b);
  });
  const Graph without = Graph::from_edges(n, edges);
  edges.emplace_back(std::min(u, v), std::max(u, v));
  const Graph with = Graph::from_edges(n, edges);

  auto pair_score = [&](const Graph& world, uint64_t noise_seed) {
    const DenseMatrix h = encode(world, x, weights, cfg, noise_seed);
    return sim == SimilarityKind::COS ? cos_sim(h.row(u), h.row(v), h.cols())
                                      : corr_sim(h.row(u), h.row(v), h.cols());
  };

  std::vector<double> s_with(trials), s_without(trials);
  for (uint32_t t = 0; t < trials; ++t) {
    s_with[t] = pair_score(with, rng::derive(seed, {rng::hash_str("world-with"), t}));
    s_without[t] = pair_score(without, rng::derive(seed, {rng::hash_str("world-without"), t}));
  }

  // exact minimum of FPR + FNR over every threshold: sweep the merged scores
  // descending; "score >= tau" claims the edge is present
  std::vector<std::pair<double, uint8_t>> all;
  all.reserve(2 * std::size_t(trials));
  for (double s : s_with) all.emplace_back(s, 1);
  for (double s : s_without) all.emplace_back(s, 0);
  std::sort(all.begin(), all.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  const double inv_t = 1.0 / static_cast<double>(trials);
  double best = 1.0;  // tau = +inf: every trial called "absent", FNR = 1, FPR = 0
  std::size_t tp = 0, fp = 0, i = 0;
  while (i < all.size()) {
    const double tau = all[i].first;
    while (i < all.size() && all[i].first == tau) {
      if (all[i].second) ++tp;
      else ++fp;
      ++i;
    }
    // counts first, divide once: keeps the error exactly 0 at full separation
    const double fnr = static_cast<double>(trials - tp) * inv_t;
    const double fpr = static_cast<double>(fp) * inv_t;
    best = std::min(best, fpr + fnr);
  }
  return best;
}

}  // namespace sera
