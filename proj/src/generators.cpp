#include "sera/generators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sera {

namespace {

void check_prob(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
}

// Appends, with independent probability p each, members of [begin, end) to
// out. Skip-sampling: the gap to the next success is geometric, so the cost is
// proportional to the number of successes rather than the range width. With
// U uniform on (0, 1), ceil(ln U / ln(1-p)) has exactly the law of the number
// of Bernoulli(p) trials up to and including the first success.
void sample_range(rng::Stream& s, uint32_t begin, uint32_t end, double p,
                  std::vector<uint32_t>& out) {
  if (p <= 0.0 || begin >= end) return;
  if (p >= 1.0) {
    for (uint32_t v = begin; v < end; ++v) out.push_back(v);
    return;
  }
  const double log1mp = std::log1p(-p);
  uint64_t v = begin;
  while (true) {
    const double gap = std::ceil(std::log(s.next_open()) / log1mp);
    v += static_cast<uint64_t>(gap) - 1;  // gap >= 1
    if (v >= end) return;
    out.push_back(static_cast<uint32_t>(v));
    ++v;
  }
}

constexpr uint64_t kRowTag = 0x65722d726f77ull;  // stream namespace for per-row draws

}  // namespace

Graph gen_er(const ErSpec& spec, uint64_t seed) {
  check_prob(spec.p, "er p");
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  std::vector<uint32_t> hits;
  for (uint32_t u = 0; u < spec.n; ++u) {
    rng::Stream row(seed, {kRowTag, u});
    hits.clear();
    sample_range(row, u + 1, spec.n, spec.p, hits);
    for (uint32_t v : hits) edges.emplace_back(u, v);
  }
  return Graph::from_edges(spec.n, edges);
}

SbmResult gen_sbm(const SbmSpec& spec, uint64_t seed) {
  check_prob(spec.p_in, "sbm p_in");
  check_prob(spec.p_out, "sbm p_out");
  if (spec.k == 0 || spec.n % spec.k != 0)
    throw std::invalid_argument("sbm requires k >= 1 and n divisible by k");
  const uint32_t block = spec.n / spec.k;

  std::vector<std::pair<uint32_t, uint32_t>> edges;
  std::vector<uint32_t> hits;
  for (uint32_t u = 0; u < spec.n; ++u) {
    const uint32_t group_end = (u / block + 1) * block;
    rng::Stream row(seed, {kRowTag, u});
    hits.clear();
    sample_range(row, u + 1, group_end, spec.p_in, hits);
    sample_range(row, group_end, spec.n, spec.p_out, hits);
    for (uint32_t v : hits) edges.emplace_back(u, v);
  }

  SbmResult out;
  out.graph = Graph::from_edges(spec.n, edges);
  out.membership.resize(spec.n);
  for (uint32_t v = 0; v < spec.n; ++v) out.membership[v] = static_cast<int32_t>(v / block);
  return out;
}

Graph gen_inhomogeneous(const DenseMatrix& probs, uint64_t seed) {
  const std::size_t n = probs.rows();
  if (probs.cols() != n) throw std::invalid_argument("probability matrix must be square");
  for (std::size_t u = 0; u < n; ++u) {
    if (probs(u, u) != 0.0) throw std::invalid_argument("probability matrix diagonal must be 0");
    for (std::size_t v = u + 1; v < n; ++v) {
      if (probs(u, v) != probs(v, u))
        throw std::invalid_argument("probability matrix must be symmetric");
      check_prob(probs(u, v), "pair probability");
    }
  }
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t u = 0; u < n; ++u) {
    rng::Stream row(seed, {kRowTag, u});
    for (uint32_t v = u + 1; v < n; ++v)
      if (row.next_unit() < probs(u, v)) edges.emplace_back(u, v);
  }
  return Graph::from_edges(static_cast<uint32_t>(n), edges);
}

DenseMatrix gen_features(uint32_t n, uint32_t d, uint64_t seed) {
  DenseMatrix x(n, d);
  for (uint32_t v = 0; v < n; ++v) {
    rng::Stream row(seed, {kRowTag, v});
    rng::fill_gaussian(row, x.row(v), d);
  }
  return x;
}

}  // namespace sera
