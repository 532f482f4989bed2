#include "sera/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sera {

Graph Graph::from_edges(uint32_t n, const std::vector<std::pair<uint32_t, uint32_t>>& edges,
                        std::size_t* dup_count) {
  std::vector<std::pair<uint32_t, uint32_t>> canon;
  canon.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      throw std::out_of_range("edge endpoint " + std::to_string(u >= n ? u : v) +
                              " out of range for n=" + std::to_string(n));
    if (u == v) throw std::invalid_argument("self-loop at node " + std::to_string(u));
    canon.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(canon.begin(), canon.end());
  const auto last = std::unique(canon.begin(), canon.end());
  if (dup_count) *dup_count = static_cast<std::size_t>(canon.end() - last);
  canon.erase(last, canon.end());

  Graph g(n);
  std::vector<uint32_t> deg(n, 0);
  for (auto [u, v] : canon) {
    ++deg[u];
    ++deg[v];
  }
  for (uint32_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
  g.neighbors_.resize(g.offsets_[n]);
  std::vector<uint32_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  for (auto [u, v] : canon) {
    g.neighbors_[cursor[u]++] = v;
    g.neighbors_[cursor[v]++] = u;
  }
  for (uint32_t v = 0; v < n; ++v)
    std::sort(g.neighbors_.begin() + g.offsets_[v], g.neighbors_.begin() + g.offsets_[v + 1]);
  return g;
}

bool Graph::has_edge(uint32_t u, uint32_t v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<uint32_t> Graph::degrees() const {
  std::vector<uint32_t> d(n_);
  for (uint32_t v = 0; v < n_; ++v) d[v] = degree(v);
  return d;
}

NodeSubset NodeSubset::checked(std::vector<uint32_t> ids, uint32_t n) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] >= n)
      throw std::out_of_range("subset id " + std::to_string(ids[i]) + " out of range");
    if (i > 0 && ids[i] <= ids[i - 1])
      throw std::invalid_argument("subset ids must be strictly increasing");
  }
  return NodeSubset{std::move(ids)};
}

InducedSubgraph induced_subgraph(const Graph& g, const NodeSubset& nodes) {
  InducedSubgraph out;
  out.parent_id = nodes.ids;
  out.new_id.assign(g.num_nodes(), -1);
  for (std::size_t i = 0; i < nodes.ids.size(); ++i) out.new_id[nodes.ids[i]] = i;

  std::vector<std::pair<uint32_t, uint32_t>> edges;
  for (uint32_t nu = 0; nu < nodes.ids.size(); ++nu) {
    const uint32_t u = nodes.ids[nu];
    for (uint32_t v : g.neighbors(u)) {
      if (v <= u) continue;
      const int64_t nv = out.new_id[v];
      if (nv >= 0) edges.emplace_back(nu, static_cast<uint32_t>(nv));
    }
  }
  out.graph = Graph::from_edges(static_cast<uint32_t>(nodes.ids.size()), edges);
  return out;
}

}  // namespace sera
