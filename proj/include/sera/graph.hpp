#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace sera {

// Undirected simple graph in CSR form: per-node neighbor lists, sorted
// ascending, no self-loops, no duplicates. u appears in adj(v) iff v in adj(u).
class Graph {
 public:
  Graph() = default;
  explicit Graph(uint32_t n) : n_(n), offsets_(n + 1, 0) {}

  // Builds from an edge list. Rejects out-of-range endpoints and self-loops;
  // duplicate edges (in either orientation) are collapsed, their count
  // reported through dup_count when provided.
  static Graph from_edges(uint32_t n, const std::vector<std::pair<uint32_t, uint32_t>>& edges,
                          std::size_t* dup_count = nullptr);

  uint32_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return neighbors_.size() / 2; }  // undirected count

  std::span<const uint32_t> neighbors(uint32_t v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  uint32_t degree(uint32_t v) const { return offsets_[v + 1] - offsets_[v]; }
  bool has_edge(uint32_t u, uint32_t v) const;

  std::vector<uint32_t> degrees() const;

  // Visits each undirected edge once with u < v.
  template <typename F>
  void for_each_edge(F&& f) const {
    for (uint32_t u = 0; u < n_; ++u)
      for (uint32_t v : neighbors(u))
        if (u < v) f(u, v);
  }

 private:
  uint32_t n_ = 0;
  std::vector<uint32_t> offsets_;
  std::vector<uint32_t> neighbors_;
};

// Strictly increasing list of node ids; the validated form every mask takes.
struct NodeSubset {
  std::vector<uint32_t> ids;

  // Validates order, uniqueness and range.
  static NodeSubset checked(std::vector<uint32_t> ids, uint32_t n);
  std::size_t size() const { return ids.size(); }
  bool empty() const { return ids.empty(); }
};

struct InducedSubgraph {
  Graph graph;
  std::vector<uint32_t> parent_id;  // new id -> old id (== subset order)
  std::vector<int64_t> new_id;      // old id -> new id, -1 when absent
};

InducedSubgraph induced_subgraph(const Graph& g, const NodeSubset& nodes);

}  // namespace sera
