#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "dpim/dataset.hpp"
#include "dpim/dc.hpp"

namespace dpim {

using EdgeList = std::vector<std::pair<TupleId, TupleId>>;

// Undirected conflict graph over tuple identifiers. Edges are normalized to
// (min, max), deduplicated, and kept sorted lexicographically; that order is
// stable across neighboring graphs because ids are content-independent.
class ConflictGraph {
 public:
  ConflictGraph() = default;
  ConflictGraph(std::vector<TupleId> nodes, EdgeList edges);

  const std::vector<TupleId>& nodes() const { return nodes_; }
  const EdgeList& edges() const { return edges_; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  // Dense index of a node in [0, node_count), by position in the sorted node list.
  std::size_t index_of(TupleId id) const;

  // Sorted neighbor lists, dense-indexed.
  const std::vector<std::vector<std::uint32_t>>& adjacency() const { return adjacency_; }

  std::size_t degree_at(std::size_t dense_index) const { return adjacency_[dense_index].size(); }

 private:
  std::vector<TupleId> nodes_;  // sorted ascending
  EdgeList edges_;              // (u, v) with u < v, sorted lexicographically
  std::vector<std::vector<std::uint32_t>> adjacency_;
};

// Canonical stable edge order: lexicographic by (min id, max id). Any edge
// shared by two neighboring graphs keeps its relative position in both orders.
struct StableEdgeOrder {
  EdgeList edges;
};

StableEdgeOrder stable_edge_order(const ConflictGraph& graph);

struct BuildOptions {
  // Worker count for pair evaluation; the resulting edge set is independent of
  // it. 0 means hardware concurrency.
  unsigned threads = 1;
};

// Materializes the conflict graph: an edge {i, j} iff some constraint is
// violated by the pair. Constraints with a `t.A = t'.A` predicate are
// evaluated inside hash buckets on the equality attributes; the rest fall back
// to all pairs. Output is set-equal to the naive all-pairs evaluation.
ConflictGraph build_conflict_graph(const Dataset& dataset,
                                   std::span<const DenialConstraint> constraints,
                                   const BuildOptions& options = {});

std::size_t f_edge_count(const ConflictGraph& graph);

// Number of nodes with degree >= 1.
std::size_t f_positive_degree_count(const ConflictGraph& graph);

std::size_t max_degree(const ConflictGraph& graph);

// Remove a node and all incident edges (neighboring graph in the node-DP sense).
ConflictGraph remove_node(const ConflictGraph& graph, TupleId id);

// Cache format: header `nodes=<n>`, then one `u v` line per edge with u < v,
// sorted. Node ids are assumed contiguous 0..n-1, which holds for every graph
// built from a loaded dataset.
void save_graph_cache(const ConflictGraph& graph, const std::filesystem::path& path);
ConflictGraph load_graph_cache(const std::filesystem::path& path);

}  // namespace dpim
