#include "dpim/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "dpim/error.hpp"
#include "dpim/repair.hpp"

namespace dpim {

std::string to_cli_string(TrueMeasureKind kind) {
  switch (kind) {
    case TrueMeasureKind::Drastic: return "d";
    case TrueMeasureKind::MinimalInconsistency: return "mi";
    case TrueMeasureKind::Problematic: return "p";
    case TrueMeasureKind::RepairApprox: return "r-approx";
    case TrueMeasureKind::RepairExact: return "r-exact";
  }
  return "?";
}

namespace {

// Branch and bound over bitmask adjacency (at most 64 nodes, guarded to 30).
class ExactCoverSolver {
 public:
  explicit ExactCoverSolver(std::vector<std::uint64_t> adjacency)
      : adjacency_(std::move(adjacency)), best_(static_cast<int>(adjacency_.size())) {}

  int solve() {
    std::uint64_t all = adjacency_.size() == 64
                            ? ~0ull
                            : ((1ull << adjacency_.size()) - 1);
    recurse(all, 0);
    return best_;
  }

 private:
  int lower_bound(std::uint64_t alive) const {
    // Greedy matching: each matched edge forces one cover vertex.
    std::uint64_t used = 0;
    int bound = 0;
    for (std::size_t v = 0; v < adjacency_.size(); ++v) {
      if (!(alive >> v & 1) || (used >> v & 1)) continue;
      std::uint64_t candidates = adjacency_[v] & alive & ~used;
      if (candidates) {
        used |= 1ull << v;
        used |= candidates & (~candidates + 1);  // lowest set neighbor
        ++bound;
      }
    }
    return bound;
  }

  void recurse(std::uint64_t alive, int picked) {
    if (picked >= best_) return;

    // Reductions: drop isolated nodes, take the neighbor of degree-one nodes.
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t v = 0; v < adjacency_.size(); ++v) {
        if (!(alive >> v & 1)) continue;
        std::uint64_t neighbors = adjacency_[v] & alive;
        if (neighbors == 0) {
          alive &= ~(1ull << v);
          changed = true;
        } else if ((neighbors & (neighbors - 1)) == 0) {  // exactly one neighbor
          alive &= ~neighbors;
          alive &= ~(1ull << v);
          ++picked;
          if (picked >= best_) return;
          changed = true;
        }
      }
    }
    if (alive == 0) {
      best_ = std::min(best_, picked);
      return;
    }
    if (picked + lower_bound(alive) >= best_) return;

    // Branch on a maximum-degree vertex: either it joins the cover or all of
    // its neighbors do.
    std::size_t pivot = 0;
    int pivot_degree = -1;
    for (std::size_t v = 0; v < adjacency_.size(); ++v) {
      if (!(alive >> v & 1)) continue;
      int degree = std::popcount(adjacency_[v] & alive);
      if (degree > pivot_degree) {
        pivot_degree = degree;
        pivot = v;
      }
    }
    std::uint64_t neighbors = adjacency_[pivot] & alive;
    recurse(alive & ~(1ull << pivot), picked + 1);
    recurse(alive & ~neighbors & ~(1ull << pivot), picked + std::popcount(neighbors));
  }

  std::vector<std::uint64_t> adjacency_;
  int best_;
};

}  // namespace

std::int64_t exact_min_vertex_cover(const ConflictGraph& graph, std::size_t max_positive_nodes) {
  // Restrict to positive-degree nodes; isolated nodes never enter a minimum cover.
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    if (graph.degree_at(i) > 0) positive.push_back(i);
  }
  if (positive.size() > max_positive_nodes) {
    throw InputError("exact vertex cover limited to " + std::to_string(max_positive_nodes) +
                     " positive-degree nodes (got " + std::to_string(positive.size()) +
                     "); use r-approx instead");
  }
  if (positive.empty()) return 0;

  std::vector<std::size_t> dense_to_local(graph.node_count(), 0);
  for (std::size_t k = 0; k < positive.size(); ++k) dense_to_local[positive[k]] = k;
  std::vector<std::uint64_t> adjacency(positive.size(), 0);
  for (const auto& [u, v] : graph.edges()) {
    std::size_t a = dense_to_local[graph.index_of(u)];
    std::size_t b = dense_to_local[graph.index_of(v)];
    adjacency[a] |= 1ull << b;
    adjacency[b] |= 1ull << a;
  }
  return ExactCoverSolver(std::move(adjacency)).solve();
}

std::int64_t true_measure_on_graph(const ConflictGraph& graph, TrueMeasureKind kind) {
  switch (kind) {
    case TrueMeasureKind::Drastic:
      return graph.edge_count() > 0 ? 1 : 0;
    case TrueMeasureKind::MinimalInconsistency:
      return static_cast<std::int64_t>(f_edge_count(graph));
    case TrueMeasureKind::Problematic:
      return static_cast<std::int64_t>(f_positive_degree_count(graph));
    case TrueMeasureKind::RepairApprox: {
      StableEdgeOrder order = stable_edge_order(graph);
      return vertex_cover_size(graph, order).cover_size;
    }
    case TrueMeasureKind::RepairExact:
      return exact_min_vertex_cover(graph);
  }
  throw std::invalid_argument("unknown measure kind");
}

std::int64_t true_measure(const Dataset& dataset, std::span<const DenialConstraint> constraints,
                          TrueMeasureKind kind, const BuildOptions& build) {
  ConflictGraph graph = build_conflict_graph(dataset, constraints, build);
  return true_measure_on_graph(graph, kind);
}

ErrorValue relative_error(std::int64_t true_value, double noisy_value) {
  if (true_value == 0) {
    return {std::abs(noisy_value), true};
  }
  return {std::abs(static_cast<double>(true_value) - noisy_value) /
              static_cast<double>(true_value),
          false};
}

}  // namespace dpim
