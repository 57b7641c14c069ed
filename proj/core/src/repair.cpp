#include "dpim/repair.hpp"

#include <stdexcept>

#include "dpim/error.hpp"

namespace dpim {

VertexCoverTrace vertex_cover_size(const ConflictGraph& graph, const StableEdgeOrder& order) {
  std::vector<char> picked(graph.node_count(), 0);
  VertexCoverTrace trace;
  for (const auto& [u, v] : order.edges) {
    std::size_t iu = graph.index_of(u);
    std::size_t iv = graph.index_of(v);
    if (picked[iu] || picked[iv]) continue;  // edge already deleted by an earlier pick
    picked[iu] = 1;
    picked[iv] = 1;
    trace.cover_size += 2;
    trace.picked_edges.emplace_back(u, v);
  }
  return trace;
}

MeasureReport dp_repair_measure_on_graph(const ConflictGraph& graph, double epsilon,
                                         RandomSource& rng) {
  if (!(epsilon > 0.0)) throw BudgetError("dp_repair_measure: epsilon must be positive");
  const StableEdgeOrder order = stable_edge_order(graph);
  VertexCoverTrace trace = vertex_cover_size(graph, order);

  MeasureReport report;
  report.kind = "r";
  report.strategy = "vertex-cover";
  report.seed = rng.seed();
  report.ledger = PrivacyBudget(epsilon);
  report.ledger.spend("release", epsilon);
  report.noisy_value = static_cast<double>(trace.cover_size) + laplace_noise(2.0 / epsilon, rng);
  return report;
}

MeasureReport dp_repair_measure(const Dataset& dataset,
                                std::span<const DenialConstraint> constraints, double epsilon,
                                RandomSource& rng, const BuildOptions& build) {
  ConflictGraph graph = build_conflict_graph(dataset, constraints, build);
  return dp_repair_measure_on_graph(graph, epsilon, rng);
}

}  // namespace dpim
