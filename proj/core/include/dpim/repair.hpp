#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpim/conflict_graph.hpp"
#include "dpim/dp.hpp"
#include "dpim/report.hpp"

namespace dpim {

// Pre-noise output of the stable-ordered greedy vertex cover. The picked
// edges form a matching, so cover_size = 2 * picked_edges.size().
struct VertexCoverTrace {
  std::int64_t cover_size = 0;
  EdgeList picked_edges;
  std::optional<double> noisy_size;
};

// Walk the stable order; when an edge survives in the residual graph (neither
// endpoint picked yet), take both endpoints and drop everything incident to
// them. Deterministic given the graph, a valid cover, and at most twice the
// optimum. Node-DP sensitivity of the size is 2.
VertexCoverTrace vertex_cover_size(const ConflictGraph& graph, const StableEdgeOrder& order);

// Releases the cover size with Laplace(2/epsilon) noise; the whole epsilon is
// spent in this single stage.
MeasureReport dp_repair_measure(const Dataset& dataset,
                                std::span<const DenialConstraint> constraints, double epsilon,
                                RandomSource& rng, const BuildOptions& build = {});

MeasureReport dp_repair_measure_on_graph(const ConflictGraph& graph, double epsilon,
                                         RandomSource& rng);

}  // namespace dpim
