#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "dpim/conflict_graph.hpp"
#include "dpim/dataset.hpp"
#include "dpim/dc.hpp"

namespace dpim {

// Non-private reference computations for testing and relative-error reporting.
enum class TrueMeasureKind { Drastic, MinimalInconsistency, Problematic, RepairApprox, RepairExact };

std::string to_cli_string(TrueMeasureKind kind);

// Drastic: 1 iff any edge exists. MI: edge count. P: positive-degree nodes.
// RepairApprox: the deterministic stable-order greedy cover size (same code
// path as the private repair measure, pre-noise). RepairExact: branch-and-bound
// minimum vertex cover, guarded to graphs with at most 30 positive-degree nodes.
std::int64_t true_measure_on_graph(const ConflictGraph& graph, TrueMeasureKind kind);

std::int64_t true_measure(const Dataset& dataset, std::span<const DenialConstraint> constraints,
                          TrueMeasureKind kind, const BuildOptions& build = {});

// Exact minimum vertex cover size (branch and bound with degree-one and
// dominated-branch reductions). Throws when the positive-degree node count
// exceeds max_positive_nodes.
std::int64_t exact_min_vertex_cover(const ConflictGraph& graph,
                                    std::size_t max_positive_nodes = 30);

// Normalized L1 error |true - noisy| / true. A zero true value has no defined
// relative error; the absolute error is reported with the flag set.
struct ErrorValue {
  double value = 0.0;
  bool is_absolute = false;
};

ErrorValue relative_error(std::int64_t true_value, double noisy_value);

}  // namespace dpim
