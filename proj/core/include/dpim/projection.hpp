#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dpim/conflict_graph.hpp"
#include "dpim/dataset.hpp"
#include "dpim/dc.hpp"
#include "dpim/dp.hpp"
#include "dpim/report.hpp"

namespace dpim {

// Which graph statistic f is released: edge count (minimal-inconsistency
// measure) or positive-degree node count (problematic-tuples measure).
enum class MeasureKind { MinimalInconsistency, Problematic };

std::string to_cli_string(MeasureKind kind);

// Candidate degree bounds for the projection, sorted distinct positive integers.
struct CandidateSet {
  std::vector<std::int64_t> thetas;

  explicit CandidateSet(std::vector<std::int64_t> values);
  std::int64_t theta_max() const { return thetas.back(); }
};

// {1, 5, 10, 100, 500} plus multiples of 1000 up to 10000, intersected with
// [1, n] and always containing n.
CandidateSet default_candidate_set(std::size_t n_nodes);

enum class SelectionStrategy {
  Baseline1,                     // theta = |V|, no selection, full budget on release
  Baseline2,                     // theta = true max degree; non-private reference
  BasicEM,
  HierarchicalEM,
  UpperBoundPlusHierarchicalEM,
};

std::string to_cli_string(SelectionStrategy strategy);
std::optional<SelectionStrategy> strategy_from_cli_string(std::string_view name);

// Degree-bounded projection: walk the stable order and add edge (u, v) iff
// both endpoint degrees are still below theta. Max degree of the result is at
// most theta; the node set is unchanged.
ConflictGraph edge_addition_projection(const ConflictGraph& graph, std::int64_t theta,
                                       const StableEdgeOrder& order);

// Both released statistics of the theta-bounded projection in one pass.
struct ProjectedStats {
  std::int64_t edge_count = 0;
  std::int64_t positive_degree_count = 0;
};
ProjectedStats project_stats(const ConflictGraph& graph, const StableEdgeOrder& order,
                             std::int64_t theta);

std::int64_t stat_for(const ProjectedStats& stats, MeasureKind kind);

// Statistic lost by projecting at theta instead of theta_max; always >= 0 for
// theta <= theta_max.
std::int64_t bias_term(const ConflictGraph& graph, std::int64_t theta, std::int64_t theta_max,
                       MeasureKind kind, const StableEdgeOrder& order);

// Quality of a candidate: minus the projection bias minus the expected
// Laplace release error sqrt(2)*theta/epsilon2. Candidates at or above the
// bias reference theta_max (the |V| sentinel) carry no projection bias and
// score -sqrt(2)*theta/epsilon2.
double quality(const ConflictGraph& graph, std::int64_t theta, std::int64_t theta_max,
               double epsilon2, MeasureKind kind, const StableEdgeOrder& order);

// Per-FD degree bound: the maximum multiplicity of an X-value minus one. A
// node can only conflict under X -> Y with tuples sharing its X-value.
// Sensitivity 1 under tuple addition/removal.
std::int64_t fd_degree_bound(const Dataset& dataset, const FdForm& fd);

// Sum over FDs of (bound + Laplace(|fds|/epsilon0)): each FD gets an
// epsilon0/|fds| share and the per-FD bound has sensitivity 1.
double noisy_degree_bound(const Dataset& dataset, std::span<const FdForm> fds, double epsilon0,
                          RandomSource& rng);

enum class FdBranchMode { Auto, On, Off };

// Outcome of a theta selection, including the spends it made and enough round
// detail to audit the hierarchical mechanism.
struct SelectionResult {
  std::int64_t theta_star = 0;
  std::vector<std::pair<std::string, double>> spends;
  bool fd_branch_used = false;
  bool fallback_used = false;
  bool candidates_pruned_to_n = false;
  std::optional<double> noisy_bound;
  std::optional<std::int64_t> theta_round1;
  std::vector<std::int64_t> round1_candidates;
};

// One exponential-mechanism pass over the full candidate set with sensitivity
// theta_max = max(candidates).
SelectionResult select_theta_basic(const ConflictGraph& graph, const StableEdgeOrder& order,
                                   const CandidateSet& candidates, double epsilon1,
                                   double epsilon2, MeasureKind kind, RandomSource& rng);

// Optimized selection: optional FD-based bound estimation (epsilon0 =
// epsilon1/4) pruning the candidates to {theta <= bound} plus the bound and
// |V| sentinels, then a two-round exponential mechanism where round two keeps
// only candidates strictly below the round-one pick and inherits it as the
// quality sensitivity. An empty round-two set falls back to the round-one pick.
SelectionResult select_theta_optimized(const ConflictGraph& graph, const StableEdgeOrder& order,
                                       const CandidateSet& candidates, double epsilon1,
                                       double epsilon2, MeasureKind kind,
                                       std::span<const DenialConstraint> constraints,
                                       const Dataset& dataset, RandomSource& rng,
                                       FdBranchMode fd_mode = FdBranchMode::Auto);

struct MeasureOptions {
  std::optional<CandidateSet> candidates;  // default: default_candidate_set(|V|)
  FdBranchMode fd_mode = FdBranchMode::Auto;
  const ConflictGraph* prebuilt_graph = nullptr;  // skip construction when supplied
  BuildOptions build;
};

// Full pipeline: build the conflict graph, pick theta* per the strategy,
// project, and release f(projection) + Laplace(theta*/epsilon2). Baselines
// spend the entire epsilon1 + epsilon2 on the release noise instead.
MeasureReport dp_measure(const Dataset& dataset, std::span<const DenialConstraint> constraints,
                         MeasureKind kind, double epsilon1, double epsilon2,
                         SelectionStrategy strategy, RandomSource& rng,
                         const MeasureOptions& options = {});

// High-probability error bound of the basic-EM pipeline:
// -q_opt + (2*theta_max/epsilon1) * ln(2|candidates| / (n_optimal * beta)),
// valid for 0 < beta <= exp(-sqrt(2)). Diagnostic only; costs no budget.
double utility_bound(double q_tilde_opt, std::int64_t theta_max, std::size_t n_candidates,
                     std::size_t n_optimal, double beta, double epsilon1);

}  // namespace dpim
