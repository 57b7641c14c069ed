#include "dpim/projection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "dpim/error.hpp"

namespace dpim {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

std::string to_cli_string(MeasureKind kind) {
  return kind == MeasureKind::MinimalInconsistency ? "mi" : "p";
}

CandidateSet::CandidateSet(std::vector<std::int64_t> values) : thetas(std::move(values)) {
  if (thetas.empty()) throw InputError("candidate set must be non-empty");
  for (std::int64_t t : thetas) {
    if (t < 1) throw InputError("candidate degree bounds must be positive integers");
  }
  std::sort(thetas.begin(), thetas.end());
  thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
}

CandidateSet default_candidate_set(std::size_t n_nodes) {
  const std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(n_nodes));
  std::vector<std::int64_t> base = {1, 5, 10, 100, 500};
  for (std::int64_t k = 1000; k <= 10000; k += 1000) base.push_back(k);
  std::vector<std::int64_t> out;
  for (std::int64_t t : base) {
    if (t <= n) out.push_back(t);
  }
  out.push_back(n);
  return CandidateSet(std::move(out));
}

std::string to_cli_string(SelectionStrategy strategy) {
  switch (strategy) {
    case SelectionStrategy::Baseline1: return "baseline1";
    case SelectionStrategy::Baseline2: return "baseline2";
    case SelectionStrategy::BasicEM: return "em";
    case SelectionStrategy::HierarchicalEM: return "hier-em";
    case SelectionStrategy::UpperBoundPlusHierarchicalEM: return "ub-hier-em";
  }
  return "?";
}

std::optional<SelectionStrategy> strategy_from_cli_string(std::string_view name) {
  if (name == "baseline1") return SelectionStrategy::Baseline1;
  if (name == "baseline2") return SelectionStrategy::Baseline2;
  if (name == "em") return SelectionStrategy::BasicEM;
  if (name == "hier-em") return SelectionStrategy::HierarchicalEM;
  if (name == "ub-hier-em") return SelectionStrategy::UpperBoundPlusHierarchicalEM;
  return std::nullopt;
}

ConflictGraph edge_addition_projection(const ConflictGraph& graph, std::int64_t theta,
                                       const StableEdgeOrder& order) {
  if (theta < 1) throw std::invalid_argument("projection bound theta must be >= 1");
  std::vector<std::int64_t> degree(graph.node_count(), 0);
  EdgeList kept;
  kept.reserve(order.edges.size());
  for (const auto& [u, v] : order.edges) {
    std::size_t iu = graph.index_of(u);
    std::size_t iv = graph.index_of(v);
    if (degree[iu] < theta && degree[iv] < theta) {
      ++degree[iu];
      ++degree[iv];
      kept.emplace_back(u, v);
    }
  }
  return ConflictGraph(graph.nodes(), std::move(kept));
}

ProjectedStats project_stats(const ConflictGraph& graph, const StableEdgeOrder& order,
                             std::int64_t theta) {
  if (theta < 1) throw std::invalid_argument("projection bound theta must be >= 1");
  std::vector<std::int64_t> degree(graph.node_count(), 0);
  ProjectedStats stats;
  for (const auto& [u, v] : order.edges) {
    std::size_t iu = graph.index_of(u);
    std::size_t iv = graph.index_of(v);
    if (degree[iu] < theta && degree[iv] < theta) {
      if (degree[iu] == 0) ++stats.positive_degree_count;
      if (degree[iv] == 0) ++stats.positive_degree_count;
      ++degree[iu];
      ++degree[iv];
      ++stats.edge_count;
    }
  }
  return stats;
}

std::int64_t stat_for(const ProjectedStats& stats, MeasureKind kind) {
  return kind == MeasureKind::MinimalInconsistency ? stats.edge_count
                                                   : stats.positive_degree_count;
}

std::int64_t bias_term(const ConflictGraph& graph, std::int64_t theta, std::int64_t theta_max,
                       MeasureKind kind, const StableEdgeOrder& order) {
  if (theta > theta_max) throw std::invalid_argument("bias_term requires theta <= theta_max");
  std::int64_t at_max = stat_for(project_stats(graph, order, theta_max), kind);
  std::int64_t at_theta = stat_for(project_stats(graph, order, theta), kind);
  return at_max - at_theta;
}

double quality(const ConflictGraph& graph, std::int64_t theta, std::int64_t theta_max,
               double epsilon2, MeasureKind kind, const StableEdgeOrder& order) {
  if (!(epsilon2 > 0.0)) throw std::invalid_argument("quality: epsilon2 must be positive");
  std::int64_t bias = theta >= theta_max ? 0 : bias_term(graph, theta, theta_max, kind, order);
  return -static_cast<double>(bias) - kSqrt2 * static_cast<double>(theta) / epsilon2;
}

std::int64_t fd_degree_bound(const Dataset& dataset, const FdForm& fd) {
  std::vector<std::size_t> positions;
  positions.reserve(fd.lhs.size());
  for (const auto& name : fd.lhs) {
    auto idx = dataset.attribute_index(name);
    if (!idx) throw EvalError("fd_degree_bound: unknown attribute '" + name + "'");
    positions.push_back(*idx);
  }
  if (dataset.size() == 0) return 0;

  std::unordered_map<std::vector<Value>, std::int64_t, ValueVecHash, ValueVecEq> freq;
  freq.reserve(dataset.size());
  std::int64_t best = 0;
  for (const auto& row : dataset.rows()) {
    std::vector<Value> key;
    key.reserve(positions.size());
    for (std::size_t pos : positions) key.push_back(row[pos]);
    best = std::max(best, ++freq[std::move(key)]);
  }
  return best - 1;
}

double noisy_degree_bound(const Dataset& dataset, std::span<const FdForm> fds, double epsilon0,
                          RandomSource& rng) {
  if (fds.empty()) throw std::invalid_argument("noisy_degree_bound: no FDs given");
  if (!(epsilon0 > 0.0)) throw std::invalid_argument("noisy_degree_bound: epsilon0 must be positive");
  const double scale = static_cast<double>(fds.size()) / epsilon0;
  double total = 0.0;
  for (const auto& fd : fds) {
    total += static_cast<double>(fd_degree_bound(dataset, fd)) + laplace_noise(scale, rng);
  }
  return total;
}

namespace {

// Quality scores for a candidate list against a bias reference theta_max_ref.
// Candidates at or above the reference (the |V| sentinel) carry zero bias.
std::vector<double> candidate_scores(const ConflictGraph& graph, const StableEdgeOrder& order,
                                     std::span<const std::int64_t> thetas,
                                     std::int64_t theta_max_ref, double epsilon2,
                                     MeasureKind kind) {
  const std::int64_t stat_at_ref = stat_for(project_stats(graph, order, theta_max_ref), kind);
  std::vector<double> scores;
  scores.reserve(thetas.size());
  for (std::int64_t theta : thetas) {
    double bias = 0.0;
    if (theta < theta_max_ref) {
      std::int64_t at_theta = stat_for(project_stats(graph, order, theta), kind);
      bias = static_cast<double>(stat_at_ref - at_theta);
    }
    scores.push_back(-bias - kSqrt2 * static_cast<double>(theta) / epsilon2);
  }
  return scores;
}

// Drops candidates above |V|; an emptied set degenerates to {|V|}.
std::vector<std::int64_t> prune_to_node_count(const CandidateSet& candidates, std::int64_t n,
                                              bool& pruned_flag) {
  std::vector<std::int64_t> out;
  for (std::int64_t t : candidates.thetas) {
    if (t <= n) out.push_back(t);
  }
  pruned_flag = out.size() != candidates.thetas.size();
  if (out.empty()) out.push_back(std::max<std::int64_t>(1, n));
  return out;
}

}  // namespace

SelectionResult select_theta_basic(const ConflictGraph& graph, const StableEdgeOrder& order,
                                   const CandidateSet& candidates, double epsilon1,
                                   double epsilon2, MeasureKind kind, RandomSource& rng) {
  if (!(epsilon1 > 0.0)) throw std::invalid_argument("select_theta_basic: epsilon1 must be positive");
  SelectionResult result;
  const std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(graph.node_count()));
  std::vector<std::int64_t> thetas =
      prune_to_node_count(candidates, n, result.candidates_pruned_to_n);
  const std::int64_t theta_max = thetas.back();

  std::vector<double> scores = candidate_scores(graph, order, thetas, theta_max, epsilon2, kind);
  std::size_t pick =
      exponential_mechanism(scores, static_cast<double>(theta_max), epsilon1, rng);
  result.theta_star = thetas[pick];
  result.round1_candidates = thetas;
  result.spends.emplace_back("em-select", epsilon1);
  return result;
}

SelectionResult select_theta_optimized(const ConflictGraph& graph, const StableEdgeOrder& order,
                                       const CandidateSet& candidates, double epsilon1,
                                       double epsilon2, MeasureKind kind,
                                       std::span<const DenialConstraint> constraints,
                                       const Dataset& dataset, RandomSource& rng,
                                       FdBranchMode fd_mode) {
  if (!(epsilon1 > 0.0)) {
    throw std::invalid_argument("select_theta_optimized: epsilon1 must be positive");
  }
  SelectionResult result;
  const std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(graph.node_count()));
  std::vector<std::int64_t> thetas =
      prune_to_node_count(candidates, n, result.candidates_pruned_to_n);

  std::vector<FdForm> fds;
  for (const auto& dc : constraints) {
    if (auto fd = classify_fd(dc)) fds.push_back(std::move(*fd));
  }
  bool use_fd_branch = false;
  switch (fd_mode) {
    case FdBranchMode::On:
      if (fds.empty()) {
        throw InputError("FD degree bound requested but no constraint is in FD form");
      }
      use_fd_branch = true;
      break;
    case FdBranchMode::Off:
      use_fd_branch = false;
      break;
    case FdBranchMode::Auto:
      // "Mainly FDs": at least half of the constraints, and at least one.
      use_fd_branch = !fds.empty() && 2 * fds.size() >= constraints.size();
      break;
  }

  double remaining = epsilon1;
  std::int64_t theta_max = thetas.back();
  if (use_fd_branch) {
    const double epsilon0 = epsilon1 / 4.0;
    remaining = epsilon1 - epsilon0;
    const double bound = noisy_degree_bound(dataset, fds, epsilon0, rng);
    result.spends.emplace_back("fd-bound", epsilon0);
    result.fd_branch_used = true;
    result.noisy_bound = bound;

    std::int64_t sentinel = static_cast<std::int64_t>(std::ceil(bound));
    sentinel = std::clamp<std::int64_t>(sentinel, 1, n);

    std::vector<std::int64_t> pruned;
    for (std::int64_t t : thetas) {
      if (static_cast<double>(t) <= bound) pruned.push_back(t);
    }
    pruned.push_back(sentinel);
    pruned.push_back(n);
    std::sort(pruned.begin(), pruned.end());
    pruned.erase(std::unique(pruned.begin(), pruned.end()), pruned.end());
    thetas = std::move(pruned);
    theta_max = sentinel;
  }

  const double epsilon_round = remaining / 2.0;

  // Round one over the (possibly bound-pruned) set.
  std::vector<double> scores = candidate_scores(graph, order, thetas, theta_max, epsilon2, kind);
  std::size_t pick =
      exponential_mechanism(scores, static_cast<double>(theta_max), epsilon_round, rng);
  const std::int64_t theta_round1 = thetas[pick];
  result.theta_round1 = theta_round1;
  result.round1_candidates = thetas;
  result.spends.emplace_back("em-round-1", epsilon_round);

  // Round two keeps only candidates strictly below the round-one pick and
  // uses it as the quality sensitivity. An empty set means the round-one pick
  // was already the smallest candidate; fall back to it.
  std::vector<std::int64_t> round2;
  for (std::int64_t t : thetas) {
    if (t < theta_round1) round2.push_back(t);
  }
  if (round2.empty()) {
    result.theta_star = theta_round1;
    result.fallback_used = true;
    result.spends.emplace_back("em-round-2", epsilon_round);
    return result;
  }
  scores = candidate_scores(graph, order, round2, theta_round1, epsilon2, kind);
  pick = exponential_mechanism(scores, static_cast<double>(theta_round1), epsilon_round, rng);
  result.theta_star = round2[pick];
  result.spends.emplace_back("em-round-2", epsilon_round);
  return result;
}

MeasureReport dp_measure(const Dataset& dataset, std::span<const DenialConstraint> constraints,
                         MeasureKind kind, double epsilon1, double epsilon2,
                         SelectionStrategy strategy, RandomSource& rng,
                         const MeasureOptions& options) {
  if (!(epsilon1 > 0.0) || !(epsilon2 > 0.0)) {
    throw BudgetError("dp_measure: epsilon1 and epsilon2 must be positive");
  }

  ConflictGraph built;
  const ConflictGraph* graph = options.prebuilt_graph;
  if (graph == nullptr) {
    built = build_conflict_graph(dataset, constraints, options.build);
    graph = &built;
  }
  const StableEdgeOrder order = stable_edge_order(*graph);
  const std::int64_t n = std::max<std::int64_t>(1, static_cast<std::int64_t>(graph->node_count()));
  const CandidateSet candidates =
      options.candidates.has_value() ? *options.candidates : default_candidate_set(graph->node_count());

  MeasureReport report;
  report.kind = to_cli_string(kind);
  report.strategy = to_cli_string(strategy);
  report.seed = rng.seed();
  report.ledger = PrivacyBudget(epsilon1 + epsilon2);

  std::int64_t theta_star = 0;
  double release_scale = 0.0;
  switch (strategy) {
    case SelectionStrategy::Baseline1: {
      theta_star = n;
      release_scale = static_cast<double>(theta_star) / (epsilon1 + epsilon2);
      report.ledger.spend("release", epsilon1 + epsilon2);
      break;
    }
    case SelectionStrategy::Baseline2: {
      theta_star = std::max<std::int64_t>(1, static_cast<std::int64_t>(max_degree(*graph)));
      release_scale = static_cast<double>(theta_star) / (epsilon1 + epsilon2);
      report.ledger.spend("release", epsilon1 + epsilon2);
      report.non_private = true;
      break;
    }
    case SelectionStrategy::BasicEM:
    case SelectionStrategy::HierarchicalEM:
    case SelectionStrategy::UpperBoundPlusHierarchicalEM: {
      SelectionResult sel;
      if (strategy == SelectionStrategy::BasicEM) {
        sel = select_theta_basic(*graph, order, candidates, epsilon1, epsilon2, kind, rng);
      } else {
        FdBranchMode mode = strategy == SelectionStrategy::HierarchicalEM ? FdBranchMode::Off
                                                                          : options.fd_mode;
        sel = select_theta_optimized(*graph, order, candidates, epsilon1, epsilon2, kind,
                                     constraints, dataset, rng, mode);
      }
      for (const auto& [label, eps] : sel.spends) report.ledger.spend(label, eps);
      theta_star = sel.theta_star;
      release_scale = static_cast<double>(theta_star) / epsilon2;
      report.ledger.spend("release", epsilon2);
      report.fd_branch_used = sel.fd_branch_used;
      report.fallback_used = sel.fallback_used;
      report.candidates_pruned_to_n = sel.candidates_pruned_to_n;
      report.noisy_degree_bound = sel.noisy_bound;
      break;
    }
  }

  const std::int64_t released_stat =
      stat_for(project_stats(*graph, order, theta_star), kind);
  report.theta_star = theta_star;
  report.noisy_value = static_cast<double>(released_stat) + laplace_noise(release_scale, rng);
  return report;
}

double utility_bound(double q_tilde_opt, std::int64_t theta_max, std::size_t n_candidates,
                     std::size_t n_optimal, double beta, double epsilon1) {
  if (n_optimal < 1 || n_candidates < n_optimal) {
    throw std::invalid_argument("utility_bound: need 1 <= n_optimal <= n_candidates");
  }
  const double beta_cap = std::exp(-kSqrt2);
  if (!(beta > 0.0) || beta > beta_cap) {
    throw std::invalid_argument("utility_bound: beta must lie in (0, exp(-sqrt(2))]");
  }
  if (!(epsilon1 > 0.0)) throw std::invalid_argument("utility_bound: epsilon1 must be positive");
  const double log_term =
      std::log(2.0 * static_cast<double>(n_candidates) / (static_cast<double>(n_optimal) * beta));
  return -q_tilde_opt + (2.0 * static_cast<double>(theta_max) / epsilon1) * log_term;
}

}  // namespace dpim
