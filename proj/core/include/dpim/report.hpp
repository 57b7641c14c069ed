#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dpim/dp.hpp"

namespace dpim {

// Result of one private measure release. noisy_value is deliberately not
// clamped to >= 0 here; presentation-side clamping is a CLI concern.
struct MeasureReport {
  std::string kind;                       // "mi", "p", or "r"
  std::string strategy;                   // selection strategy, or "vertex-cover" for "r"
  double noisy_value = 0.0;
  std::optional<std::int64_t> theta_star; // absent for the repair measure
  PrivacyBudget ledger;
  std::uint64_t seed = 0;

  bool non_private = false;               // true only for the Baseline2 reference
  bool fd_branch_used = false;
  bool fallback_used = false;             // empty pruned candidate set fell back
  bool candidates_pruned_to_n = false;    // candidates above |V| were dropped
  std::optional<double> noisy_degree_bound;
};

}  // namespace dpim
