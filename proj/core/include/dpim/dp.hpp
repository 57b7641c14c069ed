#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dpim {

// Child-seed derivation: splitmix64(seed XOR fnv1a64(label)). Stated here so
// parallel pipelines can reproduce the same stream assignment everywhere.
std::uint64_t fnv1a64(std::string_view text);
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t seed, std::string_view label);

// Deterministic seeded randomness. Identical seed implies an identical draw
// sequence on every platform: mt19937_64 is fully specified by the standard
// and uniforms are built from raw 64-bit draws, not from distribution objects.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // 53-bit uniform in the open interval (0, 1).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased uniform draw in [0, bound) by rejection.
  std::uint64_t next_below(std::uint64_t bound);

  // Independent stream for a named pipeline stage.
  RandomSource child(std::string_view label) const {
    return RandomSource(mix_seed(seed_, label));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Laplace(0, scale) quantile. u = 0.5 maps to 0 exactly.
double laplace_quantile(double u, double scale);

// One Laplace(0, scale) sample via inverse CDF on a 53-bit uniform. The usual
// floating-point side channels of textbook Laplace sampling apply and are not
// mitigated here.
double laplace_noise(double scale, RandomSource& rng);

// Closed-form exponential-mechanism probabilities, computed in log space with
// max-score subtraction: p_i proportional to exp(epsilon * score_i / (2 * sensitivity)).
std::vector<double> em_probabilities(std::span<const double> scores, double sensitivity,
                                     double epsilon);

// Samples an index under the exponential mechanism. Ties between equal
// cumulative boundaries resolve to the lowest index.
std::size_t exponential_mechanism(std::span<const double> scores, double sensitivity,
                                  double epsilon, RandomSource& rng);

// Epsilon accounting across mechanism stages under sequential composition.
class PrivacyBudget {
 public:
  PrivacyBudget() = default;
  explicit PrivacyBudget(double epsilon_total);

  // Records a spend; throws BudgetError when epsilon is non-positive or the
  // remaining budget (within 1e-12 slack) is insufficient.
  void spend(const std::string& label, double epsilon);

  double total() const { return epsilon_total_; }
  double spent() const;
  double remaining() const;
  const std::vector<std::pair<std::string, double>>& ledger() const { return ledger_; }

 private:
  double epsilon_total_ = 0.0;
  std::vector<std::pair<std::string, double>> ledger_;
};

}  // namespace dpim
