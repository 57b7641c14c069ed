#include "dpim/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dpim/error.hpp"

namespace dpim {

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view label) {
  return splitmix64(seed ^ fnv1a64(label));
}

std::uint64_t RandomSource::next_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return x % bound;
}

double laplace_quantile(double u, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace_quantile: scale must be positive");
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("laplace_quantile: u must be in (0,1)");
  if (u < 0.5) return scale * std::log(2.0 * u);
  if (u > 0.5) return -scale * std::log(2.0 * (1.0 - u));
  return 0.0;
}

double laplace_noise(double scale, RandomSource& rng) {
  if (!(scale > 0.0)) throw std::invalid_argument("laplace_noise: scale must be positive");
  return laplace_quantile(rng.next_unit(), scale);
}

std::vector<double> em_probabilities(std::span<const double> scores, double sensitivity,
                                     double epsilon) {
  if (scores.empty()) throw std::invalid_argument("exponential mechanism: no candidates");
  if (!(sensitivity > 0.0)) {
    throw std::invalid_argument("exponential mechanism: sensitivity must be positive");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("exponential mechanism: epsilon must be positive");

  const double factor = epsilon / (2.0 * sensitivity);
  double max_score = *std::max_element(scores.begin(), scores.end());
  std::vector<double> weights(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    weights[i] = std::exp(factor * (scores[i] - max_score));
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

std::size_t exponential_mechanism(std::span<const double> scores, double sensitivity,
                                  double epsilon, RandomSource& rng) {
  std::vector<double> probs = em_probabilities(scores, sensitivity, epsilon);
  const double u = rng.next_unit();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;  // u landed in the rounding tail
}

PrivacyBudget::PrivacyBudget(double epsilon_total) : epsilon_total_(epsilon_total) {
  if (!(epsilon_total > 0.0)) throw BudgetError("privacy budget must be positive");
}

double PrivacyBudget::spent() const {
  double sum = 0.0;
  for (const auto& [label, eps] : ledger_) sum += eps;
  return sum;
}

double PrivacyBudget::remaining() const { return epsilon_total_ - spent(); }

void PrivacyBudget::spend(const std::string& label, double epsilon) {
  if (!(epsilon > 0.0)) {
    throw BudgetError("stage '" + label + "': epsilon spend must be strictly positive");
  }
  if (epsilon > remaining() + 1e-12) {
    throw BudgetError("stage '" + label + "': overspend (requested " + std::to_string(epsilon) +
                      ", remaining " + std::to_string(remaining()) + ")");
  }
  ledger_.emplace_back(label, epsilon);
}

}  // namespace dpim
