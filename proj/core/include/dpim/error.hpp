#pragma once

#include <stdexcept>
#include <string>

namespace dpim {

// Malformed input: CSV rows, constraint text, config files. CLI maps this to exit code 2.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Constraint evaluation against a schema failed (unknown attribute, order
// comparison on a categorical attribute, numeric/categorical mix).
class EvalError : public std::runtime_error {
 public:
  explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// Privacy budget misuse: non-positive or overspent epsilon.
class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dpim
