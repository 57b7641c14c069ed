#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dpim/dataset.hpp"
#include "dpim/value.hpp"

namespace dpim {

enum class CompareOp { Lt, Gt, Le, Ge, Eq, Ne };

std::string to_string(CompareOp op);

// Which of the two quantified tuples an operand refers to.
enum class TupleSide { T, TPrime };

struct Operand {
  bool is_constant = false;
  TupleSide side = TupleSide::T;   // valid when !is_constant
  std::string attribute;           // valid when !is_constant
  Value constant;                  // valid when is_constant

  static Operand tuple_ref(TupleSide side, std::string attribute);
  static Operand make_constant(Value v);
};

struct Predicate {
  Operand left;
  CompareOp op = CompareOp::Eq;
  Operand right;
};

// A denial constraint over a tuple pair: forbidden that all predicates hold
// jointly. An ordered pair (t, t') violates the constraint iff every predicate
// evaluates true; the pair {a, b} violates it iff either ordering does.
class DenialConstraint {
 public:
  DenialConstraint(std::vector<Predicate> predicates, std::string source_text);

  const std::vector<Predicate>& predicates() const { return predicates_; }
  const std::string& source_text() const { return source_text_; }

 private:
  std::vector<Predicate> predicates_;
  std::string source_text_;
};

// Grammar: `!( term (& term)* )`, term = operand OP operand with at least one
// tuple reference per term, OP in {<,>,<=,>=,=,!=}. Tuple refs are `t.Attr` or
// `t'.Attr`; constants are double-quoted strings or bare numbers. Whitespace
// is insignificant. Errors carry the byte offset.
DenialConstraint parse_dc(std::string_view text);

// One constraint per line; blank lines and `#` comments skipped.
std::vector<DenialConstraint> parse_dc_file(const std::filesystem::path& path);

// Canonical text form; parse(format_dc(dc)) reproduces dc.
std::string format_dc(const DenialConstraint& dc);

// Functional dependency X -> Y extracted from the pattern
// { t.A = t'.A : A in X } + { t.Y != t'.Y }, no constants.
struct FdForm {
  std::vector<std::string> lhs;  // sorted attribute names
  std::string rhs;
};

std::optional<FdForm> classify_fd(const DenialConstraint& dc);

// Constraint resolved against a schema: attribute positions bound and operator
// kind-compatibility checked once. Evaluation is pure.
class BoundConstraint {
 public:
  BoundConstraint(const DenialConstraint& dc, const std::vector<AttributeSchema>& schema);

  // All predicates hold with t := t_row, t' := tp_row.
  bool holds_ordered(std::span<const Value> t_row, std::span<const Value> tp_row) const;

  // Symmetric violation check: either ordering witnesses the conflict.
  bool violates(std::span<const Value> a, std::span<const Value> b) const {
    return holds_ordered(a, b) || holds_ordered(b, a);
  }

  // Column positions P with a `t.A = t'.A` predicate; usable as an exact
  // blocking key because every violating ordered pair agrees on them.
  const std::vector<std::size_t>& symmetric_equality_positions() const {
    return blocking_positions_;
  }

  const std::string& source_text() const { return source_text_; }

 private:
  struct BoundOperand {
    bool is_constant;
    TupleSide side;
    std::size_t position;
    Value constant;
  };
  struct BoundPredicate {
    BoundOperand left;
    CompareOp op;
    BoundOperand right;
  };

  std::vector<BoundPredicate> predicates_;
  std::vector<std::size_t> blocking_positions_;
  std::string source_text_;
};

// Convenience wrapper around BoundConstraint for one-off checks.
bool violates(const DenialConstraint& dc, const std::vector<AttributeSchema>& schema,
              std::span<const Value> a, std::span<const Value> b);

// One comparison under the DC semantics (exact equality, IEEE order for
// numerics). Order comparisons on categorical values throw.
bool compare_values(CompareOp op, const Value& lhs, const Value& rhs);

// Attribute names referenced by any tuple operand of any constraint.
std::vector<std::string> constraint_attributes(std::span<const DenialConstraint> constraints);

}  // namespace dpim
