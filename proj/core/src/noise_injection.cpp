#include "dpim/noise_injection.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <unordered_map>

#include "dpim/error.hpp"

namespace dpim {

namespace {

// Unit of the last significant digit of the shortest decimal representation.
// 12.34 -> 0.01, 100 -> 1, 1.5e-07 -> 1e-08.
double last_digit_unit(double value) {
  std::string text = format_value(Value(value));
  int exp10 = 0;
  auto epos = text.find_first_of("eE");
  std::string mantissa = epos == std::string::npos ? text : text.substr(0, epos);
  if (epos != std::string::npos) exp10 = std::atoi(text.c_str() + epos + 1);
  auto dot = mantissa.find('.');
  int frac_digits = dot == std::string::npos
                        ? 0
                        : static_cast<int>(mantissa.size() - dot - 1);
  return std::pow(10.0, exp10 - frac_digits);
}

Value typo_value(const Value& v, RandomSource& rng) {
  if (const auto* s = std::get_if<std::string>(&v)) {
    return Value(*s + static_cast<char>('a' + rng.next_below(26)));
  }
  const double sign = rng.next_below(2) == 0 ? 1.0 : -1.0;
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    return Value(*i + static_cast<std::int64_t>(sign));
  }
  const double d = std::get<double>(v);
  return Value(d + sign * last_digit_unit(d));
}

struct ResolvedOperand {
  bool is_constant;
  TupleSide side;
  std::size_t position;
  std::string attribute;
  Value constant;
};

struct ResolvedPredicate {
  ResolvedOperand left;
  CompareOp op;
  ResolvedOperand right;
};

ResolvedOperand resolve_operand(const Operand& op, const Dataset& dataset) {
  ResolvedOperand out;
  out.is_constant = op.is_constant;
  out.side = op.side;
  out.position = 0;
  if (op.is_constant) {
    out.constant = op.constant;
    return out;
  }
  auto idx = dataset.attribute_index(op.attribute);
  if (!idx) throw EvalError("constraint references unknown attribute '" + op.attribute + "'");
  out.position = *idx;
  out.attribute = op.attribute;
  return out;
}

struct NumericRange {
  double lo = 0.0;
  double hi = 0.0;
  double span = 1.0;
};

NumericRange observed_range(const std::vector<Value>& domain) {
  NumericRange r;
  if (domain.empty()) return r;
  r.lo = as_double(domain.front());
  r.hi = as_double(domain.back());
  r.span = std::max(r.hi - r.lo, 1.0);
  return r;
}

Value coerce_to_kind(double v, AttrKind kind, CompareOp op, bool target_is_left) {
  if (kind == AttrKind::Real) return Value(v);
  // Direction-aware rounding keeps the forced predicate satisfied: a <= on the
  // mutated side rounds toward the allowed half-line.
  double rounded = v;
  if (op == CompareOp::Le) rounded = target_is_left ? std::floor(v) : std::ceil(v);
  if (op == CompareOp::Ge) rounded = target_is_left ? std::ceil(v) : std::floor(v);
  return Value(static_cast<std::int64_t>(rounded));
}

}  // namespace

std::pair<Dataset, InjectionLog> rnoise(const Dataset& dataset,
                                        std::span<const DenialConstraint> constraints,
                                        double alpha, RandomSource& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InputError("rnoise: alpha must lie in [0, 1]");

  std::vector<std::size_t> attr_positions;
  for (const auto& name : constraint_attributes(constraints)) {
    if (auto idx = dataset.attribute_index(name)) attr_positions.push_back(*idx);
  }
  std::sort(attr_positions.begin(), attr_positions.end());
  if (attr_positions.empty()) {
    throw InputError("rnoise: no constraint-relevant attributes in the dataset");
  }

  std::vector<std::vector<Value>> domains(attr_positions.size());
  for (std::size_t a = 0; a < attr_positions.size(); ++a) {
    domains[a] = active_domain(dataset, dataset.schema()[attr_positions[a]].name);
  }

  const std::size_t population = dataset.size() * attr_positions.size();
  const std::size_t count =
      static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(population)));

  InjectionLog log;
  log.cell_population = population;
  std::vector<std::vector<Value>> rows = dataset.rows();

  // Partial Fisher-Yates draw of `count` distinct cells.
  std::vector<std::size_t> cells(population);
  for (std::size_t i = 0; i < population; ++i) cells[i] = i;
  for (std::size_t k = 0; k < count && k < population; ++k) {
    std::size_t pick = k + static_cast<std::size_t>(rng.next_below(population - k));
    std::swap(cells[k], cells[pick]);

    const std::size_t row = cells[k] / attr_positions.size();
    const std::size_t a = cells[k] % attr_positions.size();
    const std::size_t pos = attr_positions[a];
    const Value old_value = rows[row][pos];

    Value new_value;
    bool use_domain = rng.next_unit() < 0.5;
    if (use_domain) {
      std::vector<const Value*> others;
      others.reserve(domains[a].size());
      for (const Value& v : domains[a]) {
        if (!value_eq(v, old_value)) others.push_back(&v);
      }
      if (!others.empty()) {
        new_value = *others[rng.next_below(others.size())];
      } else {
        new_value = typo_value(old_value, rng);
      }
    } else {
      new_value = typo_value(old_value, rng);
    }

    rows[row][pos] = new_value;
    log.records.push_back({dataset.ids()[row], dataset.schema()[pos].name, old_value, new_value,
                           "rnoise"});
  }

  return {Dataset(dataset.schema(), dataset.ids(), std::move(rows)), std::move(log)};
}

std::pair<Dataset, InjectionLog> conoise(const Dataset& dataset,
                                         std::span<const DenialConstraint> constraints,
                                         int iterations, RandomSource& rng) {
  if (constraints.empty()) throw InputError("conoise: constraint set is empty");
  if (iterations < 0) throw InputError("conoise: iterations must be >= 0");
  if (dataset.size() < 2 && iterations > 0) {
    throw InputError("conoise: need at least two tuples");
  }

  // Resolve and kind-check everything up front.
  std::vector<std::vector<ResolvedPredicate>> resolved(constraints.size());
  for (std::size_t c = 0; c < constraints.size(); ++c) {
    [[maybe_unused]] BoundConstraint check(constraints[c], dataset.schema());  // static validation
    for (const auto& p : constraints[c].predicates()) {
      resolved[c].push_back({resolve_operand(p.left, dataset), p.op,
                             resolve_operand(p.right, dataset)});
    }
  }

  std::unordered_map<std::size_t, std::vector<Value>> domains;
  std::unordered_map<std::size_t, NumericRange> ranges;
  for (const auto& preds : resolved) {
    for (const auto& p : preds) {
      for (const auto* op : {&p.left, &p.right}) {
        if (op->is_constant || domains.count(op->position)) continue;
        domains[op->position] = active_domain(dataset, dataset.schema()[op->position].name);
        if (dataset.schema()[op->position].kind != AttrKind::Categorical) {
          ranges[op->position] = observed_range(domains[op->position]);
        }
      }
    }
  }

  InjectionLog log;
  std::vector<std::vector<Value>> rows = dataset.rows();
  const std::size_t n = rows.size();

  auto operand_value = [&rows](const ResolvedOperand& op, std::size_t ti,
                               std::size_t tj) -> const Value& {
    if (op.is_constant) return op.constant;
    return op.side == TupleSide::T ? rows[ti][op.position] : rows[tj][op.position];
  };

  for (int iter = 0; iter < iterations; ++iter) {
    const std::size_t c = static_cast<std::size_t>(rng.next_below(constraints.size()));
    const std::size_t ti = static_cast<std::size_t>(rng.next_below(n));
    std::size_t tj = static_cast<std::size_t>(rng.next_below(n - 1));
    if (tj >= ti) ++tj;

    // Forcing one predicate can unsatisfy an earlier one when they share
    // attributes; sweep until the conjunction holds.
    bool all_hold = false;
    for (int pass = 0; pass < 16 && !all_hold; ++pass) {
      all_hold = true;
      for (const auto& p : resolved[c]) {
        if (compare_values(p.op, operand_value(p.left, ti, tj), operand_value(p.right, ti, tj))) {
          continue;
        }
        all_hold = false;

        // Pick the side to mutate among the non-constant operands.
        bool left_mutable = !p.left.is_constant;
        bool right_mutable = !p.right.is_constant;
        bool mutate_left = left_mutable && (!right_mutable || rng.next_below(2) == 0);
        const ResolvedOperand& target = mutate_left ? p.left : p.right;
        const Value other = mutate_left ? Value(operand_value(p.right, ti, tj))
                                        : Value(operand_value(p.left, ti, tj));

        const std::size_t target_row = target.side == TupleSide::T ? ti : tj;
        const std::size_t pos = target.position;
        const AttrKind kind = dataset.schema()[pos].kind;
        const Value old_value = rows[target_row][pos];
        Value new_value = old_value;

        if (p.op == CompareOp::Eq || p.op == CompareOp::Le || p.op == CompareOp::Ge) {
          if (kind == AttrKind::Categorical || kind_of(other) == AttrKind::Categorical ||
              (kind == AttrKind::Integer && std::holds_alternative<std::int64_t>(other))) {
            new_value = other;
          } else if (kind == AttrKind::Integer && p.op == CompareOp::Eq &&
                     std::holds_alternative<double>(other) &&
                     std::floor(as_double(other)) != as_double(other)) {
            // Exact equality with a non-integral value cannot be represented
            // in an integer attribute; mutate the opposite side instead.
            const ResolvedOperand& alt = mutate_left ? p.right : p.left;
            if (alt.is_constant) {
              throw EvalError("conoise: cannot force '" + constraints[c].source_text() + "'");
            }
            const std::size_t alt_row = alt.side == TupleSide::T ? ti : tj;
            Value alt_old = rows[alt_row][alt.position];
            Value alt_new = Value(as_double(old_value));
            rows[alt_row][alt.position] = alt_new;
            log.records.push_back({dataset.ids()[alt_row],
                                   dataset.schema()[alt.position].name, alt_old, alt_new,
                                   "conoise"});
            continue;
          } else {
            new_value = coerce_to_kind(as_double(other), kind, p.op, mutate_left);
          }
        } else {
          // {<, >, !=}: prefer an active-domain value satisfying the predicate.
          auto satisfies = [&](const Value& candidate) {
            return mutate_left ? compare_values(p.op, candidate, other)
                               : compare_values(p.op, other, candidate);
          };
          std::vector<const Value*> viable;
          for (const Value& v : domains[pos]) {
            if (satisfies(v)) viable.push_back(&v);
          }
          if (!viable.empty()) {
            new_value = *viable[rng.next_below(viable.size())];
          } else if (kind == AttrKind::Categorical) {
            // != with a single-value domain: a typo-style suffix always differs.
            new_value = Value(std::get<std::string>(other) +
                              static_cast<char>('a' + rng.next_below(26)));
          } else {
            const NumericRange range = ranges[pos];
            const double v = as_double(other);
            bool want_less = (p.op == CompareOp::Lt && mutate_left) ||
                             (p.op == CompareOp::Gt && !mutate_left);
            bool want_greater = (p.op == CompareOp::Gt && mutate_left) ||
                                (p.op == CompareOp::Lt && !mutate_left);
            double lo = range.lo - range.span;
            double hi = range.hi + range.span;
            if (want_less) {
              hi = v;
              lo = std::min(lo, v - range.span);
            } else if (want_greater) {
              lo = v;
              hi = std::max(hi, v + range.span);
            }
            if (kind == AttrKind::Integer) {
              std::int64_t ilo = static_cast<std::int64_t>(std::floor(lo));
              std::int64_t ihi = static_cast<std::int64_t>(std::ceil(hi));
              if (want_less) ihi = static_cast<std::int64_t>(std::ceil(v)) - 1;
              if (want_greater) ilo = static_cast<std::int64_t>(std::floor(v)) + 1;
              std::int64_t draw =
                  ilo + static_cast<std::int64_t>(rng.next_below(
                            static_cast<std::uint64_t>(std::max<std::int64_t>(1, ihi - ilo + 1))));
              if (p.op == CompareOp::Ne && static_cast<double>(draw) == v) ++draw;
              new_value = Value(draw);
            } else {
              double draw = lo + rng.next_unit() * (hi - lo);
              if (want_less && !(draw < v)) draw = std::nextafter(v, -1e308);
              if (want_greater && !(draw > v)) draw = std::nextafter(v, 1e308);
              if (p.op == CompareOp::Ne && draw == v) draw = v + range.span * 0.5;
              new_value = Value(draw);
            }
          }
        }

        rows[target_row][target.position] = new_value;
        log.records.push_back({dataset.ids()[target_row],
                               dataset.schema()[target.position].name, old_value, new_value,
                               "conoise"});
      }
    }
    if (!all_hold) {
      throw EvalError("conoise: could not force a violation of '" +
                      constraints[c].source_text() + "'");
    }
  }

  return {Dataset(dataset.schema(), dataset.ids(), std::move(rows)), std::move(log)};
}

Dataset replay(const InjectionLog& log, const Dataset& clean) {
  std::vector<std::vector<Value>> rows = clean.rows();
  for (const auto& record : log.records) {
    auto idx = clean.attribute_index(record.attribute);
    if (!idx) throw InputError("replay: unknown attribute '" + record.attribute + "'");
    auto it = std::lower_bound(clean.ids().begin(), clean.ids().end(), record.id);
    if (it == clean.ids().end() || *it != record.id) {
      throw InputError("replay: unknown tuple id " + std::to_string(record.id));
    }
    std::size_t row = static_cast<std::size_t>(it - clean.ids().begin());
    if (!value_eq(rows[row][*idx], record.old_value)) {
      throw InputError("replay: log does not match the base dataset at tuple " +
                       std::to_string(record.id) + ", attribute '" + record.attribute + "'");
    }
    rows[row][*idx] = record.new_value;
  }
  return Dataset(clean.schema(), clean.ids(), std::move(rows));
}

}  // namespace dpim
