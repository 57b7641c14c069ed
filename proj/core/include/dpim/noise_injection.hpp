#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dpim/dataset.hpp"
#include "dpim/dc.hpp"
#include "dpim/dp.hpp"

namespace dpim {

// One cell mutation. Replaying all records against the clean dataset
// reproduces the noisy dataset exactly.
struct InjectionRecord {
  TupleId id = 0;
  std::string attribute;
  Value old_value;
  Value new_value;
  std::string generator;  // "rnoise" or "conoise"
};

struct InjectionLog {
  std::vector<InjectionRecord> records;
  // Cell population the rnoise fraction was taken over:
  // rows x constraint-relevant attributes.
  std::size_t cell_population = 0;
};

// Random-cell violation generator. Picks ceil(alpha * n * |constraint
// attributes|) distinct cells among columns referenced by some constraint;
// each becomes a different active-domain value with probability 0.5, else a
// typo (appended lowercase letter for categorical values, +/-1 unit in the
// last significant digit for numeric values).
std::pair<Dataset, InjectionLog> rnoise(const Dataset& dataset,
                                        std::span<const DenialConstraint> constraints,
                                        double alpha, RandomSource& rng);

// Constraint-oriented violation generator. Per iteration: pick a uniform
// constraint and an ordered pair of distinct tuples, then force every
// predicate to hold on that pair: {=,<=,>=} copy the other side's value,
// {<,>,!=} pick a satisfying active-domain value, falling back to a uniform
// draw from the widened numeric range. Each iteration leaves the selected
// pair in violation of the selected constraint.
std::pair<Dataset, InjectionLog> conoise(const Dataset& dataset,
                                         std::span<const DenialConstraint> constraints,
                                         int iterations, RandomSource& rng);

Dataset replay(const InjectionLog& log, const Dataset& clean);

}  // namespace dpim
