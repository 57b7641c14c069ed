#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace dpim {

enum class AttrKind { Categorical, Integer, Real };

std::string to_string(AttrKind kind);

// A cell value. The alternative in use always matches the attribute's declared
// kind: Integer -> int64_t, Real -> double, Categorical -> std::string.
using Value = std::variant<std::int64_t, double, std::string>;

AttrKind kind_of(const Value& v);

bool is_numeric(const Value& v);

// Numeric view; only valid when is_numeric(v).
double as_double(const Value& v);

// Exact comparison used everywhere DC semantics need determinism:
// categorical by byte equality / lexicographic order, integer pairs exactly,
// any pair involving a double as IEEE doubles.
bool value_eq(const Value& a, const Value& b);
bool value_less(const Value& a, const Value& b);

// Shortest round-trip text (to_chars for numbers, identity for strings).
std::string format_value(const Value& v);

std::size_t hash_value(const Value& v);

struct ValueVecHash {
  std::size_t operator()(const std::vector<Value>& vs) const;
};

struct ValueVecEq {
  bool operator()(const std::vector<Value>& a, const std::vector<Value>& b) const;
};

}  // namespace dpim
