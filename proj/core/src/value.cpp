#include "dpim/value.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <functional>
#include <stdexcept>

namespace dpim {

std::string to_string(AttrKind kind) {
  switch (kind) {
    case AttrKind::Categorical: return "categorical-string";
    case AttrKind::Integer: return "integer";
    case AttrKind::Real: return "real";
  }
  return "unknown";
}

AttrKind kind_of(const Value& v) {
  if (std::holds_alternative<std::int64_t>(v)) return AttrKind::Integer;
  if (std::holds_alternative<double>(v)) return AttrKind::Real;
  return AttrKind::Categorical;
}

bool is_numeric(const Value& v) { return !std::holds_alternative<std::string>(v); }

double as_double(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

bool value_eq(const Value& a, const Value& b) {
  if (std::holds_alternative<std::string>(a) || std::holds_alternative<std::string>(b)) {
    const auto* sa = std::get_if<std::string>(&a);
    const auto* sb = std::get_if<std::string>(&b);
    return sa != nullptr && sb != nullptr && *sa == *sb;
  }
  if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
    return std::get<std::int64_t>(a) == std::get<std::int64_t>(b);
  }
  return as_double(a) == as_double(b);
}

bool value_less(const Value& a, const Value& b) {
  if (std::holds_alternative<std::string>(a) && std::holds_alternative<std::string>(b)) {
    return std::get<std::string>(a) < std::get<std::string>(b);
  }
  if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
    return std::get<std::int64_t>(a) < std::get<std::int64_t>(b);
  }
  if (is_numeric(a) && is_numeric(b)) return as_double(a) < as_double(b);
  throw std::invalid_argument("value_less: cannot order categorical against numeric");
}

std::string format_value(const Value& v) {
  char buf[64];
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    auto res = std::to_chars(buf, buf + sizeof buf, *i);
    return std::string(buf, res.ptr);
  }
  if (const auto* d = std::get_if<double>(&v)) {
    auto res = std::to_chars(buf, buf + sizeof buf, *d);
    std::string text(buf, res.ptr);
    // Keep real-kind values recognizably real across CSV round trips.
    if (text.find_first_of(".eEin") == std::string::npos) text += ".0";
    return text;
  }
  return std::get<std::string>(v);
}

std::size_t hash_value(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) {
    return std::hash<std::int64_t>{}(*i) ^ 0x9e3779b97f4a7c15ull;
  }
  if (const auto* d = std::get_if<double>(&v)) {
    // Hash the bit pattern; exact IEEE comparison means exact-bit hashing is
    // consistent except -0.0/0.0, which we normalize.
    double x = (*d == 0.0) ? 0.0 : *d;
    return std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(x)) ^ 0x517cc1b727220a95ull;
  }
  return std::hash<std::string>{}(std::get<std::string>(v));
}

std::size_t ValueVecHash::operator()(const std::vector<Value>& vs) const {
  std::size_t h = 1469598103934665603ull;
  for (const auto& v : vs) {
    h ^= hash_value(v);
    h *= 1099511628211ull;
  }
  return h;
}

bool ValueVecEq::operator()(const std::vector<Value>& a, const std::vector<Value>& b) const {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!value_eq(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace dpim
