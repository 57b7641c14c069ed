#include "dpim/dc.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dpim/error.hpp"

namespace dpim {

std::string to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Lt: return "<";
    case CompareOp::Gt: return ">";
    case CompareOp::Le: return "<=";
    case CompareOp::Ge: return ">=";
    case CompareOp::Eq: return "=";
    case CompareOp::Ne: return "!=";
  }
  return "?";
}

Operand Operand::tuple_ref(TupleSide side, std::string attribute) {
  Operand op;
  op.is_constant = false;
  op.side = side;
  op.attribute = std::move(attribute);
  return op;
}

Operand Operand::make_constant(Value v) {
  Operand op;
  op.is_constant = true;
  op.constant = std::move(v);
  return op;
}

DenialConstraint::DenialConstraint(std::vector<Predicate> predicates, std::string source_text)
    : predicates_(std::move(predicates)), source_text_(std::move(source_text)) {
  if (predicates_.empty()) throw InputError("denial constraint: empty conjunction");
  bool has_pair_predicate = false;
  for (const auto& p : predicates_) {
    bool refs_t = (!p.left.is_constant && p.left.side == TupleSide::T) ||
                  (!p.right.is_constant && p.right.side == TupleSide::T);
    bool refs_tp = (!p.left.is_constant && p.left.side == TupleSide::TPrime) ||
                   (!p.right.is_constant && p.right.side == TupleSide::TPrime);
    if (refs_t && refs_tp) has_pair_predicate = true;
  }
  if (!has_pair_predicate) {
    throw InputError("denial constraint '" + source_text_ +
                     "' is not a tuple-pair constraint (no predicate references both t and t')");
  }
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  DenialConstraint parse() {
    skip_ws();
    expect('!');
    skip_ws();
    expect('(');
    std::vector<Predicate> predicates;
    predicates.push_back(parse_predicate());
    skip_ws();
    while (!at_end() && peek() == '&') {
      ++pos_;
      predicates.push_back(parse_predicate());
      skip_ws();
    }
    expect(')');
    skip_ws();
    if (!at_end()) fail("trailing input after ')'");
    return DenialConstraint(std::move(predicates), std::string(text_));
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw InputError("constraint syntax error at byte " + std::to_string(pos_) + ": " + message +
                     " in '" + std::string(text_) + "'");
  }

  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  void expect(char c) {
    if (at_end() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Predicate parse_predicate() {
    Predicate p;
    p.left = parse_operand();
    p.op = parse_op();
    p.right = parse_operand();
    if (p.left.is_constant && p.right.is_constant) {
      fail("comparison between two constants");
    }
    return p;
  }

  CompareOp parse_op() {
    skip_ws();
    if (at_end()) fail("expected comparison operator");
    char c = peek();
    ++pos_;
    switch (c) {
      case '<':
        if (!at_end() && peek() == '=') { ++pos_; return CompareOp::Le; }
        return CompareOp::Lt;
      case '>':
        if (!at_end() && peek() == '=') { ++pos_; return CompareOp::Ge; }
        return CompareOp::Gt;
      case '=':
        return CompareOp::Eq;
      case '!':
        if (!at_end() && peek() == '=') { ++pos_; return CompareOp::Ne; }
        fail("unknown operator '!'");
      default:
        --pos_;
        fail(std::string("unknown operator '") + c + "'");
    }
  }

  Operand parse_operand() {
    skip_ws();
    if (at_end()) fail("expected operand");
    char c = peek();
    if (c == '"') return parse_string_constant();
    if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
      return parse_number_constant();
    }
    if (c == 't') return parse_tuple_ref();
    fail("expected tuple reference or constant");
  }

  Operand parse_string_constant() {
    ++pos_;  // opening quote
    std::string out;
    while (true) {
      if (at_end()) fail("unterminated string constant");
      char c = text_[pos_++];
      if (c == '"') {
        if (!at_end() && peek() == '"') {  // escaped quote
          out.push_back('"');
          ++pos_;
          continue;
        }
        break;
      }
      out.push_back(c);
    }
    return Operand::make_constant(Value(std::move(out)));
  }

  Operand parse_number_constant() {
    std::size_t start = pos_;
    if (peek() == '-' || peek() == '+') ++pos_;
    bool is_real = false;
    while (!at_end()) {
      char c = peek();
      if (std::isdigit(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '.' || c == 'e' || c == 'E') {
        is_real = true;
        ++pos_;
        if (!at_end() && (peek() == '-' || peek() == '+') && (c == 'e' || c == 'E')) ++pos_;
      } else {
        break;
      }
    }
    std::string token(text_.substr(start, pos_ - start));
    if (!is_real) {
      std::int64_t iv = 0;
      const char* first = token.c_str();
      if (*first == '+') ++first;
      auto res = std::from_chars(first, token.c_str() + token.size(), iv);
      if (res.ec == std::errc{} && res.ptr == token.c_str() + token.size()) {
        return Operand::make_constant(Value(iv));
      }
    }
    errno = 0;
    char* end = nullptr;
    double dv = std::strtod(token.c_str(), &end);
    if (errno != 0 || end != token.c_str() + token.size()) {
      pos_ = start;
      fail("malformed numeric constant '" + token + "'");
    }
    return Operand::make_constant(Value(dv));
  }

  Operand parse_tuple_ref() {
    ++pos_;  // 't'
    TupleSide side = TupleSide::T;
    if (!at_end() && peek() == '\'') {
      side = TupleSide::TPrime;
      ++pos_;
    }
    if (at_end() || peek() != '.') fail("expected '.' after tuple variable");
    ++pos_;
    std::size_t start = pos_;
    while (!at_end()) {
      char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        ++pos_;
      } else {
        break;
      }
    }
    if (pos_ == start) fail("expected attribute name");
    return Operand::tuple_ref(side, std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string format_operand(const Operand& op) {
  if (!op.is_constant) {
    return (op.side == TupleSide::T ? "t." : "t'.") + op.attribute;
  }
  if (const auto* s = std::get_if<std::string>(&op.constant)) {
    std::string out = "\"";
    for (char c : *s) {
      if (c == '"') out.push_back('"');
      out.push_back(c);
    }
    out.push_back('"');
    return out;
  }
  return format_value(op.constant);
}

}  // namespace

DenialConstraint parse_dc(std::string_view text) { return Parser(text).parse(); }

std::vector<DenialConstraint> parse_dc_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open constraint file " + path.string());
  std::vector<DenialConstraint> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string_view view = line;
    auto first = view.find_first_not_of(" \t");
    if (first == std::string_view::npos) continue;
    if (view[first] == '#') continue;
    try {
      out.push_back(parse_dc(view));
    } catch (const InputError& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string format_dc(const DenialConstraint& dc) {
  std::string out = "!(";
  const auto& preds = dc.predicates();
  for (std::size_t i = 0; i < preds.size(); ++i) {
    if (i) out += " & ";
    out += format_operand(preds[i].left);
    out += " " + to_string(preds[i].op) + " ";
    out += format_operand(preds[i].right);
  }
  out += ")";
  return out;
}

std::optional<FdForm> classify_fd(const DenialConstraint& dc) {
  std::set<std::string> lhs;
  std::optional<std::string> rhs;
  for (const auto& p : dc.predicates()) {
    if (p.left.is_constant || p.right.is_constant) return std::nullopt;
    if (p.left.attribute != p.right.attribute) return std::nullopt;
    if (p.left.side == p.right.side) return std::nullopt;
    if (p.op == CompareOp::Eq) {
      if (!lhs.insert(p.left.attribute).second) return std::nullopt;  // duplicate
    } else if (p.op == CompareOp::Ne) {
      if (rhs.has_value()) return std::nullopt;  // more than one inequality
      rhs = p.left.attribute;
    } else {
      return std::nullopt;
    }
  }
  if (!rhs.has_value()) return std::nullopt;
  if (lhs.count(*rhs)) return std::nullopt;  // contradictory pattern
  FdForm fd;
  fd.lhs.assign(lhs.begin(), lhs.end());
  fd.rhs = *rhs;
  return fd;
}

BoundConstraint::BoundConstraint(const DenialConstraint& dc,
                                 const std::vector<AttributeSchema>& schema)
    : source_text_(dc.source_text()) {
  auto bind_operand = [&schema, this](const Operand& op) -> BoundOperand {
    BoundOperand bound;
    bound.is_constant = op.is_constant;
    bound.side = op.side;
    bound.position = 0;
    if (op.is_constant) {
      bound.constant = op.constant;
      return bound;
    }
    for (std::size_t i = 0; i < schema.size(); ++i) {
      if (schema[i].name == op.attribute) {
        bound.position = i;
        return bound;
      }
    }
    throw EvalError("constraint '" + source_text_ + "': unknown attribute '" + op.attribute + "'");
  };
  auto operand_kind = [&schema](const BoundOperand& op) {
    return op.is_constant ? kind_of(op.constant) : schema[op.position].kind;
  };

  for (const auto& p : dc.predicates()) {
    BoundPredicate bp;
    bp.left = bind_operand(p.left);
    bp.op = p.op;
    bp.right = bind_operand(p.right);

    AttrKind lk = operand_kind(bp.left);
    AttrKind rk = operand_kind(bp.right);
    bool left_cat = lk == AttrKind::Categorical;
    bool right_cat = rk == AttrKind::Categorical;
    if (left_cat != right_cat) {
      throw EvalError("constraint '" + source_text_ +
                      "': numeric operand compared against categorical operand");
    }
    bool order_op = p.op == CompareOp::Lt || p.op == CompareOp::Gt || p.op == CompareOp::Le ||
                    p.op == CompareOp::Ge;
    if (order_op && left_cat) {
      throw EvalError("constraint '" + source_text_ +
                      "': order comparison on categorical operands");
    }

    if (bp.op == CompareOp::Eq && !bp.left.is_constant && !bp.right.is_constant &&
        bp.left.position == bp.right.position && bp.left.side != bp.right.side) {
      blocking_positions_.push_back(bp.left.position);
    }
    predicates_.push_back(std::move(bp));
  }
  std::sort(blocking_positions_.begin(), blocking_positions_.end());
  blocking_positions_.erase(std::unique(blocking_positions_.begin(), blocking_positions_.end()),
                            blocking_positions_.end());
}

bool compare_values(CompareOp op, const Value& lhs, const Value& rhs) {
  switch (op) {
    case CompareOp::Eq: return value_eq(lhs, rhs);
    case CompareOp::Ne: return !value_eq(lhs, rhs);
    case CompareOp::Lt: return value_less(lhs, rhs);
    case CompareOp::Gt: return value_less(rhs, lhs);
    case CompareOp::Le: return !value_less(rhs, lhs);
    case CompareOp::Ge: return !value_less(lhs, rhs);
  }
  return false;
}

bool BoundConstraint::holds_ordered(std::span<const Value> t_row,
                                    std::span<const Value> tp_row) const {
  auto fetch = [&](const BoundOperand& op) -> const Value& {
    if (op.is_constant) return op.constant;
    return op.side == TupleSide::T ? t_row[op.position] : tp_row[op.position];
  };
  for (const auto& p : predicates_) {
    if (!compare_values(p.op, fetch(p.left), fetch(p.right))) return false;
  }
  return true;
}

bool violates(const DenialConstraint& dc, const std::vector<AttributeSchema>& schema,
              std::span<const Value> a, std::span<const Value> b) {
  return BoundConstraint(dc, schema).violates(a, b);
}

std::vector<std::string> constraint_attributes(std::span<const DenialConstraint> constraints) {
  std::set<std::string> names;
  for (const auto& dc : constraints) {
    for (const auto& p : dc.predicates()) {
      if (!p.left.is_constant) names.insert(p.left.attribute);
      if (!p.right.is_constant) names.insert(p.right.attribute);
    }
  }
  return {names.begin(), names.end()};
}

}  // namespace dpim
