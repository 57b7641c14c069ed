#include "dpim/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "dpim/error.hpp"

namespace dpim {

namespace {

void check_schema(const std::vector<AttributeSchema>& schema) {
  std::unordered_set<std::string> seen;
  for (const auto& attr : schema) {
    if (!seen.insert(attr.name).second) {
      throw InputError("duplicate attribute name '" + attr.name + "' in schema");
    }
  }
}

bool parse_int(const std::string& text, std::int64_t& out) {
  if (text.empty()) return false;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  auto res = std::from_chars(first, last, out);
  return res.ec == std::errc{} && res.ptr == last;
}

bool parse_real(const std::string& text, double& out) {
  if (text.empty()) return false;
  // strtod accepts leading whitespace and hex floats; reject both to keep
  // inference strict.
  if (std::isspace(static_cast<unsigned char>(text.front()))) return false;
  if (text.find('x') != std::string::npos || text.find('X') != std::string::npos) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size();
}

// One CSV record, RFC-4180 quoting. Returns false at end of input.
// line_no tracks the physical line the record started on.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no,
                 std::size_t& next_line) {
  fields.clear();
  int c = in.get();
  if (c == EOF) return false;
  line_no = next_line;
  std::string field;
  bool quoted = false;
  for (;;) {
    if (c == EOF) {
      fields.push_back(std::move(field));
      return true;
    }
    char ch = static_cast<char>(c);
    if (quoted) {
      if (ch == '"') {
        int peek = in.peek();
        if (peek == '"') {
          field.push_back('"');
          in.get();
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++next_line;
        field.push_back(ch);
      }
    } else if (ch == '"' && field.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get();
      ++next_line;
      fields.push_back(std::move(field));
      return true;
    } else if (ch == '\n') {
      ++next_line;
      fields.push_back(std::move(field));
      return true;
    } else {
      field.push_back(ch);
    }
    c = in.get();
  }
}

AttrKind parse_kind_token(const std::string& token, const std::filesystem::path& path) {
  if (token == "categorical-string" || token == "categorical" || token == "string") {
    return AttrKind::Categorical;
  }
  if (token == "integer" || token == "int") return AttrKind::Integer;
  if (token == "real" || token == "float" || token == "double") return AttrKind::Real;
  throw InputError("unknown kind '" + token + "' in schema file " + path.string());
}

}  // namespace

Dataset::Dataset(std::vector<AttributeSchema> schema, std::vector<TupleId> ids,
                 std::vector<std::vector<Value>> rows)
    : schema_(std::move(schema)), ids_(std::move(ids)), rows_(std::move(rows)) {
  check_schema(schema_);
  if (ids_.size() != rows_.size()) throw InputError("dataset: ids/rows size mismatch");
  if (!std::is_sorted(ids_.begin(), ids_.end()) ||
      std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
    throw InputError("dataset: tuple ids must be strictly increasing");
  }
  for (const auto& row : rows_) {
    if (row.size() != schema_.size()) throw InputError("dataset: row arity mismatch");
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (kind_of(row[i]) != schema_[i].kind) {
        throw InputError("dataset: value under '" + schema_[i].name +
                         "' does not match declared kind " + to_string(schema_[i].kind));
      }
    }
  }
}

Dataset Dataset::from_rows(std::vector<AttributeSchema> schema,
                           std::vector<std::vector<Value>> rows) {
  std::vector<TupleId> ids(rows.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<TupleId>(i);
  return Dataset(std::move(schema), std::move(ids), std::move(rows));
}

bool Dataset::contains(TupleId id) const {
  return std::binary_search(ids_.begin(), ids_.end(), id);
}

const std::vector<Value>& Dataset::row(TupleId id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
  if (it == ids_.end() || *it != id) {
    throw InputError("unknown tuple id " + std::to_string(id));
  }
  return rows_[static_cast<std::size_t>(it - ids_.begin())];
}

std::optional<std::size_t> Dataset::attribute_index(std::string_view name) const {
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].name == name) return i;
  }
  return std::nullopt;
}

bool Dataset::operator==(const Dataset& other) const {
  if (ids_ != other.ids_) return false;
  if (schema_.size() != other.schema_.size()) return false;
  for (std::size_t i = 0; i < schema_.size(); ++i) {
    if (schema_[i].name != other.schema_[i].name || schema_[i].kind != other.schema_[i].kind) {
      return false;
    }
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (!ValueVecEq{}(rows_[r], other.rows_[r])) return false;
  }
  return true;
}

Dataset load_csv(const std::filesystem::path& path,
                 std::optional<std::vector<AttributeSchema>> schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open CSV file " + path.string());

  std::vector<std::string> fields;
  std::size_t line_no = 1;
  std::size_t next_line = 1;
  if (!read_record(in, fields, line_no, next_line)) {
    throw InputError("CSV file " + path.string() + " is empty (header row required)");
  }
  const std::vector<std::string> header = fields;

  std::vector<std::vector<std::string>> raw_rows;
  std::vector<std::size_t> row_lines;
  while (read_record(in, fields, line_no, next_line)) {
    if (fields.size() == 1 && fields[0].empty()) continue;  // trailing blank line
    if (fields.size() != header.size()) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": row has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    raw_rows.push_back(fields);
    row_lines.push_back(line_no);
  }

  std::vector<AttributeSchema> attrs;
  if (schema.has_value()) {
    attrs = *schema;
    if (attrs.size() != header.size()) {
      throw InputError("schema has " + std::to_string(attrs.size()) + " attributes but CSV header has " +
                       std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < attrs.size(); ++i) attrs[i].position = i;
  } else {
    attrs.resize(header.size());
    for (std::size_t col = 0; col < header.size(); ++col) {
      attrs[col].name = header[col];
      attrs[col].position = col;
      bool all_int = !raw_rows.empty();
      bool all_real = !raw_rows.empty();
      for (const auto& row : raw_rows) {
        std::int64_t iv;
        double dv;
        if (all_int && !parse_int(row[col], iv)) all_int = false;
        if (all_real && !parse_real(row[col], dv)) all_real = false;
        if (!all_int && !all_real) break;
      }
      attrs[col].kind = all_int ? AttrKind::Integer
                                : (all_real ? AttrKind::Real : AttrKind::Categorical);
    }
  }

  std::vector<std::vector<Value>> rows;
  rows.reserve(raw_rows.size());
  for (std::size_t r = 0; r < raw_rows.size(); ++r) {
    std::vector<Value> row;
    row.reserve(attrs.size());
    for (std::size_t col = 0; col < attrs.size(); ++col) {
      const std::string& text = raw_rows[r][col];
      switch (attrs[col].kind) {
        case AttrKind::Integer: {
          std::int64_t iv;
          if (!parse_int(text, iv)) {
            throw InputError(path.string() + ":" + std::to_string(row_lines[r]) + ": '" + text +
                             "' is not an integer (attribute '" + attrs[col].name + "')");
          }
          row.emplace_back(iv);
          break;
        }
        case AttrKind::Real: {
          double dv;
          if (!parse_real(text, dv)) {
            throw InputError(path.string() + ":" + std::to_string(row_lines[r]) + ": '" + text +
                             "' is not a real number (attribute '" + attrs[col].name + "')");
          }
          row.emplace_back(dv);
          break;
        }
        case AttrKind::Categorical:
          row.emplace_back(text);
          break;
      }
    }
    rows.push_back(std::move(row));
  }

  return Dataset::from_rows(std::move(attrs), std::move(rows));
}

void save_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path.string() + " for writing");
  auto write_field = [&out](const std::string& text) {
    bool needs_quotes = text.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) {
      out << text;
      return;
    }
    out << '"';
    for (char c : text) {
      if (c == '"') out << '"';
      out << c;
    }
    out << '"';
  };
  const auto& schema = dataset.schema();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (i) out << ',';
    write_field(schema[i].name);
  }
  out << '\n';
  for (const auto& row : dataset.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      write_field(format_value(row[i]));
    }
    out << '\n';
  }
}

std::vector<AttributeSchema> load_schema_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open schema file " + path.string());
  std::vector<AttributeSchema> attrs;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    if (trimmed.empty() || trimmed[0] == '#') continue;
    auto colon = trimmed.find(':');
    if (colon == std::string::npos) {
      throw InputError("schema file " + path.string() + ": expected `name:kind`, got '" + line + "'");
    }
    std::string name = trimmed.substr(0, colon);
    std::string kind = trimmed.substr(colon + 1);
    auto strip = [](std::string& s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
    };
    strip(name);
    strip(kind);
    AttributeSchema attr;
    attr.name = name;
    attr.kind = parse_kind_token(kind, path);
    attr.position = attrs.size();
    attrs.push_back(std::move(attr));
  }
  return attrs;
}

std::vector<Value> active_domain(const Dataset& dataset, std::string_view attr) {
  auto idx = dataset.attribute_index(attr);
  if (!idx) throw InputError("unknown attribute '" + std::string(attr) + "'");
  std::vector<Value> values;
  values.reserve(dataset.size());
  for (const auto& row : dataset.rows()) values.push_back(row[*idx]);
  std::sort(values.begin(), values.end(), value_less);
  values.erase(std::unique(values.begin(), values.end(), value_eq), values.end());
  return values;
}

Dataset remove_tuple(const Dataset& dataset, TupleId id) {
  if (!dataset.contains(id)) {
    throw InputError("remove_tuple: unknown tuple id " + std::to_string(id));
  }
  std::vector<TupleId> ids;
  std::vector<std::vector<Value>> rows;
  ids.reserve(dataset.size() - 1);
  rows.reserve(dataset.size() - 1);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (dataset.ids()[i] == id) continue;
    ids.push_back(dataset.ids()[i]);
    rows.push_back(dataset.rows()[i]);
  }
  return Dataset(dataset.schema(), std::move(ids), std::move(rows));
}

}  // namespace dpim
