#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dpim/value.hpp"

namespace dpim {

// Stable tuple identifier. Assigned as 0-based ingestion row order and never
// renamed afterwards: deleting a tuple leaves every other id unchanged.
using TupleId = std::uint64_t;

struct AttributeSchema {
  std::string name;
  AttrKind kind = AttrKind::Categorical;
  std::size_t position = 0;
};

// Immutable single-relation instance. Tuples are addressed by TupleId; ids are
// kept sorted ascending and rows are stored in parallel.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::vector<AttributeSchema> schema, std::vector<TupleId> ids,
          std::vector<std::vector<Value>> rows);

  // Builds a dataset with ids 0..rows.size()-1.
  static Dataset from_rows(std::vector<AttributeSchema> schema,
                           std::vector<std::vector<Value>> rows);

  std::size_t size() const { return ids_.size(); }
  const std::vector<AttributeSchema>& schema() const { return schema_; }
  const std::vector<TupleId>& ids() const { return ids_; }
  const std::vector<std::vector<Value>>& rows() const { return rows_; }

  bool contains(TupleId id) const;
  const std::vector<Value>& row(TupleId id) const;
  std::optional<std::size_t> attribute_index(std::string_view name) const;

  bool operator==(const Dataset& other) const;

 private:
  std::vector<AttributeSchema> schema_;
  std::vector<TupleId> ids_;                 // sorted ascending
  std::vector<std::vector<Value>> rows_;     // parallel to ids_
};

// Loads an RFC-4180 CSV with a header row. When no schema is given, column
// kinds are inferred over all rows in the order integer -> real -> categorical.
Dataset load_csv(const std::filesystem::path& path,
                 std::optional<std::vector<AttributeSchema>> schema = std::nullopt);

void save_csv(const Dataset& dataset, const std::filesystem::path& path);

// Sidecar schema file: one `name:kind` pair per line, kind in
// {categorical-string, integer, real} (plus the aliases string/int/float/double).
std::vector<AttributeSchema> load_schema_file(const std::filesystem::path& path);

// Distinct values appearing under attr, sorted (numeric order for numeric
// kinds, lexicographic for categorical).
std::vector<Value> active_domain(const Dataset& dataset, std::string_view attr);

// Neighboring dataset: same tuples minus id. All other ids and rows unchanged.
Dataset remove_tuple(const Dataset& dataset, TupleId id);

}  // namespace dpim
