#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sqlpbe/csv.hpp"
#include "sqlpbe/errors.hpp"
#include "sqlpbe/table.hpp"

namespace sqlpbe {

class MissingTable : public Error {
 public:
  using Error::Error;
};

class EmptyOutput : public Error {
 public:
  using Error::Error;
};

struct ForeignKey {
  std::string from_table;
  std::string from_column;
  std::string to_table;
  std::string to_column;
  friend bool operator==(const ForeignKey&, const ForeignKey&) = default;
};

struct Instance {
  std::string id;
  Database inputs;
  Table output;
  std::vector<Value> constants;
  std::vector<AggregateFn> aggregators;
  std::vector<std::string> comparison_columns;
  std::vector<ForeignKey> foreign_keys;
  /// Keys are "column" or "table.column".
  std::map<std::string, ValueType> declared_types;
  /// Reference query, when the benchmark ships one.
  std::optional<std::string> ground_truth;
  /// Known candidate queries (SQL), to disambiguate without synthesizing.
  std::vector<std::string> candidates;
};

/// Precedence Integer > Real > DateTime > Boolean > Text over the non-empty
/// cells; Text when every cell is empty.
ValueType infer_type(const std::vector<std::string>& cells);

bool is_iso_datetime(std::string_view s);

/// Parses one cell as the given type; throws ParseError when it does not fit.
Value parse_value(std::string_view text, ValueType type);

/// Tags a bare literal with the inferred type of a one-cell column.
Value parse_constant(std::string_view text);

/// Builds a typed table from CSV records (first record is the header).
/// `type_of` returns a declared type for a column name, if any.
Table table_from_csv(const std::vector<CsvRecord>& records,
                     const std::function<std::optional<ValueType>(const std::string&)>& type_of = {});

Instance load_instance(const std::filesystem::path& manifest_path);

/// Same as load_instance for an already parsed manifest; relative table
/// paths resolve against `base_dir`. Tables may also be given inline as
/// {"name", "columns": [...], "rows": [[...], ...]}.
Instance instance_from_json(const nlohmann::json& manifest, const std::filesystem::path& base_dir);

nlohmann::json table_to_json(const Table& t);

}  // namespace sqlpbe
