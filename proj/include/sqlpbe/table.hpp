#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqlpbe/value.hpp"

namespace sqlpbe {

struct Column {
  std::string name;
  ValueType type = ValueType::Text;
  friend bool operator==(const Column&, const Column&) = default;
};

class Schema {
 public:
  Schema() = default;
  explicit Schema(std::vector<Column> columns);

  std::size_t size() const { return columns_.size(); }
  bool empty() const { return columns_.empty(); }
  const Column& operator[](std::size_t i) const { return columns_[i]; }
  const std::vector<Column>& columns() const { return columns_; }
  auto begin() const { return columns_.begin(); }
  auto end() const { return columns_.end(); }

  std::optional<std::size_t> index_of(std::string_view name) const;
  bool contains(std::string_view name) const { return index_of(name).has_value(); }
  std::vector<std::string> names() const;

  /// Throws SchemaError on duplicate or empty names.
  void add(Column c);

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Column> columns_;
};

using Row = std::vector<Value>;

/// A multiset of rows. Row order is the insertion order of whatever produced
/// the table; comparisons ignore it, window functions do not.
struct Table {
  Schema schema;
  std::vector<Row> rows;

  std::size_t row_count() const { return rows.size(); }
  std::size_t column_count() const { return schema.size(); }

  /// Checks row arity and that every cell is Null or of its column's type.
  void validate() const;

  /// Plain-text grid, columns separated by " | ".
  std::string render() const;
};

using TablePtr = std::shared_ptr<const Table>;

struct NamedTable {
  std::string name;
  TablePtr table;
};

/// Ordered collection of named input tables.
using Database = std::vector<NamedTable>;

const Table* find_table(const Database& db, std::string_view name);

enum class AggregateFn : std::uint8_t {
  n,
  n_distinct,
  sum,
  mean,
  min,
  max,
  str_count,
  cumsum,
  pmin,
  pmax,
  mode,
  lead,
  lag,
  median,
  rank,
  row_number,
};

inline constexpr std::size_t kAggregateCount = 16;

std::string_view aggregate_name(AggregateFn fn);

/// Resolves a user-facing aggregator name; aliases expand (`count` yields n and
/// n_distinct, `avg` yields mean). Empty result for unknown names.
std::vector<AggregateFn> parse_aggregate(std::string_view name);

/// Row-preserving functions; all others reduce a group to one value.
bool is_window(AggregateFn fn);

/// n() and row_number() take no input column.
bool takes_column(AggregateFn fn);

/// Result type for an input column type, or nullopt when the function does
/// not apply to that type. For column-less functions the argument is ignored.
std::optional<ValueType> aggregate_result_type(AggregateFn fn, ValueType input);

}  // namespace sqlpbe
