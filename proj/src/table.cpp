#include "sqlpbe/table.hpp"

#include <algorithm>
#include <sstream>

#include "sqlpbe/errors.hpp"

namespace sqlpbe {

std::string to_string(EngineErrorKind kind) {
  switch (kind) {
    case EngineErrorKind::UnknownColumn: return "UnknownColumn";
    case EngineErrorKind::ColumnConflict: return "ColumnConflict";
    case EngineErrorKind::TypeMismatch: return "TypeMismatch";
    case EngineErrorKind::NonUnionCompatible: return "NonUnionCompatible";
    case EngineErrorKind::ArityError: return "ArityError";
    case EngineErrorKind::Overflow: return "Overflow";
    case EngineErrorKind::UnknownTable: return "UnknownTable";
  }
  return "EngineError";
}

Schema::Schema(std::vector<Column> columns) {
  for (auto& c : columns) add(std::move(c));
}

std::optional<std::size_t> Schema::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name);
  return out;
}

void Schema::add(Column c) {
  if (c.name.empty()) throw SchemaError("empty column name");
  if (contains(c.name)) throw SchemaError("duplicate column name '" + c.name + "'");
  columns_.push_back(std::move(c));
}

void Table::validate() const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != schema.size()) {
      throw SchemaError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                        " cells, schema has " + std::to_string(schema.size()));
    }
    for (std::size_t c = 0; c < schema.size(); ++c) {
      const Value& v = rows[r][c];
      if (!v.is_null() && v.type() != schema[c].type) {
        throw SchemaError("cell (" + std::to_string(r) + ", " + schema[c].name + ") is " +
                          std::string(type_name(v.type())) + ", column is " +
                          std::string(type_name(schema[c].type)));
      }
    }
  }
}

std::string Table::render() const {
  std::vector<std::size_t> width(schema.size());
  for (std::size_t c = 0; c < schema.size(); ++c) width[c] = schema[c].name.size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) {
      width[c] = std::max(width[c], row[c].to_string().size());
    }
  }
  std::ostringstream out;
  auto emit = [&](auto&& cell_of) {
    for (std::size_t c = 0; c < schema.size(); ++c) {
      std::string s = cell_of(c);
      out << (c ? " | " : "") << s << std::string(width[c] - std::min(width[c], s.size()), ' ');
    }
    out << '\n';
  };
  emit([&](std::size_t c) { return schema[c].name; });
  for (std::size_t c = 0; c < schema.size(); ++c) {
    out << (c ? "-+-" : "") << std::string(width[c], '-');
  }
  out << '\n';
  for (const auto& row : rows) {
    emit([&](std::size_t c) { return row[c].is_null() ? std::string("NULL") : row[c].to_string(); });
  }
  return out.str();
}

const Table* find_table(const Database& db, std::string_view name) {
  for (const auto& t : db) {
    if (t.name == name) return t.table.get();
  }
  return nullptr;
}

std::string_view aggregate_name(AggregateFn fn) {
  switch (fn) {
    case AggregateFn::n: return "n";
    case AggregateFn::n_distinct: return "n_distinct";
    case AggregateFn::sum: return "sum";
    case AggregateFn::mean: return "mean";
    case AggregateFn::min: return "min";
    case AggregateFn::max: return "max";
    case AggregateFn::str_count: return "str_count";
    case AggregateFn::cumsum: return "cumsum";
    case AggregateFn::pmin: return "pmin";
    case AggregateFn::pmax: return "pmax";
    case AggregateFn::mode: return "mode";
    case AggregateFn::lead: return "lead";
    case AggregateFn::lag: return "lag";
    case AggregateFn::median: return "median";
    case AggregateFn::rank: return "rank";
    case AggregateFn::row_number: return "row_number";
  }
  return "?";
}

std::vector<AggregateFn> parse_aggregate(std::string_view name) {
  if (name == "count") return {AggregateFn::n, AggregateFn::n_distinct};
  if (name == "avg") return {AggregateFn::mean};
  for (std::size_t i = 0; i < kAggregateCount; ++i) {
    auto fn = static_cast<AggregateFn>(i);
    if (aggregate_name(fn) == name) return {fn};
  }
  return {};
}

bool is_window(AggregateFn fn) {
  switch (fn) {
    case AggregateFn::cumsum:
    case AggregateFn::pmin:
    case AggregateFn::pmax:
    case AggregateFn::lead:
    case AggregateFn::lag:
    case AggregateFn::rank:
    case AggregateFn::row_number: return true;
    default: return false;
  }
}

bool takes_column(AggregateFn fn) {
  return fn != AggregateFn::n && fn != AggregateFn::row_number;
}

std::optional<ValueType> aggregate_result_type(AggregateFn fn, ValueType input) {
  switch (fn) {
    case AggregateFn::n:
    case AggregateFn::row_number: return ValueType::Integer;
    default: break;
  }
  if (input == ValueType::Null) return std::nullopt;
  switch (fn) {
    case AggregateFn::n_distinct:
    case AggregateFn::rank: return ValueType::Integer;
    case AggregateFn::str_count:
      if (input == ValueType::Text) return ValueType::Integer;
      return std::nullopt;
    case AggregateFn::sum:
    case AggregateFn::cumsum:
      if (is_numeric(input)) return input;
      return std::nullopt;
    case AggregateFn::mean:
    case AggregateFn::median:
      if (is_numeric(input)) return ValueType::Real;
      return std::nullopt;
    case AggregateFn::min:
    case AggregateFn::max:
    case AggregateFn::pmin:
    case AggregateFn::pmax:
    case AggregateFn::mode:
    case AggregateFn::lead:
    case AggregateFn::lag: return input;
    default: return std::nullopt;
  }
}

}  // namespace sqlpbe
