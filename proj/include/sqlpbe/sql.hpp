#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "sqlpbe/dsl.hpp"
#include "sqlpbe/relational.hpp"
#include "sqlpbe/table.hpp"

struct sqlite3;

namespace sqlpbe {

std::string quote_identifier(std::string_view name);
std::string sql_literal(const Value& v);

/// Translates a program to one SQLite query. Intermediate lines become common
/// table expressions named after their outputs; the last line is folded into
/// the final SELECT, which applies `projection`.
std::string to_sql(const Program& p, const Database& inputs, const Projection& projection);
std::string to_sql(const Program& p, const Database& inputs);

/// Re-types columns of a query result to match `expected` where the stored
/// form allows it: 0/1 integers to Boolean, text to DateTime, numbers to Real.
Table coerce_like(const Table& t, const Schema& expected);

class SqlError : public Error {
 public:
  using Error::Error;
};

class QueryTimeout : public SqlError {
 public:
  using SqlError::SqlError;
};

/// In-memory SQLite database holding a copy of the input tables.
class SqliteDatabase {
 public:
  SqliteDatabase();
  explicit SqliteDatabase(const Database& tables);
  ~SqliteDatabase();
  SqliteDatabase(const SqliteDatabase&) = delete;
  SqliteDatabase& operator=(const SqliteDatabase&) = delete;

  void load(const NamedTable& t);

  /// Runs a query and returns its rows. Column types come from the stored
  /// values; a column mixing integers and reals becomes Real. Throws SqlError,
  /// or QueryTimeout when `budget` elapses first.
  Table query(const std::string& sql, std::optional<std::chrono::milliseconds> budget = std::nullopt);

 private:
  sqlite3* db_ = nullptr;
};

}  // namespace sqlpbe
