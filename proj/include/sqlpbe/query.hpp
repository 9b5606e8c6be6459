#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sqlpbe/dsl.hpp"
#include "sqlpbe/relational.hpp"
#include "sqlpbe/table.hpp"

namespace sqlpbe {

/// A candidate or reference query: a DSL program with its final projection,
/// or SQL text run on an embedded SQLite copy of the database.
class Query {
 public:
  static Query program(Program p, std::optional<Projection> projection = std::nullopt);
  static Query sql(std::string text);

  bool is_program() const { return std::holds_alternative<ProgramQuery>(body_); }
  const Program& as_program() const { return std::get<ProgramQuery>(body_).program; }
  const std::optional<Projection>& projection() const { return std::get<ProgramQuery>(body_).projection; }

  /// Throws EngineError or SqlError.
  Table run(const Database& db, std::optional<std::chrono::milliseconds> budget = std::nullopt) const;

  /// Literal constants the query compares against.
  std::vector<Value> constants() const;

  /// SQL for a program (needs the database for schemas), or the SQL text itself.
  std::string to_sql(const Database& db) const;

  /// DSL text or SQL text.
  std::string text() const;

 private:
  struct ProgramQuery {
    Program program;
    std::optional<Projection> projection;
  };
  std::variant<ProgramQuery, std::string> body_;
};

std::vector<Value> program_constants(const Program& p);

/// Single-quoted literals and bare numbers outside quoted identifiers.
std::vector<Value> sql_constants(std::string_view sql);

}  // namespace sqlpbe
