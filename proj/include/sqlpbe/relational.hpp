#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sqlpbe/dsl.hpp"
#include "sqlpbe/errors.hpp"
#include "sqlpbe/table.hpp"

namespace sqlpbe {

using Env = std::map<std::string, TablePtr, std::less<>>;

Env make_env(const Database& db);

/// Evaluates one DSL line against the tables in `env`. Column premises of the
/// inference rules are re-checked and reported as EngineError with
/// UnknownColumn or ColumnConflict.
///
/// Window functions (cumsum, pmin, pmax, lead, lag, row_number) walk the
/// input's row order, so results relying on them are order-sensitive. rank
/// orders by value and is not.
Table apply_line(const Line& line, const Env& env);

/// Evaluates all lines in order and returns the last line's table.
Table run_program(const Program& p, const Database& db);

/// Output schema of a line given its operands' schemas, without touching rows.
Schema result_schema(const Line& line, const std::map<std::string, Schema, std::less<>>& schemas);

/// Equal column-name lists and equal row multisets.
bool tables_equal_strict(const Table& a, const Table& b);

/// Canonical form under lax comparison: cells mapped through lax_key, columns
/// ordered by their sorted cell multiset (ties broken by the permutation that
/// yields the smallest sorted row list), rows sorted.
struct LaxForm {
  std::size_t columns = 0;
  std::vector<std::vector<std::string>> rows;
  friend bool operator==(const LaxForm&, const LaxForm&) = default;
  friend auto operator<=>(const LaxForm&, const LaxForm&) = default;
};

LaxForm lax_canonical(const Table& t);

/// Row multisets equal for some column permutation of `b`, ignoring column
/// names and coercing cells (numeric text and numbers, Integer and Real).
bool tables_equal_lax(const Table& a, const Table& b);

/// Distinct non-null cell values.
std::set<Value, ValueLess> unique_values(const Table& t);

/// Output columns picked from a table by index, each with its final name.
struct Projection {
  std::vector<std::size_t> source;
  std::vector<std::string> names;

  static Projection identity(const Schema& s);
  bool is_identity(const Schema& s) const;
  friend bool operator==(const Projection&, const Projection&) = default;
};

Table project(const Table& t, const Projection& p);

/// Rows sorted by the total value order; used for multiset comparison.
std::vector<Row> sorted_rows(const Table& t);

}  // namespace sqlpbe
