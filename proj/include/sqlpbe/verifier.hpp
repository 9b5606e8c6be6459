#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sqlpbe/dsl.hpp"
#include "sqlpbe/instance.hpp"
#include "sqlpbe/relational.hpp"

namespace sqlpbe {

/// Runs the program on the instance inputs. Engine errors propagate.
Table execute(const Program& p, const Instance& inst);

/// Expected output with the lax keys precomputed once per instance.
class ExpectedOutput {
 public:
  explicit ExpectedOutput(Table expected);

  const Table& table() const { return table_; }
  const std::set<std::string>& unique_keys() const { return unique_; }
  const std::vector<std::vector<std::string>>& column_keys() const { return column_keys_; }
  const std::vector<std::vector<std::string>>& sorted_rows() const { return rows_; }

 private:
  Table table_;
  std::set<std::string> unique_;
  /// Sorted lax keys of each column.
  std::vector<std::vector<std::string>> column_keys_;
  std::vector<std::vector<std::string>> rows_;
};

/// Fraction of the expected output's distinct non-null values that occur
/// anywhere in `output`; values meet under lax coercion.
double score(const Table& output, const ExpectedOutput& expected);
double score(const Table& output, const Table& expected);

/// Injective mapping of expected columns onto output columns under which the
/// projected rows equal the expected rows as multisets. Outputs scoring below
/// one are rejected before any mapping is tried. Mappings are tried in
/// lexicographic order of output column indices; the first match wins.
std::optional<Projection> satisfies(const Table& output, const ExpectedOutput& expected);
std::optional<Projection> satisfies(const Table& output, const Table& expected);

}  // namespace sqlpbe
