#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sqlpbe/table.hpp"

namespace sqlpbe {

enum class Op : std::uint8_t {
  natural_join,
  natural_join3,
  natural_join4,
  left_join,
  inner_join,
  cross_join,
  filter,
  summarise,
  mutate,
  anti_join,
  semi_join,
  union_all,
  intersect,
};

inline constexpr std::array<Op, 13> kAllOps = {
    Op::natural_join, Op::natural_join3, Op::natural_join4, Op::left_join, Op::inner_join,
    Op::cross_join,   Op::filter,        Op::summarise,     Op::mutate,    Op::anti_join,
    Op::semi_join,    Op::union_all,     Op::intersect,
};

std::string_view op_name(Op op);
std::optional<Op> parse_op(std::string_view name);

/// inner_join and cross_join: the two operations with join-condition arguments.
bool is_complex_join(Op op);

enum class ArgKind : std::uint8_t {
  FilterCondition,
  JoinCondition,
  CrossJoinCondition,
  SummariseCondition,
  Cols,
  Col,
};

struct OpSignature {
  std::size_t tables = 0;
  std::optional<ArgKind> condition;
  std::optional<ArgKind> columns;
};

OpSignature signature(Op op);

enum class CmpOp : std::uint8_t { eq, ne, lt, le, gt, ge };

inline constexpr std::array<CmpOp, 6> kAllCmpOps = {CmpOp::eq, CmpOp::ne, CmpOp::lt,
                                                     CmpOp::le, CmpOp::gt, CmpOp::ge};

std::string_view cmp_symbol(CmpOp op);

struct ColumnRef {
  std::string name;
  friend bool operator==(const ColumnRef&, const ColumnRef&) = default;
};

/// `column cmp constant` or `column cmp column`.
struct Atom {
  std::string column;
  CmpOp cmp = CmpOp::eq;
  std::variant<ColumnRef, Value> rhs;

  std::vector<std::string> columns() const;
  friend bool operator==(const Atom&, const Atom&) = default;
};

enum class Connective : std::uint8_t { And, Or };

/// One atom, or two atoms joined by a single connective.
struct FilterCondition {
  std::vector<Atom> atoms;
  Connective connective = Connective::And;

  std::vector<std::string> columns() const;
  friend bool operator==(const FilterCondition&, const FilterCondition&) = default;
};

/// Equality between a column of the first table and a column of the second.
struct JoinCondition {
  std::string left;
  std::string right;
  friend bool operator==(const JoinCondition&, const JoinCondition&) = default;
};

/// `output = fn(input)`; `input` is empty for n() and row_number().
struct SummariseCondition {
  std::string output;
  AggregateFn fn = AggregateFn::n;
  std::string input;
  friend bool operator==(const SummariseCondition&, const SummariseCondition&) = default;
};

struct Line {
  std::string output;
  Op op = Op::natural_join;
  std::vector<std::string> tables;
  std::optional<FilterCondition> filter;
  std::optional<JoinCondition> join;
  std::optional<SummariseCondition> aggregate;
  std::vector<std::string> cols;

  friend bool operator==(const Line&, const Line&) = default;
};

/// Line-based single-assignment program; the last line's output is the result.
struct Program {
  std::vector<Line> lines;

  std::size_t size() const { return lines.size(); }
  std::vector<Op> ops() const;
  friend bool operator==(const Program&, const Program&) = default;
};

std::string to_string(const Value& constant_literal, bool quote);
std::string to_string(const FilterCondition& c);
std::string to_string(const JoinCondition& c);
std::string to_string(const SummariseCondition& c);
std::string to_string(const Line& line);
std::string to_string(const Program& p);

/// Reads the text form produced by to_string(Program): one line per
/// statement (newline or ';' separated), blank lines and '#' comments ignored.
/// Throws std::invalid_argument on malformed input.
Program parse_program(std::string_view text);

/// Conventional name of line i's output: df1, df2, ...
std::string line_output_name(std::size_t index);

using ColumnNames = std::set<std::string, std::less<>>;

struct RuleViolation {
  std::size_t line = 0;
  /// Inference rule name (Filter, Summarise, ...) or a structural check
  /// (EmptyProgram, UnknownTable, DuplicateOutput, Arguments).
  std::string rule;
  std::vector<std::string> missing;
  std::string message;
};

struct Validation {
  /// Output column set of every line, in program order.
  std::vector<ColumnNames> line_columns;
  /// Empty on success; otherwise holds the first violation.
  std::vector<RuleViolation> errors;

  bool ok() const { return errors.empty(); }
};

/// Applies the column inference rules line by line.
Validation validate(const Program& p, const std::map<std::string, ColumnNames, std::less<>>& inputs);
Validation validate(const Program& p, const Database& inputs);

}  // namespace sqlpbe
