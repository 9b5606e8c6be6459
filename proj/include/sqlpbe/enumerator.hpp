#pragma once

#include <bitset>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqlpbe/dsl.hpp"
#include "sqlpbe/errors.hpp"
#include "sqlpbe/instance.hpp"

namespace sqlpbe {

inline constexpr std::size_t kMaxColumnBits = 256;
using ColumnSet = std::bitset<kMaxColumnBits>;

class UniverseOverflow : public Error {
 public:
  using Error::Error;
};

/// Every column name a program over the instance can mention, in a fixed
/// order: input columns first, then generated aggregate columns.
class ColumnUniverse {
 public:
  explicit ColumnUniverse(std::size_t limit = 128);

  /// Index of `name`, adding it when new. Throws UniverseOverflow past the limit.
  std::size_t add(const std::string& name, ValueType type);

  std::optional<std::size_t> index_of(std::string_view name) const;
  const std::string& name(std::size_t i) const { return names_[i]; }
  ValueType type(std::size_t i) const { return types_[i]; }
  std::size_t size() const { return names_.size(); }
  std::size_t limit() const { return limit_; }

  /// Throws std::out_of_range on unknown names.
  ColumnSet set_of(const std::vector<std::string>& names) const;
  std::vector<std::string> names_of(const ColumnSet& s) const;

 private:
  std::size_t limit_;
  std::vector<std::string> names_;
  std::vector<ValueType> types_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

struct AnnotatedFilter {
  FilterCondition condition;
  ColumnSet ann1;
};

struct AnnotatedJoin {
  JoinCondition condition;
  ColumnSet ann1;
  ColumnSet ann2;
};

struct AnnotatedAggregate {
  SummariseCondition condition;
  ColumnSet ann1;
  ColumnSet ann2;
};

struct AnnotatedCols {
  std::vector<std::string> cols;
  ColumnSet ann1;
};

struct SpaceOptions {
  std::size_t universe_limit = 128;
  std::size_t max_group_columns = 2;
  /// Two-atom filters joined by & and |.
  bool compound_filters = true;
};

/// All arguments a line may take, derived once per instance and shared
/// read-only between workers.
struct ArgumentSpace {
  ColumnUniverse universe;
  std::vector<std::string> input_names;
  std::vector<ColumnSet> input_columns;
  std::vector<AnnotatedFilter> filters;
  /// Usable by both inner_join and cross_join.
  std::vector<AnnotatedJoin> joins;
  /// Reducing and window conditions; summarise skips the window ones.
  std::vector<AnnotatedAggregate> aggregates;
  std::vector<AnnotatedCols> cols;
  /// Single columns for intersect.
  std::vector<AnnotatedCols> col;
};

/// Name of the column generated by `fn(input)`: "n" for n(), otherwise the
/// function name followed by the input column, e.g. maxStudentID.
std::string generated_column_name(AggregateFn fn, const std::string& input);

ArgumentSpace build_argument_space(const Instance& inst, const SpaceOptions& options = {});

/// Premise check of the column inference rules on bitmask annotations.
/// Returns the line's output column set, or nullopt when a premise fails.
/// `tables` holds the annotations of the line's table arguments; `condition`
/// and `columns` index into the space lists matching the operation.
struct LineArguments {
  std::vector<ColumnSet> tables;
  std::optional<std::size_t> condition;
  std::optional<std::size_t> columns;
};

std::optional<ColumnSet> check_premises(Op op, const LineArguments& args, const ArgumentSpace& space);

/// Allowed operations per line. A cube fixes one operation per line.
struct Shape {
  std::vector<std::vector<Op>> lines;

  static Shape cube(const std::vector<Op>& ops);
  static Shape uniform(std::size_t size, const std::vector<Op>& ops);
};

/// Receives the search tree. enter_line is called when line `index` is fixed;
/// returning false skips every program extending the current prefix.
/// on_program returning false stops the enumeration.
class EnumerationSink {
 public:
  virtual ~EnumerationSink() = default;
  virtual bool enter_line(std::size_t index, const Program& prefix) {
    (void)index;
    (void)prefix;
    return true;
  }
  virtual void leave_line(std::size_t index) { (void)index; }
  virtual bool on_program(const Program& p) = 0;
  /// Polled between candidate lines; true ends the enumeration early.
  virtual bool should_stop() { return false; }
};

struct EnumerationStats {
  std::size_t programs = 0;
  std::size_t pruned_lines = 0;
  bool stopped = false;
};

/// Depth-first enumeration of every program matching `shape` whose lines pass
/// check_premises. Structural rules: table arguments are inputs or earlier
/// lines; natural_join variants take strictly increasing table references;
/// every non-final line is used by a later line. Order is lexicographic over
/// (line, operation, table arguments, condition index, columns index).
EnumerationStats enumerate(const ArgumentSpace& space, const Shape& shape, EnumerationSink& sink);

/// Same traversal without the premise check; every structurally well-formed
/// program is produced.
EnumerationStats enumerate_unpruned(const ArgumentSpace& space, const Shape& shape, EnumerationSink& sink);

/// Convenience sink wrapping a callable.
class CallbackSink : public EnumerationSink {
 public:
  explicit CallbackSink(std::function<bool(const Program&)> f) : f_(std::move(f)) {}
  bool on_program(const Program& p) override { return f_(p); }

 private:
  std::function<bool(const Program&)> f_;
};

}  // namespace sqlpbe
