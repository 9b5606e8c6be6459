#pragma once

#include <stdexcept>
#include <string>

namespace sqlpbe {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

enum class EngineErrorKind {
  UnknownColumn,
  /// A column-set premise other than membership failed: group columns that
  /// collide with the generated column, or a join with no shared columns.
  ColumnConflict,
  TypeMismatch,
  NonUnionCompatible,
  ArityError,
  Overflow,
  UnknownTable,
};

std::string to_string(EngineErrorKind kind);

class EngineError : public Error {
 public:
  EngineError(EngineErrorKind kind, const std::string& what)
      : Error(to_string(kind) + ": " + what), kind_(kind) {}
  EngineErrorKind kind() const { return kind_; }

  /// True for the errors that column-set pruning is meant to rule out.
  bool is_column_error() const {
    return kind_ == EngineErrorKind::UnknownColumn || kind_ == EngineErrorKind::ColumnConflict;
  }

 private:
  EngineErrorKind kind_;
};

}  // namespace sqlpbe
