#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace sqlpbe {

enum class ValueType : std::uint8_t { Null, Integer, Real, Text, Boolean, DateTime };

std::string_view type_name(ValueType t);
std::optional<ValueType> parse_type_name(std::string_view name);

bool is_numeric(ValueType t);

/// Two column types can meet in a comparison or a join key: equal tags, or
/// both numeric (Integer and Real compare after promotion).
bool comparable(ValueType a, ValueType b);

/// ISO-8601 date or date-time, kept as text. The format is zero-padded, so
/// lexicographic order is chronological order.
struct DateTime {
  std::string iso;
  friend auto operator<=>(const DateTime&, const DateTime&) = default;
};

class Value {
 public:
  using Storage = std::variant<std::monostate, std::int64_t, double, std::string, bool, DateTime>;

  Value() = default;
  static Value null() { return Value{}; }
  static Value integer(std::int64_t v) { return Value{Storage{v}}; }
  static Value real(double v) { return Value{Storage{v}}; }
  static Value text(std::string v) { return Value{Storage{std::move(v)}}; }
  static Value boolean(bool v) { return Value{Storage{v}}; }
  static Value datetime(std::string iso) { return Value{Storage{DateTime{std::move(iso)}}}; }

  ValueType type() const { return static_cast<ValueType>(storage_.index()); }
  bool is_null() const { return storage_.index() == 0; }

  std::int64_t as_integer() const { return std::get<std::int64_t>(storage_); }
  double as_real() const { return std::get<double>(storage_); }
  const std::string& as_text() const { return std::get<std::string>(storage_); }
  bool as_boolean() const { return std::get<bool>(storage_); }
  const DateTime& as_datetime() const { return std::get<DateTime>(storage_); }

  /// Integer and Real as double; nullopt otherwise.
  std::optional<double> numeric() const;

  const Storage& storage() const { return storage_; }

  /// Display form: Null prints as empty, Real uses the shortest round-trip form.
  std::string to_string() const;

 private:
  explicit Value(Storage s) : storage_(std::move(s)) {}
  Storage storage_;
};

/// Total order over all values. Null sorts first, then numbers (Integer and
/// Real interleaved by magnitude), Boolean, Text, DateTime.
std::strong_ordering compare(const Value& a, const Value& b);

/// Equality consistent with `compare`: Null equals Null, Integer 1 equals Real 1.0.
bool operator==(const Value& a, const Value& b);

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const { return compare(a, b) < 0; }
};

struct ValueHash {
  std::size_t operator()(const Value& v) const;
};

/// Key under lax coercion: numbers, numeric text and booleans collapse onto a
/// canonical decimal form; other text and dates stay as written. Null has its
/// own key.
std::string lax_key(const Value& v);

std::string format_real(double v);

}  // namespace sqlpbe
