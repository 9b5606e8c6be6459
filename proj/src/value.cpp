#include "sqlpbe/value.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace sqlpbe {

std::string_view type_name(ValueType t) {
  switch (t) {
    case ValueType::Null: return "null";
    case ValueType::Integer: return "integer";
    case ValueType::Real: return "real";
    case ValueType::Text: return "text";
    case ValueType::Boolean: return "boolean";
    case ValueType::DateTime: return "datetime";
  }
  return "unknown";
}

std::optional<ValueType> parse_type_name(std::string_view name) {
  for (auto t : {ValueType::Null, ValueType::Integer, ValueType::Real, ValueType::Text,
                 ValueType::Boolean, ValueType::DateTime}) {
    if (type_name(t) == name) return t;
  }
  if (name == "int") return ValueType::Integer;
  if (name == "float" || name == "double") return ValueType::Real;
  if (name == "string" || name == "str") return ValueType::Text;
  if (name == "bool") return ValueType::Boolean;
  if (name == "date" || name == "time") return ValueType::DateTime;
  return std::nullopt;
}

bool is_numeric(ValueType t) { return t == ValueType::Integer || t == ValueType::Real; }

bool comparable(ValueType a, ValueType b) {
  return a == b || (is_numeric(a) && is_numeric(b));
}

std::optional<double> Value::numeric() const {
  if (auto* i = std::get_if<std::int64_t>(&storage_)) return static_cast<double>(*i);
  if (auto* d = std::get_if<double>(&storage_)) return *d;
  return std::nullopt;
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (std::isfinite(v) && s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string Value::to_string() const {
  switch (type()) {
    case ValueType::Null: return "";
    case ValueType::Integer: return std::to_string(as_integer());
    case ValueType::Real: return format_real(as_real());
    case ValueType::Text: return as_text();
    case ValueType::Boolean: return as_boolean() ? "true" : "false";
    case ValueType::DateTime: return as_datetime().iso;
  }
  return {};
}

namespace {

bool fits_int64(double d) { return d >= -9223372036854775808.0 && d < 9223372036854775808.0; }

int type_rank(ValueType t) {
  switch (t) {
    case ValueType::Null: return 0;
    case ValueType::Integer:
    case ValueType::Real: return 1;
    case ValueType::Boolean: return 2;
    case ValueType::Text: return 3;
    case ValueType::DateTime: return 4;
  }
  return 5;
}

template <typename A, typename B>
std::strong_ordering order_numbers(A a, B b) {
  if (a < b) return std::strong_ordering::less;
  if (b < a) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace

std::strong_ordering compare(const Value& a, const Value& b) {
  const int ra = type_rank(a.type());
  const int rb = type_rank(b.type());
  if (ra != rb) return ra <=> rb;
  switch (a.type()) {
    case ValueType::Null: return std::strong_ordering::equal;
    case ValueType::Integer:
      if (b.type() == ValueType::Integer) return a.as_integer() <=> b.as_integer();
      return order_numbers(static_cast<long double>(a.as_integer()),
                           static_cast<long double>(b.as_real()));
    case ValueType::Real:
      if (b.type() == ValueType::Real) return order_numbers(a.as_real(), b.as_real());
      return order_numbers(static_cast<long double>(a.as_real()),
                           static_cast<long double>(b.as_integer()));
    case ValueType::Boolean: return a.as_boolean() <=> b.as_boolean();
    case ValueType::Text: return a.as_text().compare(b.as_text()) <=> 0;
    case ValueType::DateTime: return a.as_datetime() <=> b.as_datetime();
  }
  return std::strong_ordering::equal;
}

bool operator==(const Value& a, const Value& b) { return compare(a, b) == 0; }

std::size_t ValueHash::operator()(const Value& v) const {
  switch (v.type()) {
    case ValueType::Null: return 0x9e3779b97f4a7c15ULL;
    case ValueType::Integer: return std::hash<std::int64_t>{}(v.as_integer());
    case ValueType::Real: {
      const double d = v.as_real();
      if (std::trunc(d) == d && fits_int64(d)) {
        return std::hash<std::int64_t>{}(static_cast<std::int64_t>(d));
      }
      return std::hash<double>{}(d);
    }
    case ValueType::Boolean: return v.as_boolean() ? 0x51ed27 : 0x51ed26;
    case ValueType::Text: return std::hash<std::string>{}(v.as_text());
    case ValueType::DateTime: return std::hash<std::string>{}(v.as_datetime().iso) ^ 0xd7;
  }
  return 0;
}

namespace {

// Integral doubles key exactly; fractional ones are rounded to 12 significant
// digits so that results summed in a different order still meet.
std::string numeric_key(double d) {
  if (d == 0.0) return "n:0";
  if (std::trunc(d) == d && fits_int64(d)) {
    return "n:" + std::to_string(static_cast<std::int64_t>(d));
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", d);
  const double rounded = std::strtod(buf, nullptr);
  if (std::trunc(rounded) == rounded && fits_int64(rounded)) {
    return "n:" + std::to_string(static_cast<std::int64_t>(rounded));
  }
  return "n:" + std::string(buf);
}

std::optional<std::string> numeric_text_key(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  std::int64_t i = 0;
  if (auto [p, ec] = std::from_chars(first, last, i); ec == std::errc{} && p == last) {
    return "n:" + std::to_string(i);
  }
  double d = 0;
  if (auto [p, ec] = std::from_chars(first, last, d); ec == std::errc{} && p == last &&
                                                      std::isfinite(d)) {
    return numeric_key(d);
  }
  return std::nullopt;
}

}  // namespace

std::string lax_key(const Value& v) {
  switch (v.type()) {
    case ValueType::Null: return std::string("\0null", 5);
    case ValueType::Integer: return "n:" + std::to_string(v.as_integer());
    case ValueType::Real: return numeric_key(v.as_real());
    case ValueType::Boolean: return v.as_boolean() ? "n:1" : "n:0";
    case ValueType::Text:
      if (auto k = numeric_text_key(v.as_text())) return *k;
      return "s:" + v.as_text();
    case ValueType::DateTime: return "s:" + v.as_datetime().iso;
  }
  return {};
}

}  // namespace sqlpbe
