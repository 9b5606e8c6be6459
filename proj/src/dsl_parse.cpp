#include <cctype>
#include <stdexcept>

#include "sqlpbe/dsl.hpp"
#include "sqlpbe/instance.hpp"

namespace sqlpbe {

namespace {

[[noreturn]] void fail(std::string_view what, std::string_view where) {
  throw std::invalid_argument(std::string(what) + " in '" + std::string(where) + "'");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

/// Splits on `sep` outside quotes, brackets and parentheses.
std::vector<std::string_view> split_top(std::string_view s, std::string_view sep) {
  std::vector<std::string_view> out;
  int depth = 0;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '\'') {
      quoted = !quoted;
    } else if (!quoted && (c == '(' || c == '[')) {
      ++depth;
    } else if (!quoted && (c == ')' || c == ']')) {
      --depth;
    } else if (!quoted && depth == 0 && s.substr(i, sep.size()) == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + sep.size();
      i = start - 1;
    }
  }
  out.push_back(trim(s.substr(start)));
  return out;
}

std::variant<ColumnRef, Value> parse_operand(std::string_view s) {
  if (s.size() >= 2 && s.front() == '\'' && s.back() == '\'') {
    std::string text;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      text += s[i];
      if (s[i] == '\'' && i + 2 < s.size() && s[i + 1] == '\'') ++i;
    }
    if (is_iso_datetime(text)) return Value::datetime(text);
    return Value::text(text);
  }
  if (s == "TRUE") return Value::boolean(true);
  if (s == "FALSE") return Value::boolean(false);
  if (s == "NULL") return Value::null();
  const Value v = parse_constant(s);
  if (v.type() == ValueType::Integer || v.type() == ValueType::Real) return v;
  return ColumnRef{std::string(s)};
}

Atom parse_atom(std::string_view s) {
  static constexpr std::array<std::pair<std::string_view, CmpOp>, 6> ops = {{
      {" == ", CmpOp::eq}, {" != ", CmpOp::ne}, {" <= ", CmpOp::le},
      {" >= ", CmpOp::ge}, {" < ", CmpOp::lt},  {" > ", CmpOp::gt},
  }};
  for (const auto& [sym, cmp] : ops) {
    auto parts = split_top(s, sym);
    if (parts.size() == 2) return Atom{std::string(parts[0]), cmp, parse_operand(parts[1])};
  }
  fail("expected a comparison", s);
}

FilterCondition parse_filter(std::string_view s) {
  FilterCondition c;
  auto parts = split_top(s, " & ");
  if (parts.size() == 1) {
    parts = split_top(s, " | ");
    if (parts.size() > 1) c.connective = Connective::Or;
  }
  for (auto p : parts) c.atoms.push_back(parse_atom(p));
  return c;
}

SummariseCondition parse_aggregate_condition(std::string_view s) {
  auto eq = s.find(" = ");
  auto open = s.find('(');
  if (eq == std::string_view::npos || open == std::string_view::npos || s.back() != ')') {
    fail("expected name = fn(column)", s);
  }
  SummariseCondition c;
  c.output = std::string(trim(s.substr(0, eq)));
  const auto fn_name = trim(s.substr(eq + 3, open - eq - 3));
  auto fns = parse_aggregate(fn_name);
  if (fns.size() != 1) fail("unknown aggregate", fn_name);
  c.fn = fns.front();
  c.input = std::string(trim(s.substr(open + 1, s.size() - open - 2)));
  return c;
}

std::vector<std::string> parse_cols(std::string_view s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ']') fail("expected [columns]", s);
  std::vector<std::string> out;
  auto inner = trim(s.substr(1, s.size() - 2));
  if (inner.empty()) return out;
  for (auto c : split_top(inner, ",")) out.emplace_back(c);
  return out;
}

Line parse_line(std::string_view text) {
  const auto eq = text.find('=');
  const auto open = text.find('(');
  if (eq == std::string_view::npos || open == std::string_view::npos || open < eq || text.back() != ')') {
    fail("expected out = op(args)", text);
  }
  Line line;
  line.output = std::string(trim(text.substr(0, eq)));
  const auto name = trim(text.substr(eq + 1, open - eq - 1));
  auto op = parse_op(name);
  if (!op) fail("unknown operation", name);
  line.op = *op;
  auto args = split_top(text.substr(open + 1, text.size() - open - 2), ",");
  const auto sig = signature(line.op);
  const std::size_t expected =
      sig.tables + (sig.condition ? 1 : 0) + (sig.columns ? 1 : 0);
  const bool optional_cols = sig.columns == ArgKind::Cols;
  if (args.size() != expected && !(optional_cols && args.size() + 1 == expected)) {
    fail("wrong number of arguments", text);
  }
  std::size_t i = 0;
  for (; i < sig.tables; ++i) line.tables.emplace_back(args[i]);
  if (sig.condition) {
    const auto arg = args[i++];
    switch (*sig.condition) {
      case ArgKind::FilterCondition: line.filter = parse_filter(arg); break;
      case ArgKind::JoinCondition:
      case ArgKind::CrossJoinCondition: {
        auto parts = split_top(arg, " == ");
        if (parts.size() != 2) fail("expected a == b", arg);
        line.join = JoinCondition{std::string(parts[0]), std::string(parts[1])};
        break;
      }
      case ArgKind::SummariseCondition: line.aggregate = parse_aggregate_condition(arg); break;
      default: break;
    }
  }
  if (sig.columns && i < args.size()) {
    if (*sig.columns == ArgKind::Cols) {
      line.cols = parse_cols(args[i]);
    } else {
      line.cols = {std::string(args[i])};
    }
  }
  return line;
}

}  // namespace

Program parse_program(std::string_view text) {
  Program p;
  for (auto raw : split_top(text, "\n")) {
    for (auto stmt : split_top(raw, ";")) {
      stmt = trim(stmt);
      if (stmt.empty() || stmt.front() == '#') continue;
      p.lines.push_back(parse_line(stmt));
    }
  }
  if (p.lines.empty()) throw std::invalid_argument("empty program");
  return p;
}

}  // namespace sqlpbe
