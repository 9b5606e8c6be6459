#include "sqlpbe/dsl.hpp"

#include <algorithm>
#include <sstream>

namespace sqlpbe {

std::string_view op_name(Op op) {
  switch (op) {
    case Op::natural_join: return "natural_join";
    case Op::natural_join3: return "natural_join3";
    case Op::natural_join4: return "natural_join4";
    case Op::left_join: return "left_join";
    case Op::inner_join: return "inner_join";
    case Op::cross_join: return "cross_join";
    case Op::filter: return "filter";
    case Op::summarise: return "summarise";
    case Op::mutate: return "mutate";
    case Op::anti_join: return "anti_join";
    case Op::semi_join: return "semi_join";
    case Op::union_all: return "union";
    case Op::intersect: return "intersect";
  }
  return "?";
}

std::optional<Op> parse_op(std::string_view name) {
  for (Op op : kAllOps) {
    if (op_name(op) == name) return op;
  }
  return std::nullopt;
}

bool is_complex_join(Op op) { return op == Op::inner_join || op == Op::cross_join; }

OpSignature signature(Op op) {
  switch (op) {
    case Op::natural_join: return {2, std::nullopt, std::nullopt};
    case Op::natural_join3: return {3, std::nullopt, std::nullopt};
    case Op::natural_join4: return {4, std::nullopt, std::nullopt};
    case Op::left_join: return {2, std::nullopt, std::nullopt};
    case Op::inner_join: return {2, ArgKind::JoinCondition, std::nullopt};
    case Op::cross_join: return {2, ArgKind::CrossJoinCondition, std::nullopt};
    case Op::filter: return {1, ArgKind::FilterCondition, std::nullopt};
    case Op::summarise: return {1, ArgKind::SummariseCondition, ArgKind::Cols};
    case Op::mutate: return {1, ArgKind::SummariseCondition, std::nullopt};
    case Op::anti_join: return {2, std::nullopt, ArgKind::Cols};
    case Op::semi_join: return {2, std::nullopt, std::nullopt};
    case Op::union_all: return {2, std::nullopt, std::nullopt};
    case Op::intersect: return {2, std::nullopt, ArgKind::Col};
  }
  return {};
}

std::string_view cmp_symbol(CmpOp op) {
  switch (op) {
    case CmpOp::eq: return "==";
    case CmpOp::ne: return "!=";
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
  }
  return "?";
}

std::vector<std::string> Atom::columns() const {
  std::vector<std::string> out{column};
  if (auto* ref = std::get_if<ColumnRef>(&rhs); ref && ref->name != column) out.push_back(ref->name);
  return out;
}

std::vector<std::string> FilterCondition::columns() const {
  std::vector<std::string> out;
  for (const auto& a : atoms) {
    for (auto& c : a.columns()) {
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
    }
  }
  return out;
}

std::vector<Op> Program::ops() const {
  std::vector<Op> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(l.op);
  return out;
}

std::string to_string(const Value& v, bool quote) {
  switch (v.type()) {
    case ValueType::Null: return "NULL";
    case ValueType::Boolean: return v.as_boolean() ? "TRUE" : "FALSE";
    case ValueType::Integer:
    case ValueType::Real: return v.to_string();
    case ValueType::Text:
    case ValueType::DateTime: {
      if (!quote) return v.to_string();
      std::string out = "'";
      for (char c : v.to_string()) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
  }
  return {};
}

namespace {

std::string atom_string(const Atom& a) {
  std::string rhs = std::holds_alternative<ColumnRef>(a.rhs)
                        ? std::get<ColumnRef>(a.rhs).name
                        : to_string(std::get<Value>(a.rhs), true);
  return a.column + " " + std::string(cmp_symbol(a.cmp)) + " " + rhs;
}

std::string cols_string(const std::vector<std::string>& cols) {
  std::string out = "[";
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? ", " : "") + cols[i];
  return out + "]";
}

}  // namespace

std::string to_string(const FilterCondition& c) {
  std::string out;
  for (std::size_t i = 0; i < c.atoms.size(); ++i) {
    if (i) out += c.connective == Connective::And ? " & " : " | ";
    out += atom_string(c.atoms[i]);
  }
  return out;
}

std::string to_string(const JoinCondition& c) { return c.left + " == " + c.right; }

std::string to_string(const SummariseCondition& c) {
  return c.output + " = " + std::string(aggregate_name(c.fn)) + "(" + c.input + ")";
}

std::string to_string(const Line& line) {
  std::ostringstream out;
  out << line.output << " = " << op_name(line.op) << "(";
  for (std::size_t i = 0; i < line.tables.size(); ++i) out << (i ? ", " : "") << line.tables[i];
  if (line.filter) out << ", " << to_string(*line.filter);
  if (line.join) out << ", " << to_string(*line.join);
  if (line.aggregate) out << ", " << to_string(*line.aggregate);
  const auto sig = signature(line.op);
  if (sig.columns == ArgKind::Cols) out << ", " << cols_string(line.cols);
  if (sig.columns == ArgKind::Col && !line.cols.empty()) out << ", " << line.cols.front();
  out << ")";
  return out.str();
}

std::string to_string(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.lines.size(); ++i) out += (i ? "\n" : "") + to_string(p.lines[i]);
  return out;
}

std::string line_output_name(std::size_t index) { return "df" + std::to_string(index + 1); }

namespace {

std::vector<std::string> missing_from(const std::vector<std::string>& needed, const ColumnNames& have) {
  std::vector<std::string> out;
  for (const auto& c : needed) {
    if (!have.contains(c)) out.push_back(c);
  }
  return out;
}

ColumnNames intersection(const ColumnNames& a, const ColumnNames& b) {
  ColumnNames out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

std::optional<RuleViolation> check_arguments(const Line& line) {
  const auto sig = signature(line.op);
  auto bad = [&](std::string msg) { return RuleViolation{0, "Arguments", {}, std::move(msg)}; };
  if (line.tables.size() != sig.tables) {
    return bad(std::string(op_name(line.op)) + " takes " + std::to_string(sig.tables) + " tables");
  }
  const bool wants_filter = sig.condition == ArgKind::FilterCondition;
  const bool wants_join =
      sig.condition == ArgKind::JoinCondition || sig.condition == ArgKind::CrossJoinCondition;
  const bool wants_aggregate = sig.condition == ArgKind::SummariseCondition;
  if (line.filter.has_value() != wants_filter || line.join.has_value() != wants_join ||
      line.aggregate.has_value() != wants_aggregate) {
    return bad("condition argument does not match " + std::string(op_name(line.op)));
  }
  if (wants_filter && (line.filter->atoms.empty() || line.filter->atoms.size() > 2)) {
    return bad("filter conditions have one or two atoms");
  }
  if (wants_aggregate) {
    const auto& agg = *line.aggregate;
    if (line.op == Op::summarise && is_window(agg.fn)) {
      return bad(std::string(aggregate_name(agg.fn)) + " is row-preserving, not usable in summarise");
    }
    if (takes_column(agg.fn) == agg.input.empty()) return bad("aggregate input mismatch");
    if (agg.output.empty()) return bad("aggregate without output name");
  }
  if (!sig.columns && !line.cols.empty()) return bad("unexpected column list");
  if (sig.columns == ArgKind::Col && line.cols.size() != 1) return bad("intersect takes one column");
  return std::nullopt;
}

}  // namespace

Validation validate(const Program& p, const std::map<std::string, ColumnNames, std::less<>>& inputs) {
  Validation v;
  auto fail = [&](std::size_t line, std::string rule, std::vector<std::string> missing, std::string msg) {
    v.errors.push_back(RuleViolation{line, std::move(rule), std::move(missing), std::move(msg)});
    return v;
  };
  if (p.lines.empty()) return fail(0, "EmptyProgram", {}, "program has no lines");

  std::map<std::string, ColumnNames, std::less<>> env = inputs;
  for (std::size_t i = 0; i < p.lines.size(); ++i) {
    const Line& line = p.lines[i];
    if (auto bad = check_arguments(line)) {
      bad->line = i;
      return fail(i, bad->rule, {}, bad->message);
    }
    if (line.output.empty() || env.contains(line.output)) {
      return fail(i, "DuplicateOutput", {}, "output name '" + line.output + "' already defined");
    }
    std::vector<const ColumnNames*> t;
    for (const auto& name : line.tables) {
      auto it = env.find(name);
      if (it == env.end()) return fail(i, "UnknownTable", {name}, "table '" + name + "' is not defined");
      t.push_back(&it->second);
    }

    ColumnNames out;
    auto require = [&](const char* rule, const std::vector<std::string>& needed, const ColumnNames& have,
                       const char* what) -> bool {
      auto miss = missing_from(needed, have);
      if (miss.empty()) return true;
      fail(i, rule, miss, std::string(what));
      return false;
    };

    switch (line.op) {
      case Op::natural_join:
      case Op::natural_join3:
      case Op::natural_join4:
      case Op::union_all:
        for (const auto* s : t) out.insert(s->begin(), s->end());
        break;
      case Op::left_join:
        if (intersection(*t[0], *t[1]).empty()) {
          return fail(i, "LeftJoin", {}, "operands share no column");
        }
        out = *t[0];
        out.insert(t[1]->begin(), t[1]->end());
        break;
      case Op::inner_join:
        if (!require("InnerJoin", {line.join->left}, *t[0], "join column missing from first table") ||
            !require("InnerJoin", {line.join->right}, *t[1], "join column missing from second table")) {
          return v;
        }
        out = *t[0];
        out.insert(t[1]->begin(), t[1]->end());
        break;
      case Op::cross_join:
        if (!require("CrossJoin", {line.join->left}, *t[0], "condition column missing from first table") ||
            !require("CrossJoin", {line.join->right}, intersection(*t[0], *t[1]),
                     "condition column not present in both tables")) {
          return v;
        }
        out = *t[0];
        out.insert(t[1]->begin(), t[1]->end());
        break;
      case Op::filter:
        if (!require("Filter", line.filter->columns(), *t[0], "filter column missing")) return v;
        out = *t[0];
        break;
      case Op::summarise: {
        const auto& agg = *line.aggregate;
        std::vector<std::string> used;
        if (!agg.input.empty()) used.push_back(agg.input);
        if (!require("Summarise", used, *t[0], "aggregated column missing") ||
            !require("Summarise", line.cols, *t[0], "group column missing")) {
          return v;
        }
        if (std::find(line.cols.begin(), line.cols.end(), agg.output) != line.cols.end()) {
          return fail(i, "Summarise", {}, "group columns overlap the generated column");
        }
        out.insert(line.cols.begin(), line.cols.end());
        out.insert(agg.output);
        break;
      }
      case Op::mutate: {
        const auto& agg = *line.aggregate;
        std::vector<std::string> used;
        if (!agg.input.empty()) used.push_back(agg.input);
        if (!require("Mutate", used, *t[0], "aggregated column missing")) return v;
        out = *t[0];
        out.insert(agg.output);
        break;
      }
      case Op::anti_join:
        if (!require("AntiJoin", line.cols, *t[0], "column missing from first table") ||
            !require("AntiJoin", line.cols, *t[1], "column missing from second table")) {
          return v;
        }
        if (line.cols.empty() && intersection(*t[0], *t[1]).empty()) {
          return fail(i, "AntiJoin", {}, "no columns given and operands share none");
        }
        out = *t[0];
        break;
      case Op::semi_join:
        if (intersection(*t[0], *t[1]).empty()) return fail(i, "SemiJoin", {}, "operands share no column");
        out = *t[0];
        break;
      case Op::intersect:
        if (!require("Intersect", line.cols, *t[0], "column missing from first table") ||
            !require("Intersect", line.cols, *t[1], "column missing from second table")) {
          return v;
        }
        out.insert(line.cols.begin(), line.cols.end());
        break;
    }
    v.line_columns.push_back(out);
    env.emplace(line.output, std::move(out));
  }
  return v;
}

Validation validate(const Program& p, const Database& inputs) {
  std::map<std::string, ColumnNames, std::less<>> cols;
  for (const auto& t : inputs) {
    auto names = t.table->schema.names();
    cols.emplace(t.name, ColumnNames(names.begin(), names.end()));
  }
  return validate(p, cols);
}

}  // namespace sqlpbe
