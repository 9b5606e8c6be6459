#include "sqlpbe/sql.hpp"

#include <algorithm>

namespace sqlpbe {

std::string quote_identifier(std::string_view name) {
  std::string out = "\"";
  for (char c : name) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string sql_literal(const Value& v) {
  switch (v.type()) {
    case ValueType::Null: return "NULL";
    case ValueType::Integer: return std::to_string(v.as_integer());
    case ValueType::Real: return format_real(v.as_real());
    case ValueType::Boolean: return v.as_boolean() ? "1" : "0";
    case ValueType::Text:
    case ValueType::DateTime: {
      const std::string& s = v.type() == ValueType::Text ? v.as_text() : v.as_datetime().iso;
      std::string out = "'";
      for (char c : s) {
        if (c == '\'') out += '\'';
        out += c;
      }
      return out + "'";
    }
  }
  return "NULL";
}

namespace {

using SchemaMap = std::map<std::string, Schema, std::less<>>;

/// One SELECT: output items plus everything after the select list. Compound
/// queries (UNION ALL, INTERSECT) cannot take a new select list and are kept
/// whole in `text`.
struct Select {
  std::vector<std::pair<std::string, std::string>> items;  // expression, output name
  std::string rest;
  bool star = false;
  std::string text;
};

std::string q(std::string_view s) { return quote_identifier(s); }

std::string render_items(const Select& s, const std::vector<std::pair<std::string, std::string>>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    const auto& [expr, name] = items[i];
    out += expr;
    if (expr != q(name)) out += " AS " + q(name);
  }
  (void)s;
  return out;
}

std::string render(const Select& s) {
  if (!s.text.empty()) return s.text;
  std::string out = "SELECT " + (s.star ? std::string("*") : render_items(s, s.items));
  return s.rest.empty() ? out : out + " " + s.rest;
}

std::vector<std::pair<std::string, std::string>> plain_items(const Schema& schema) {
  std::vector<std::pair<std::string, std::string>> items;
  for (const auto& c : schema) items.emplace_back(q(c.name), c.name);
  return items;
}

std::string atom_sql(const Atom& a) {
  std::string op = a.cmp == CmpOp::eq ? "=" : std::string(cmp_symbol(a.cmp));
  std::string rhs;
  if (auto* ref = std::get_if<ColumnRef>(&a.rhs)) {
    rhs = q(ref->name);
  } else {
    rhs = sql_literal(std::get<Value>(a.rhs));
  }
  return q(a.column) + " " + op + " " + rhs;
}

std::string filter_sql(const FilterCondition& c) {
  std::string out;
  for (std::size_t i = 0; i < c.atoms.size(); ++i) {
    if (i) out += c.connective == Connective::And ? " AND " : " OR ";
    out += atom_sql(c.atoms[i]);
  }
  return c.atoms.size() > 1 ? "(" + out + ")" : out;
}

/// Matches the inner alias `m` to the outer alias `t` on the group columns.
std::string group_match(const std::vector<std::string>& cols) {
  std::string out;
  for (const auto& c : cols) out += "m." + q(c) + " IS t." + q(c) + " AND ";
  return out;
}

/// Reducing aggregate over `from` (optionally restricted to the group of the
/// outer row aliased `t`).
std::string reduce_sql(const SummariseCondition& a, const std::string& from, const std::vector<std::string>& group,
                       bool correlated) {
  const std::string x = q(a.input);
  switch (a.fn) {
    case AggregateFn::n: return "count(*)";
    case AggregateFn::n_distinct: return "count(DISTINCT " + x + ")";
    case AggregateFn::sum: return "sum(" + x + ")";
    case AggregateFn::mean: return "avg(" + x + ")";
    case AggregateFn::min: return "min(" + x + ")";
    case AggregateFn::max: return "max(" + x + ")";
    case AggregateFn::str_count: return "count(" + x + ")";
    case AggregateFn::mode: {
      const std::string where = (correlated ? group_match(group) : std::string()) + "m." + x + " IS NOT NULL";
      return "(SELECT m." + x + " FROM " + from + " AS m WHERE " + where + " GROUP BY m." + x +
             " ORDER BY count(*) DESC, m." + x + " LIMIT 1)";
    }
    case AggregateFn::median: {
      const std::string where = (correlated ? group_match(group) : std::string()) + "m." + x + " IS NOT NULL";
      return "(SELECT avg(v) FROM (SELECT m." + x + " AS v, row_number() OVER (ORDER BY m." + x +
             ") AS rn, count(*) OVER () AS cnt FROM " + from + " AS m WHERE " + where +
             ") WHERE rn IN ((cnt + 1) / 2, (cnt + 2) / 2))";
    }
    default: break;
  }
  throw SqlError(std::string(aggregate_name(a.fn)) + " is not a reducing function");
}

std::string window_sql(const SummariseCondition& a) {
  const std::string x = q(a.input);
  switch (a.fn) {
    case AggregateFn::cumsum: return "sum(" + x + ") OVER (ROWS UNBOUNDED PRECEDING)";
    case AggregateFn::pmin: return "min(" + x + ") OVER (ROWS UNBOUNDED PRECEDING)";
    case AggregateFn::pmax: return "max(" + x + ") OVER (ROWS UNBOUNDED PRECEDING)";
    case AggregateFn::lead: return "lead(" + x + ") OVER ()";
    case AggregateFn::lag: return "lag(" + x + ") OVER ()";
    case AggregateFn::rank: return "rank() OVER (ORDER BY " + x + ")";
    case AggregateFn::row_number: return "row_number() OVER ()";
    default: break;
  }
  throw SqlError(std::string(aggregate_name(a.fn)) + " is not a window function");
}

std::string key_match(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += " AND ";
    out += "l." + q(cols[i]) + " = r." + q(cols[i]);
  }
  return out;
}

Select translate(const Line& line, const SchemaMap& schemas) {
  std::vector<const Schema*> in;
  std::vector<std::string> from;
  for (const auto& t : line.tables) {
    in.push_back(&schemas.at(t));
    from.push_back(q(t));
  }
  const Schema out_schema = result_schema(line, schemas);
  Select s;
  s.items = plain_items(out_schema);

  switch (line.op) {
    case Op::natural_join:
    case Op::natural_join3:
    case Op::natural_join4: {
      s.star = true;
      s.rest = "FROM " + from[0];
      for (std::size_t i = 1; i < from.size(); ++i) s.rest += " NATURAL JOIN " + from[i];
      return s;
    }
    case Op::left_join:
      s.star = true;
      s.rest = "FROM " + from[0] + " NATURAL LEFT JOIN " + from[1];
      return s;
    case Op::inner_join:
    case Op::cross_join: {
      s.items.clear();
      for (const auto& c : *in[0]) s.items.emplace_back("l." + q(c.name), c.name);
      for (const auto& c : *in[1]) {
        if (!in[0]->contains(c.name)) s.items.emplace_back("r." + q(c.name), c.name);
      }
      const std::string cond = "l." + q(line.join->left) + " = r." + q(line.join->right);
      if (line.op == Op::inner_join) {
        s.rest = "FROM " + from[0] + " AS l JOIN " + from[1] + " AS r ON " + cond;
      } else {
        s.rest = "FROM " + from[0] + " AS l CROSS JOIN " + from[1] + " AS r WHERE " + cond;
      }
      return s;
    }
    case Op::filter:
      s.star = true;
      s.rest = "FROM " + from[0] + " WHERE " + filter_sql(*line.filter);
      return s;
    case Op::summarise: {
      const auto& a = *line.aggregate;
      const bool sub = a.fn == AggregateFn::mode || a.fn == AggregateFn::median;
      s.items.clear();
      std::string group_by;
      for (const auto& c : line.cols) {
        s.items.emplace_back(q(c), c);
        group_by += (group_by.empty() ? " GROUP BY " : ", ") + q(c);
      }
      s.items.emplace_back(reduce_sql(a, from[0], line.cols, !line.cols.empty()), a.output);
      // A bare subquery already yields one row; a FROM would repeat it per row.
      if (!(sub && line.cols.empty())) s.rest = "FROM " + from[0] + (sub ? " AS t" : "") + group_by;
      return s;
    }
    case Op::mutate: {
      const auto& a = *line.aggregate;
      std::string expr;
      if (is_window(a.fn)) {
        expr = window_sql(a);
      } else if (a.fn == AggregateFn::mode || a.fn == AggregateFn::median) {
        expr = reduce_sql(a, from[0], {}, false);
      } else {
        expr = "(SELECT " + reduce_sql(a, from[0], {}, false) + " FROM " + from[0] + ")";
      }
      for (auto& item : s.items) {
        if (item.second == a.output) item.first = expr;
      }
      s.rest = "FROM " + from[0];
      return s;
    }
    case Op::anti_join:
    case Op::semi_join: {
      std::vector<std::string> keys = line.cols;
      if (keys.empty()) {
        for (const auto& c : *in[0]) {
          if (in[1]->contains(c.name)) keys.push_back(c.name);
        }
      }
      s.items.clear();
      for (const auto& c : *in[0]) s.items.emplace_back("l." + q(c.name), c.name);
      s.rest = "FROM " + from[0] + " AS l WHERE " + (line.op == Op::anti_join ? "NOT " : "") +
               "EXISTS (SELECT 1 FROM " + from[1] + " AS r WHERE " + key_match(keys) + ")";
      return s;
    }
    case Op::union_all: {
      auto side = [&](const Schema& schema, const std::string& table) {
        std::string list;
        for (const auto& c : out_schema) {
          if (!list.empty()) list += ", ";
          list += schema.contains(c.name) ? q(c.name) : "NULL AS " + q(c.name);
        }
        return "SELECT " + list + " FROM " + table;
      };
      s.text = side(*in[0], from[0]) + " UNION ALL " + side(*in[1], from[1]);
      return s;
    }
    case Op::intersect: {
      const std::string c = q(line.cols.front());
      s.text = "SELECT " + c + " FROM " + from[0] + " INTERSECT SELECT " + c + " FROM " + from[1];
      return s;
    }
  }
  throw SqlError("unknown operation");
}

}  // namespace

std::string to_sql(const Program& p, const Database& inputs, const Projection& projection) {
  if (p.lines.empty()) throw SqlError("empty program");
  SchemaMap schemas;
  for (const auto& t : inputs) schemas.emplace(t.name, t.table->schema);

  std::string with;
  for (std::size_t i = 0; i + 1 < p.lines.size(); ++i) {
    const Line& line = p.lines[i];
    with += (with.empty() ? "WITH " : ", ") + q(line.output) + " AS (" + render(translate(line, schemas)) + ")";
    schemas.emplace(line.output, result_schema(line, schemas));
  }
  const Line& last = p.lines.back();
  Select s = translate(last, schemas);
  const Schema out = result_schema(last, schemas);
  std::string body;
  if (projection.is_identity(out)) {
    body = render(s);
  } else if (s.text.empty()) {
    std::vector<std::pair<std::string, std::string>> items;
    for (std::size_t k = 0; k < projection.source.size(); ++k) {
      items.emplace_back(s.items.at(projection.source[k]).first, projection.names[k]);
    }
    s.star = false;
    body = "SELECT " + render_items(s, items) + (s.rest.empty() ? "" : " " + s.rest);
  } else {
    std::vector<std::pair<std::string, std::string>> items;
    for (std::size_t k = 0; k < projection.source.size(); ++k) {
      items.emplace_back(q(out[projection.source.at(k)].name), projection.names[k]);
    }
    body = "SELECT " + render_items(s, items) + " FROM (" + s.text + ")";
  }
  return with.empty() ? body : with + " " + body;
}

std::string to_sql(const Program& p, const Database& inputs) {
  if (p.lines.empty()) throw SqlError("empty program");
  SchemaMap schemas;
  for (const auto& t : inputs) schemas.emplace(t.name, t.table->schema);
  for (std::size_t i = 0; i + 1 < p.lines.size(); ++i) {
    schemas.emplace(p.lines[i].output, result_schema(p.lines[i], schemas));
  }
  return to_sql(p, inputs, Projection::identity(result_schema(p.lines.back(), schemas)));
}

}  // namespace sqlpbe
