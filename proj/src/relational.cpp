#include "sqlpbe/relational.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace sqlpbe {

namespace {

[[noreturn]] void raise(EngineErrorKind kind, const std::string& msg) { throw EngineError(kind, msg); }

const Table& lookup(const Env& env, const std::string& name) {
  auto it = env.find(name);
  if (it == env.end() || !it->second) raise(EngineErrorKind::UnknownTable, name);
  return *it->second;
}

std::size_t column_of(const Table& t, const std::string& name) {
  auto idx = t.schema.index_of(name);
  if (!idx) raise(EngineErrorKind::UnknownColumn, "'" + name + "'");
  return *idx;
}

struct KeyHash {
  std::size_t operator()(const Row& r) const {
    std::size_t h = r.size();
    for (const auto& v : r) h = h * 1099511628211ULL ^ ValueHash{}(v);
    return h;
  }
};

using KeyIndex = std::unordered_map<Row, std::vector<std::size_t>, KeyHash>;
using KeySet = std::unordered_set<Row, KeyHash>;

bool has_null(const Row& key) {
  return std::any_of(key.begin(), key.end(), [](const Value& v) { return v.is_null(); });
}

Row extract(const Row& row, const std::vector<std::size_t>& idx) {
  Row key;
  key.reserve(idx.size());
  for (auto i : idx) key.push_back(row[i]);
  return key;
}

struct SharedColumns {
  std::vector<std::size_t> left;
  std::vector<std::size_t> right;
};

SharedColumns shared_columns(const Schema& a, const Schema& b) {
  SharedColumns s;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (auto i = a.index_of(b[j].name)) {
      s.left.push_back(*i);
      s.right.push_back(j);
    }
  }
  return s;
}

void require_comparable(const Schema& a, const std::vector<std::size_t>& ai, const Schema& b,
                        const std::vector<std::size_t>& bi) {
  for (std::size_t k = 0; k < ai.size(); ++k) {
    if (!comparable(a[ai[k]].type, b[bi[k]].type)) {
      raise(EngineErrorKind::TypeMismatch, "cannot match " + a[ai[k]].name + " (" +
                                               std::string(type_name(a[ai[k]].type)) + ") with " +
                                               b[bi[k]].name + " (" +
                                               std::string(type_name(b[bi[k]].type)) + ")");
    }
  }
}

/// Columns of `b` whose names do not occur in `a`.
std::vector<std::size_t> extra_columns(const Schema& a, const Schema& b) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!a.contains(b[j].name)) out.push_back(j);
  }
  return out;
}

Schema concat_schema(const Schema& a, const Schema& b, const std::vector<std::size_t>& b_extra) {
  std::vector<Column> cols = a.columns();
  for (auto j : b_extra) cols.push_back(b[j]);
  return Schema(std::move(cols));
}

Row concat_row(const Row& a, const Row* b, const std::vector<std::size_t>& b_extra) {
  Row out;
  out.reserve(a.size() + b_extra.size());
  out.insert(out.end(), a.begin(), a.end());
  for (auto j : b_extra) out.push_back(b ? (*b)[j] : Value::null());
  return out;
}

KeyIndex index_rows(const Table& t, const std::vector<std::size_t>& key_cols) {
  KeyIndex idx;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    Row key = extract(t.rows[r], key_cols);
    if (has_null(key)) continue;
    idx[std::move(key)].push_back(r);
  }
  return idx;
}

Table natural_join(const Table& a, const Table& b, bool keep_unmatched) {
  const auto shared = shared_columns(a.schema, b.schema);
  if (keep_unmatched && shared.left.empty()) {
    raise(EngineErrorKind::ColumnConflict, "left_join operands share no column");
  }
  require_comparable(a.schema, shared.left, b.schema, shared.right);
  const auto extra = extra_columns(a.schema, b.schema);
  Table out{concat_schema(a.schema, b.schema, extra), {}};
  const KeyIndex idx = index_rows(b, shared.right);
  for (const auto& row : a.rows) {
    Row key = extract(row, shared.left);
    const std::vector<std::size_t>* matches = nullptr;
    if (!has_null(key)) {
      if (auto it = idx.find(key); it != idx.end()) matches = &it->second;
    }
    if (matches) {
      for (auto j : *matches) out.rows.push_back(concat_row(row, &b.rows[j], extra));
    } else if (keep_unmatched) {
      out.rows.push_back(concat_row(row, nullptr, extra));
    }
  }
  return out;
}

Table condition_join(const Table& a, const Table& b, const JoinCondition& cond, bool cross) {
  const std::size_t ia = column_of(a, cond.left);
  const std::size_t ib = column_of(b, cond.right);
  if (cross && !a.schema.contains(cond.right)) {
    raise(EngineErrorKind::UnknownColumn, "'" + cond.right + "' must occur in both cross_join operands");
  }
  require_comparable(a.schema, {ia}, b.schema, {ib});
  const auto extra = extra_columns(a.schema, b.schema);
  Table out{concat_schema(a.schema, b.schema, extra), {}};
  const KeyIndex idx = index_rows(b, {ib});
  for (const auto& row : a.rows) {
    if (row[ia].is_null()) continue;
    auto it = idx.find(Row{row[ia]});
    if (it == idx.end()) continue;
    for (auto j : it->second) out.rows.push_back(concat_row(row, &b.rows[j], extra));
  }
  return out;
}

bool compare_holds(CmpOp op, const Value& l, const Value& r) {
  if (l.is_null() || r.is_null()) return false;
  const auto c = compare(l, r);
  switch (op) {
    case CmpOp::eq: return c == 0;
    case CmpOp::ne: return c != 0;
    case CmpOp::lt: return c < 0;
    case CmpOp::le: return c <= 0;
    case CmpOp::gt: return c > 0;
    case CmpOp::ge: return c >= 0;
  }
  return false;
}

Table filter(const Table& t, const FilterCondition& cond) {
  struct Resolved {
    std::size_t column;
    CmpOp cmp;
    std::optional<std::size_t> rhs_column;
    Value constant;
  };
  std::vector<Resolved> atoms;
  for (const auto& atom : cond.atoms) {
    Resolved r{column_of(t, atom.column), atom.cmp, std::nullopt, {}};
    ValueType rhs_type;
    if (auto* ref = std::get_if<ColumnRef>(&atom.rhs)) {
      r.rhs_column = column_of(t, ref->name);
      rhs_type = t.schema[*r.rhs_column].type;
    } else {
      r.constant = std::get<Value>(atom.rhs);
      rhs_type = r.constant.type();
    }
    if (!comparable(t.schema[r.column].type, rhs_type)) {
      raise(EngineErrorKind::TypeMismatch, "filter compares " + atom.column + " (" +
                                               std::string(type_name(t.schema[r.column].type)) +
                                               ") with " + std::string(type_name(rhs_type)));
    }
    atoms.push_back(std::move(r));
  }
  Table out{t.schema, {}};
  for (const auto& row : t.rows) {
    auto holds = [&](const Resolved& a) {
      return compare_holds(a.cmp, row[a.column], a.rhs_column ? row[*a.rhs_column] : a.constant);
    };
    bool keep = cond.connective == Connective::And ? std::all_of(atoms.begin(), atoms.end(), holds)
                                                   : std::any_of(atoms.begin(), atoms.end(), holds);
    if (keep) out.rows.push_back(row);
  }
  return out;
}

Value checked_sum(const std::vector<Value>& vals, ValueType result) {
  bool any = false;
  std::int64_t isum = 0;
  double dsum = 0;
  for (const auto& v : vals) {
    if (v.is_null()) continue;
    any = true;
    if (result == ValueType::Integer) {
      if (__builtin_add_overflow(isum, v.as_integer(), &isum)) raise(EngineErrorKind::Overflow, "integer sum");
    } else {
      dsum += *v.numeric();
    }
  }
  if (!any) return Value::null();
  return result == ValueType::Integer ? Value::integer(isum) : Value::real(dsum);
}

Value reduce(AggregateFn fn, const std::vector<Value>& vals, std::size_t group_rows, ValueType result) {
  std::vector<Value> present;
  present.reserve(vals.size());
  for (const auto& v : vals) {
    if (!v.is_null()) present.push_back(v);
  }
  switch (fn) {
    case AggregateFn::n: return Value::integer(static_cast<std::int64_t>(group_rows));
    case AggregateFn::str_count: return Value::integer(static_cast<std::int64_t>(present.size()));
    case AggregateFn::n_distinct: {
      std::set<Value, ValueLess> distinct(present.begin(), present.end());
      return Value::integer(static_cast<std::int64_t>(distinct.size()));
    }
    case AggregateFn::sum: return checked_sum(vals, result);
    case AggregateFn::mean: {
      if (present.empty()) return Value::null();
      double s = 0;
      for (const auto& v : present) s += *v.numeric();
      return Value::real(s / static_cast<double>(present.size()));
    }
    case AggregateFn::min:
    case AggregateFn::max: {
      if (present.empty()) return Value::null();
      auto it = fn == AggregateFn::min ? std::min_element(present.begin(), present.end(), ValueLess{})
                                       : std::max_element(present.begin(), present.end(), ValueLess{});
      return *it;
    }
    case AggregateFn::mode: {
      if (present.empty()) return Value::null();
      std::map<Value, std::size_t, ValueLess> counts;
      for (const auto& v : present) ++counts[v];
      auto best = counts.begin();
      for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (it->second > best->second) best = it;
      }
      return best->first;
    }
    case AggregateFn::median: {
      if (present.empty()) return Value::null();
      std::vector<double> xs;
      for (const auto& v : present) xs.push_back(*v.numeric());
      std::sort(xs.begin(), xs.end());
      const std::size_t m = xs.size() / 2;
      return Value::real(xs.size() % 2 ? xs[m] : (xs[m - 1] + xs[m]) / 2.0);
    }
    default: break;
  }
  raise(EngineErrorKind::ArityError, std::string(aggregate_name(fn)) + " is not a reducing function");
}

std::vector<Value> window(AggregateFn fn, const std::vector<Value>& vals, ValueType result) {
  const std::size_t n = vals.size();
  std::vector<Value> out(n);
  switch (fn) {
    case AggregateFn::row_number:
      for (std::size_t i = 0; i < n; ++i) out[i] = Value::integer(static_cast<std::int64_t>(i + 1));
      break;
    case AggregateFn::lead:
      for (std::size_t i = 0; i + 1 < n; ++i) out[i] = vals[i + 1];
      break;
    case AggregateFn::lag:
      for (std::size_t i = 1; i < n; ++i) out[i] = vals[i - 1];
      break;
    case AggregateFn::cumsum: {
      bool any = false;
      std::int64_t isum = 0;
      double dsum = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (!vals[i].is_null()) {
          any = true;
          if (result == ValueType::Integer) {
            if (__builtin_add_overflow(isum, vals[i].as_integer(), &isum)) {
              raise(EngineErrorKind::Overflow, "integer cumsum");
            }
          } else {
            dsum += *vals[i].numeric();
          }
        }
        if (any) out[i] = result == ValueType::Integer ? Value::integer(isum) : Value::real(dsum);
      }
      break;
    }
    case AggregateFn::pmin:
    case AggregateFn::pmax: {
      std::optional<Value> acc;
      for (std::size_t i = 0; i < n; ++i) {
        if (!vals[i].is_null()) {
          const bool better = !acc || (fn == AggregateFn::pmin ? compare(vals[i], *acc) < 0
                                                               : compare(vals[i], *acc) > 0);
          if (better) acc = vals[i];
        }
        if (acc) out[i] = *acc;
      }
      break;
    }
    case AggregateFn::rank: {
      std::vector<Value> sorted = vals;
      std::sort(sorted.begin(), sorted.end(), ValueLess{});
      for (std::size_t i = 0; i < n; ++i) {
        auto below = std::lower_bound(sorted.begin(), sorted.end(), vals[i], ValueLess{}) - sorted.begin();
        out[i] = Value::integer(static_cast<std::int64_t>(below + 1));
      }
      break;
    }
    default: raise(EngineErrorKind::ArityError, std::string(aggregate_name(fn)) + " is not a window function");
  }
  return out;
}

struct AggregateInput {
  std::optional<std::size_t> column;
  ValueType result;
};

AggregateInput resolve_aggregate(const Table& t, const SummariseCondition& agg) {
  AggregateInput in{std::nullopt, ValueType::Integer};
  ValueType input_type = ValueType::Null;
  if (takes_column(agg.fn)) {
    if (agg.input.empty()) raise(EngineErrorKind::ArityError, std::string(aggregate_name(agg.fn)) + " needs a column");
    in.column = column_of(t, agg.input);
    input_type = t.schema[*in.column].type;
  }
  auto rt = aggregate_result_type(agg.fn, input_type);
  if (!rt) {
    raise(EngineErrorKind::TypeMismatch, std::string(aggregate_name(agg.fn)) + " does not apply to " +
                                             std::string(type_name(input_type)));
  }
  in.result = *rt;
  return in;
}

std::vector<Value> column_values(const Table& t, const std::vector<std::size_t>& rows,
                                 std::optional<std::size_t> col) {
  std::vector<Value> out;
  if (!col) return out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(t.rows[r][*col]);
  return out;
}

Table summarise(const Table& t, const SummariseCondition& agg, const std::vector<std::string>& cols) {
  if (is_window(agg.fn)) {
    raise(EngineErrorKind::ArityError, std::string(aggregate_name(agg.fn)) + " cannot be used in summarise");
  }
  const AggregateInput in = resolve_aggregate(t, agg);
  std::vector<std::size_t> group_cols;
  for (const auto& c : cols) group_cols.push_back(column_of(t, c));
  if (std::find(cols.begin(), cols.end(), agg.output) != cols.end()) {
    raise(EngineErrorKind::ColumnConflict, "group column '" + agg.output + "' is also generated");
  }

  std::vector<Column> schema;
  for (auto c : group_cols) schema.push_back(t.schema[c]);
  schema.push_back(Column{agg.output, in.result});
  Table out{Schema(std::move(schema)), {}};

  std::vector<std::vector<std::size_t>> groups;
  if (group_cols.empty()) {
    groups.emplace_back(t.rows.size());
    std::iota(groups.back().begin(), groups.back().end(), std::size_t{0});
  } else {
    std::unordered_map<Row, std::size_t, KeyHash> slot;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      auto [it, inserted] = slot.try_emplace(extract(t.rows[r], group_cols), groups.size());
      if (inserted) groups.emplace_back();
      groups[it->second].push_back(r);
    }
  }
  for (const auto& g : groups) {
    Row row = g.empty() ? Row(group_cols.size()) : extract(t.rows[g.front()], group_cols);
    row.push_back(reduce(agg.fn, column_values(t, g, in.column), g.size(), in.result));
    out.rows.push_back(std::move(row));
  }
  return out;
}

Table mutate(const Table& t, const SummariseCondition& agg) {
  const AggregateInput in = resolve_aggregate(t, agg);
  std::vector<std::size_t> all(t.rows.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<Value> vals = column_values(t, all, in.column);
  if (!in.column) vals.assign(t.rows.size(), Value::null());

  std::vector<Value> computed;
  if (is_window(agg.fn)) {
    computed = window(agg.fn, vals, in.result);
  } else {
    computed.assign(t.rows.size(), reduce(agg.fn, vals, t.rows.size(), in.result));
  }

  std::vector<Column> cols = t.schema.columns();
  const auto existing = t.schema.index_of(agg.output);
  if (existing) {
    cols[*existing].type = in.result;
  } else {
    cols.push_back(Column{agg.output, in.result});
  }
  Table out{Schema(std::move(cols)), t.rows};
  for (std::size_t r = 0; r < out.rows.size(); ++r) {
    if (existing) {
      out.rows[r][*existing] = computed[r];
    } else {
      out.rows[r].push_back(computed[r]);
    }
  }
  return out;
}

Table semi_or_anti(const Table& a, const Table& b, const std::vector<std::string>& cols, bool anti) {
  SharedColumns keys;
  if (cols.empty()) {
    keys = shared_columns(a.schema, b.schema);
    if (keys.left.empty()) {
      raise(EngineErrorKind::ColumnConflict, std::string(anti ? "anti_join" : "semi_join") +
                                                 " operands share no column");
    }
  } else {
    for (const auto& c : cols) {
      keys.left.push_back(column_of(a, c));
      keys.right.push_back(column_of(b, c));
    }
  }
  require_comparable(a.schema, keys.left, b.schema, keys.right);
  KeySet present;
  for (const auto& row : b.rows) {
    Row key = extract(row, keys.right);
    if (!has_null(key)) present.insert(std::move(key));
  }
  Table out{a.schema, {}};
  for (const auto& row : a.rows) {
    Row key = extract(row, keys.left);
    const bool matched = !has_null(key) && present.contains(key);
    if (matched != anti) out.rows.push_back(row);
  }
  return out;
}

Value promote(const Value& v, ValueType target) {
  if (target == ValueType::Real && v.type() == ValueType::Integer) {
    return Value::real(static_cast<double>(v.as_integer()));
  }
  return v;
}

ValueType merged_type(const Column& a, const Column& b) {
  if (!comparable(a.type, b.type)) {
    raise(EngineErrorKind::NonUnionCompatible, "column " + a.name + " is " + std::string(type_name(a.type)) +
                                                   " and " + std::string(type_name(b.type)));
  }
  return a.type == b.type ? a.type : ValueType::Real;
}

Table union_all(const Table& a, const Table& b) {
  std::vector<Column> cols = a.schema.columns();
  std::vector<std::optional<std::size_t>> from_b(cols.size());
  for (std::size_t i = 0; i < cols.size(); ++i) {
    from_b[i] = b.schema.index_of(cols[i].name);
    if (from_b[i]) cols[i].type = merged_type(cols[i], b.schema[*from_b[i]]);
  }
  const auto extra = extra_columns(a.schema, b.schema);
  for (auto j : extra) {
    cols.push_back(b.schema[j]);
    from_b.push_back(j);
  }
  Table out{Schema(cols), {}};
  out.rows.reserve(a.rows.size() + b.rows.size());
  for (const auto& row : a.rows) {
    Row r;
    r.reserve(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      r.push_back(i < row.size() ? promote(row[i], cols[i].type) : Value::null());
    }
    out.rows.push_back(std::move(r));
  }
  for (const auto& row : b.rows) {
    Row r;
    r.reserve(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
      r.push_back(from_b[i] ? promote(row[*from_b[i]], cols[i].type) : Value::null());
    }
    out.rows.push_back(std::move(r));
  }
  return out;
}

Table intersect(const Table& a, const Table& b, const std::string& col) {
  const std::size_t ia = column_of(a, col);
  const std::size_t ib = column_of(b, col);
  const ValueType type = merged_type(a.schema[ia], b.schema[ib]);
  std::unordered_set<Value, ValueHash> in_b;
  for (const auto& row : b.rows) in_b.insert(row[ib]);
  std::unordered_set<Value, ValueHash> seen;
  Table out{Schema({Column{col, type}}), {}};
  for (const auto& row : a.rows) {
    const Value& v = row[ia];
    if (in_b.contains(v) && seen.insert(v).second) out.rows.push_back(Row{promote(v, type)});
  }
  return out;
}

}  // namespace

Env make_env(const Database& db) {
  Env env;
  for (const auto& t : db) env.emplace(t.name, t.table);
  return env;
}

Table apply_line(const Line& line, const Env& env) {
  const auto sig = signature(line.op);
  if (line.tables.size() != sig.tables) {
    raise(EngineErrorKind::ArityError, std::string(op_name(line.op)) + " takes " +
                                           std::to_string(sig.tables) + " tables");
  }
  std::vector<const Table*> t;
  for (const auto& name : line.tables) t.push_back(&lookup(env, name));

  auto need_filter = [&]() -> const FilterCondition& {
    if (!line.filter || line.filter->atoms.empty()) raise(EngineErrorKind::ArityError, "filter condition missing");
    return *line.filter;
  };
  auto need_join = [&]() -> const JoinCondition& {
    if (!line.join) raise(EngineErrorKind::ArityError, "join condition missing");
    return *line.join;
  };
  auto need_aggregate = [&]() -> const SummariseCondition& {
    if (!line.aggregate) raise(EngineErrorKind::ArityError, "summarise condition missing");
    return *line.aggregate;
  };

  switch (line.op) {
    case Op::natural_join: return natural_join(*t[0], *t[1], false);
    case Op::natural_join3: return natural_join(natural_join(*t[0], *t[1], false), *t[2], false);
    case Op::natural_join4:
      return natural_join(natural_join(natural_join(*t[0], *t[1], false), *t[2], false), *t[3], false);
    case Op::left_join: return natural_join(*t[0], *t[1], true);
    case Op::inner_join: return condition_join(*t[0], *t[1], need_join(), false);
    case Op::cross_join: return condition_join(*t[0], *t[1], need_join(), true);
    case Op::filter: return filter(*t[0], need_filter());
    case Op::summarise: return summarise(*t[0], need_aggregate(), line.cols);
    case Op::mutate: return mutate(*t[0], need_aggregate());
    case Op::anti_join: return semi_or_anti(*t[0], *t[1], line.cols, true);
    case Op::semi_join: return semi_or_anti(*t[0], *t[1], {}, false);
    case Op::union_all: return union_all(*t[0], *t[1]);
    case Op::intersect:
      if (line.cols.size() != 1) raise(EngineErrorKind::ArityError, "intersect takes one column");
      return intersect(*t[0], *t[1], line.cols.front());
  }
  raise(EngineErrorKind::ArityError, "unknown operation");
}

Table run_program(const Program& p, const Database& db) {
  if (p.lines.empty()) raise(EngineErrorKind::ArityError, "empty program");
  Env env = make_env(db);
  TablePtr last;
  for (const auto& line : p.lines) {
    last = std::make_shared<const Table>(apply_line(line, env));
    env[line.output] = last;
  }
  return *last;
}

Schema result_schema(const Line& line, const std::map<std::string, Schema, std::less<>>& schemas) {
  Env env;
  for (const auto& [name, schema] : schemas) env.emplace(name, std::make_shared<const Table>(Table{schema, {}}));
  return apply_line(line, env).schema;
}

Projection Projection::identity(const Schema& s) {
  Projection p;
  for (std::size_t i = 0; i < s.size(); ++i) {
    p.source.push_back(i);
    p.names.push_back(s[i].name);
  }
  return p;
}

bool Projection::is_identity(const Schema& s) const { return *this == identity(s); }

Table project(const Table& t, const Projection& p) {
  std::vector<Column> cols;
  for (std::size_t k = 0; k < p.source.size(); ++k) {
    if (p.source[k] >= t.schema.size()) raise(EngineErrorKind::UnknownColumn, "projection index out of range");
    cols.push_back(Column{p.names[k], t.schema[p.source[k]].type});
  }
  Table out{Schema(std::move(cols)), {}};
  out.rows.reserve(t.rows.size());
  for (const auto& row : t.rows) out.rows.push_back(extract(row, p.source));
  return out;
}

std::vector<Row> sorted_rows(const Table& t) {
  std::vector<Row> rows = t.rows;
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), ValueLess{});
  });
  return rows;
}

bool tables_equal_strict(const Table& a, const Table& b) {
  if (a.schema.names() != b.schema.names()) return false;
  if (a.rows.size() != b.rows.size()) return false;
  return sorted_rows(a) == sorted_rows(b);
}

LaxForm lax_canonical(const Table& t) {
  const std::size_t ncols = t.schema.size();
  std::vector<std::vector<std::string>> cells(t.rows.size(), std::vector<std::string>(ncols));
  std::vector<std::vector<std::string>> signature(ncols);
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < ncols; ++c) {
      cells[r][c] = lax_key(t.rows[r][c]);
      signature[c].push_back(cells[r][c]);
    }
  }
  for (auto& s : signature) std::sort(s.begin(), s.end());

  std::vector<std::size_t> order(ncols);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return signature[a] < signature[b]; });

  // Runs of columns with identical signatures are interchangeable; try every
  // arrangement within each run and keep the smallest row list.
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  std::size_t arrangements = 1;
  for (std::size_t i = 0; i < ncols;) {
    std::size_t j = i + 1;
    while (j < ncols && signature[order[j]] == signature[order[i]]) ++j;
    if (j - i > 1) {
      runs.emplace_back(i, j);
      for (std::size_t k = 2; k <= j - i && arrangements <= 5040; ++k) arrangements *= k;
    }
    i = j;
  }

  auto build = [&](const std::vector<std::size_t>& cols) {
    std::vector<std::vector<std::string>> rows(cells.size());
    for (std::size_t r = 0; r < cells.size(); ++r) {
      rows[r].reserve(ncols);
      for (auto c : cols) rows[r].push_back(cells[r][c]);
    }
    std::sort(rows.begin(), rows.end());
    return rows;
  };

  LaxForm best{ncols, build(order)};
  if (runs.empty() || arrangements > 5040) return best;

  for (auto& [b, e] : runs) std::sort(order.begin() + b, order.begin() + e);
  // Odometer over the per-run permutations.
  while (true) {
    auto rows = build(order);
    if (rows < best.rows) best.rows = std::move(rows);
    std::size_t k = 0;
    for (; k < runs.size(); ++k) {
      auto [b, e] = runs[k];
      if (std::next_permutation(order.begin() + b, order.begin() + e)) break;
    }
    if (k == runs.size()) break;
  }
  return best;
}

bool tables_equal_lax(const Table& a, const Table& b) {
  if (a.schema.size() != b.schema.size() || a.rows.size() != b.rows.size()) return false;
  return lax_canonical(a) == lax_canonical(b);
}

std::set<Value, ValueLess> unique_values(const Table& t) {
  std::set<Value, ValueLess> out;
  for (const auto& row : t.rows) {
    for (const auto& v : row) {
      if (!v.is_null()) out.insert(v);
    }
  }
  return out;
}

}  // namespace sqlpbe
