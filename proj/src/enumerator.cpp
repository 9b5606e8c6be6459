#include "sqlpbe/enumerator.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace sqlpbe {

ColumnUniverse::ColumnUniverse(std::size_t limit) : limit_(limit) {
  if (limit_ > kMaxColumnBits) throw UniverseOverflow("column universe limit exceeds " + std::to_string(kMaxColumnBits));
}

std::size_t ColumnUniverse::add(const std::string& name, ValueType type) {
  if (auto it = index_.find(name); it != index_.end()) return it->second;
  if (names_.size() >= limit_) {
    throw UniverseOverflow("more than " + std::to_string(limit_) + " distinct columns");
  }
  index_.emplace(name, names_.size());
  names_.push_back(name);
  types_.push_back(type);
  return names_.size() - 1;
}

std::optional<std::size_t> ColumnUniverse::index_of(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ColumnSet ColumnUniverse::set_of(const std::vector<std::string>& names) const {
  ColumnSet s;
  for (const auto& n : names) {
    auto i = index_of(n);
    if (!i) throw std::out_of_range("column '" + n + "' is not in the universe");
    s.set(*i);
  }
  return s;
}

std::vector<std::string> ColumnUniverse::names_of(const ColumnSet& s) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (s.test(i)) out.push_back(names_[i]);
  }
  return out;
}

std::string generated_column_name(AggregateFn fn, const std::string& input) {
  std::string name(aggregate_name(fn));
  if (input.empty()) return name;
  std::string suffix = input;
  suffix[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(suffix[0])));
  return name + suffix;
}

ArgumentSpace build_argument_space(const Instance& inst, const SpaceOptions& options) {
  ArgumentSpace space{ColumnUniverse(options.universe_limit), {}, {}, {}, {}, {}, {}, {}};
  ColumnUniverse& u = space.universe;
  for (const auto& t : inst.inputs) {
    ColumnSet s;
    for (const auto& c : t.table->schema) s.set(u.add(c.name, c.type));
    space.input_names.push_back(t.name);
    space.input_columns.push_back(s);
  }
  const std::size_t input_universe = u.size();

  for (AggregateFn fn : inst.aggregators) {
    if (!takes_column(fn)) {
      const std::string out = generated_column_name(fn, "");
      ColumnSet ann2;
      ann2.set(u.add(out, *aggregate_result_type(fn, ValueType::Null)));
      space.aggregates.push_back(AnnotatedAggregate{SummariseCondition{out, fn, ""}, {}, ann2});
      continue;
    }
    for (std::size_t c = 0; c < input_universe; ++c) {
      auto rt = aggregate_result_type(fn, u.type(c));
      if (!rt) continue;
      const std::string out = generated_column_name(fn, u.name(c));
      ColumnSet ann1, ann2;
      ann1.set(c);
      ann2.set(u.add(out, *rt));
      space.aggregates.push_back(AnnotatedAggregate{SummariseCondition{out, fn, u.name(c)}, ann1, ann2});
    }
  }

  // Filter atoms.
  std::vector<std::size_t> comparison;
  if (!inst.comparison_columns.empty()) {
    for (const auto& c : inst.comparison_columns) {
      if (auto i = u.index_of(c); i && std::find(comparison.begin(), comparison.end(), *i) == comparison.end()) {
        comparison.push_back(*i);
      }
    }
  } else {
    for (std::size_t c = 0; c < input_universe; ++c) {
      const bool any = std::any_of(inst.constants.begin(), inst.constants.end(),
                                   [&](const Value& v) { return comparable(u.type(c), v.type()); });
      if (any) comparison.push_back(c);
    }
  }
  std::vector<std::pair<Atom, ColumnSet>> atoms;
  for (auto c : comparison) {
    const ValueType t = u.type(c);
    const bool ordered = t != ValueType::Text && t != ValueType::Boolean;
    for (const auto& k : inst.constants) {
      if (!comparable(t, k.type())) continue;
      for (CmpOp cmp : kAllCmpOps) {
        if (!ordered && cmp != CmpOp::eq && cmp != CmpOp::ne) continue;
        ColumnSet s;
        s.set(c);
        atoms.emplace_back(Atom{u.name(c), cmp, k}, s);
      }
    }
  }
  for (std::size_t i = 0; i < comparison.size(); ++i) {
    for (std::size_t j = i + 1; j < comparison.size(); ++j) {
      if (u.type(comparison[i]) != u.type(comparison[j])) continue;
      ColumnSet s;
      s.set(comparison[i]);
      s.set(comparison[j]);
      atoms.emplace_back(Atom{u.name(comparison[i]), CmpOp::eq, ColumnRef{u.name(comparison[j])}}, s);
    }
  }
  for (const auto& [a, s] : atoms) space.filters.push_back(AnnotatedFilter{FilterCondition{{a}, Connective::And}, s});
  if (options.compound_filters) {
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      for (std::size_t j = i + 1; j < atoms.size(); ++j) {
        for (Connective conn : {Connective::And, Connective::Or}) {
          space.filters.push_back(AnnotatedFilter{FilterCondition{{atoms[i].first, atoms[j].first}, conn},
                                                  atoms[i].second | atoms[j].second});
        }
      }
    }
  }

  for (std::size_t a = 0; a < u.size(); ++a) {
    for (std::size_t b = 0; b < u.size(); ++b) {
      if (!comparable(u.type(a), u.type(b))) continue;
      ColumnSet s1, s2;
      s1.set(a);
      s2.set(b);
      space.joins.push_back(AnnotatedJoin{JoinCondition{u.name(a), u.name(b)}, s1, s2});
    }
  }

  space.cols.push_back(AnnotatedCols{{}, {}});
  if (options.max_group_columns >= 1) {
    for (std::size_t a = 0; a < u.size(); ++a) {
      ColumnSet s;
      s.set(a);
      space.cols.push_back(AnnotatedCols{{u.name(a)}, s});
      space.col.push_back(AnnotatedCols{{u.name(a)}, s});
    }
  }
  if (options.max_group_columns >= 2) {
    for (std::size_t a = 0; a < u.size(); ++a) {
      for (std::size_t b = a + 1; b < u.size(); ++b) {
        ColumnSet s;
        s.set(a);
        s.set(b);
        space.cols.push_back(AnnotatedCols{{u.name(a), u.name(b)}, s});
      }
    }
  }
  return space;
}

namespace {

bool subset(const ColumnSet& a, const ColumnSet& b) { return (a & ~b).none(); }

}  // namespace

std::optional<ColumnSet> check_premises(Op op, const LineArguments& args, const ArgumentSpace& space) {
  const auto& t = args.tables;
  switch (op) {
    case Op::natural_join:
    case Op::natural_join3:
    case Op::natural_join4: {
      ColumnSet out;
      for (const auto& s : t) out |= s;
      return out;
    }
    case Op::left_join:
      if ((t[0] & t[1]).none()) return std::nullopt;
      return t[0] | t[1];
    case Op::inner_join: {
      const auto& j = space.joins.at(*args.condition);
      if (!subset(j.ann1, t[0]) || !subset(j.ann2, t[1])) return std::nullopt;
      return t[0] | t[1];
    }
    case Op::cross_join: {
      const auto& j = space.joins.at(*args.condition);
      if (!subset(j.ann1, t[0]) || !subset(j.ann2, t[0] & t[1])) return std::nullopt;
      return t[0] | t[1];
    }
    case Op::filter:
      if (!subset(space.filters.at(*args.condition).ann1, t[0])) return std::nullopt;
      return t[0];
    case Op::summarise: {
      const auto& a = space.aggregates.at(*args.condition);
      const auto& c = space.cols.at(*args.columns);
      if (!subset(a.ann1, t[0]) || !subset(c.ann1, t[0]) || (c.ann1 & a.ann2).any()) return std::nullopt;
      return a.ann2 | c.ann1;
    }
    case Op::mutate: {
      const auto& a = space.aggregates.at(*args.condition);
      if (!subset(a.ann1, t[0])) return std::nullopt;
      return t[0] | a.ann2;
    }
    case Op::anti_join: {
      const auto& c = space.cols.at(*args.columns).ann1;
      if (!subset(c, t[0]) || !subset(c, t[1])) return std::nullopt;
      if (c.none() && (t[0] & t[1]).none()) return std::nullopt;
      return t[0];
    }
    case Op::semi_join:
      if ((t[0] & t[1]).none()) return std::nullopt;
      return t[0];
    case Op::union_all: return t[0] | t[1];
    case Op::intersect: {
      const auto& c = space.col.at(*args.columns).ann1;
      if (!subset(c, t[0]) || !subset(c, t[1])) return std::nullopt;
      return c;
    }
  }
  return std::nullopt;
}

Shape Shape::cube(const std::vector<Op>& ops) {
  Shape s;
  for (Op op : ops) s.lines.push_back({op});
  return s;
}

Shape Shape::uniform(std::size_t size, const std::vector<Op>& ops) {
  Shape s;
  s.lines.assign(size, ops);
  return s;
}

namespace {

bool is_natural(Op op) { return op == Op::natural_join || op == Op::natural_join3 || op == Op::natural_join4; }

class Search {
 public:
  Search(const ArgumentSpace& space, const Shape& shape, EnumerationSink& sink, bool prune)
      : space_(space), shape_(shape), sink_(sink), prune_(prune), k_(shape.lines.size()),
        m_(space.input_names.size()) {
    // capacity_[i]: table slots available on lines i..k-1.
    capacity_.assign(k_ + 1, 0);
    for (std::size_t i = k_; i-- > 0;) {
      std::size_t widest = 0;
      for (Op op : shape.lines[i]) widest = std::max(widest, signature(op).tables);
      capacity_[i] = capacity_[i + 1] + widest;
    }
    uses_.assign(k_, 0);
  }

  EnumerationStats run() {
    if (k_ > 0) line(0);
    return stats_;
  }

 private:
  void line(std::size_t i) {
    for (Op op : shape_.lines[i]) {
      if (stop_) return;
      refs_.clear();
      tables(i, op, 0);
    }
  }

  std::string ref_name(std::size_t r) const { return r < m_ ? space_.input_names[r] : line_output_name(r - m_); }

  const ColumnSet& ref_columns(std::size_t r) const { return r < m_ ? space_.input_columns[r] : line_cols_[r - m_]; }

  void tables(std::size_t i, Op op, std::size_t slot) {
    const auto sig = signature(op);
    if (slot == sig.tables) {
      if (!usage_feasible(i)) return;
      arguments(i, op);
      return;
    }
    const std::size_t first = is_natural(op) && slot > 0 ? refs_.back() + 1 : 0;
    for (std::size_t r = first; r < m_ + i && !stop_; ++r) {
      refs_.push_back(r);
      tables(i, op, slot + 1);
      refs_.pop_back();
    }
  }

  /// Lines before i that no line up to i references must still fit in the
  /// table slots of the lines after i.
  bool usage_feasible(std::size_t i) const {
    std::size_t unused = 0;
    for (std::size_t j = 0; j < i; ++j) {
      const bool used = uses_[j] > 0 || std::find(refs_.begin(), refs_.end(), m_ + j) != refs_.end();
      if (!used) ++unused;
    }
    if (i + 1 < k_) ++unused;
    return unused <= capacity_[i + 1];
  }

  void arguments(std::size_t i, Op op) {
    const auto sig = signature(op);
    std::size_t n_cond = 1;
    if (sig.condition) {
      switch (*sig.condition) {
        case ArgKind::FilterCondition: n_cond = space_.filters.size(); break;
        case ArgKind::JoinCondition:
        case ArgKind::CrossJoinCondition: n_cond = space_.joins.size(); break;
        case ArgKind::SummariseCondition: n_cond = space_.aggregates.size(); break;
        default: break;
      }
    }
    std::size_t n_cols = 1;
    if (sig.columns == ArgKind::Cols) n_cols = space_.cols.size();
    if (sig.columns == ArgKind::Col) n_cols = space_.col.size();

    LineArguments args;
    for (auto r : refs_) args.tables.push_back(ref_columns(r));
    for (std::size_t c = 0; c < n_cond && !stop_; ++c) {
      if (op == Op::summarise && is_window(space_.aggregates[c].condition.fn)) continue;
      if (sig.condition) args.condition = c;
      for (std::size_t g = 0; g < n_cols && !stop_; ++g) {
        if (sig.columns) args.columns = g;
        std::optional<ColumnSet> out;
        if (prune_) {
          out = check_premises(op, args, space_);
          if (!out) {
            ++stats_.pruned_lines;
            continue;
          }
        } else {
          out.emplace();
          for (const auto& s : args.tables) *out |= s;
        }
        emit(i, op, args, *out);
      }
    }
  }

  void emit(std::size_t i, Op op, const LineArguments& args, const ColumnSet& out) {
    if (sink_.should_stop()) {
      stop_ = true;
      stats_.stopped = true;
      return;
    }
    Line l;
    l.output = line_output_name(i);
    l.op = op;
    for (auto r : refs_) l.tables.push_back(ref_name(r));
    const auto sig = signature(op);
    if (sig.condition == ArgKind::FilterCondition) l.filter = space_.filters[*args.condition].condition;
    if (sig.condition == ArgKind::JoinCondition || sig.condition == ArgKind::CrossJoinCondition) {
      l.join = space_.joins[*args.condition].condition;
    }
    if (sig.condition == ArgKind::SummariseCondition) l.aggregate = space_.aggregates[*args.condition].condition;
    if (sig.columns == ArgKind::Cols) l.cols = space_.cols[*args.columns].cols;
    if (sig.columns == ArgKind::Col) l.cols = space_.col[*args.columns].cols;

    const std::vector<std::size_t> refs = refs_;
    program_.lines.push_back(std::move(l));
    line_cols_.push_back(out);
    for (auto r : refs) {
      if (r >= m_) ++uses_[r - m_];
    }
    if (sink_.enter_line(i, program_)) {
      if (i + 1 == k_) {
        ++stats_.programs;
        if (!sink_.on_program(program_)) {
          stop_ = true;
          stats_.stopped = true;
        }
      } else {
        line(i + 1);
        refs_ = refs;
      }
    }
    sink_.leave_line(i);
    for (auto r : refs) {
      if (r >= m_) --uses_[r - m_];
    }
    line_cols_.pop_back();
    program_.lines.pop_back();
  }

  const ArgumentSpace& space_;
  const Shape& shape_;
  EnumerationSink& sink_;
  bool prune_;
  std::size_t k_;
  std::size_t m_;
  std::vector<std::size_t> capacity_;
  std::vector<std::size_t> uses_;
  std::vector<std::size_t> refs_;
  std::vector<ColumnSet> line_cols_;
  Program program_;
  EnumerationStats stats_;
  bool stop_ = false;
};

}  // namespace

EnumerationStats enumerate(const ArgumentSpace& space, const Shape& shape, EnumerationSink& sink) {
  return Search(space, shape, sink, true).run();
}

EnumerationStats enumerate_unpruned(const ArgumentSpace& space, const Shape& shape, EnumerationSink& sink) {
  return Search(space, shape, sink, false).run();
}

}  // namespace sqlpbe
