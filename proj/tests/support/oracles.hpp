#pragma once

// Reference computations shared by the unit tests and the acceptance binary.
// They avoid the library's own search code wherever the property under test
// depends on it.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sqlpbe/enumerator.hpp"
#include "sqlpbe/relational.hpp"

namespace sqlpbe::oracles {

inline std::set<std::string> collect(const ArgumentSpace& space, const Shape& shape, bool pruned,
                                     std::size_t* duplicates = nullptr) {
  std::set<std::string> out;
  CallbackSink sink([&](const Program& p) {
    if (!out.insert(to_string(p)).second && duplicates) ++*duplicates;
    return true;
  });
  if (pruned) {
    enumerate(space, shape, sink);
  } else {
    enumerate_unpruned(space, shape, sink);
  }
  return out;
}

inline const std::vector<Op> kMiniOps{Op::filter, Op::natural_join, Op::summarise};

/// Every well-formed line over {filter, natural_join, summarise} reading the
/// tables in `refs`, written out directly from the argument lists.
/// Well-formed: natural_join operands in increasing reference order,
/// summarise with a reducing aggregate. With `must_use_last` the line has to
/// read the last reference.
inline std::vector<Line> mini_lines(const ArgumentSpace& space, const std::vector<std::string>& refs,
                                    std::size_t index, bool must_use_last) {
  std::vector<Line> lines;
  const std::string last = refs.back();
  const std::string name = line_output_name(index);
  for (const auto& t : refs) {
    if (must_use_last && t != last) continue;
    for (const auto& f : space.filters) {
      Line l{name, Op::filter, {t}};
      l.filter = f.condition;
      lines.push_back(l);
    }
    for (const auto& a : space.aggregates) {
      if (is_window(a.condition.fn)) continue;
      for (const auto& c : space.cols) {
        Line l{name, Op::summarise, {t}};
        l.aggregate = a.condition;
        l.cols = c.cols;
        lines.push_back(l);
      }
    }
  }
  for (std::size_t i = 0; i < refs.size(); ++i) {
    for (std::size_t j = i + 1; j < refs.size(); ++j) {
      if (must_use_last && refs[j] != last) continue;
      lines.push_back(Line{name, Op::natural_join, {refs[i], refs[j]}});
    }
  }
  return lines;
}

struct PruningReport {
  std::size_t brute_force = 0;
  std::size_t column_errors = 0;
  std::size_t enumerated = 0;
  std::size_t duplicates = 0;
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  bool ok() const { return missing.empty() && extra.empty() && duplicates == 0; }
};

/// Pruned enumeration versus brute force minus the programs that raise a
/// column error when run on the instance inputs.
inline PruningReport pruning_check(const Instance& inst, std::size_t max_size) {
  PruningReport r;
  const ArgumentSpace space = build_argument_space(inst);
  const Env base = make_env(inst.inputs);
  // Runs a line; false on a column error. Other engine errors still count as
  // well-formed programs.
  auto runs = [](const Line& l, const Env& env, TablePtr* out) {
    try {
      *out = std::make_shared<const Table>(apply_line(l, env));
    } catch (const EngineError& e) {
      if (e.is_column_error()) return false;
      out->reset();
    }
    return true;
  };
  std::vector<std::string> with_df1 = space.input_names;
  with_df1.push_back(line_output_name(0));
  for (std::size_t k = 1; k <= max_size && k <= 2; ++k) {
    std::set<std::string> expected;
    for (const Line& first : mini_lines(space, space.input_names, 0, false)) {
      TablePtr df1;
      const bool ok1 = runs(first, base, &df1);
      if (k == 1) {
        ++r.brute_force;
        if (ok1) {
          expected.insert(to_string(Program{{first}}));
        } else {
          ++r.column_errors;
        }
        continue;
      }
      Env env = base;
      if (df1) {
        env[line_output_name(0)] = df1;
      } else if (ok1) {
        // Line 1 failed for a non-column reason; line 2 sees only its schema.
        env[line_output_name(0)] = std::make_shared<const Table>(Table{Schema{}, {}});
      }
      for (const Line& second : mini_lines(space, with_df1, 1, true)) {
        ++r.brute_force;
        TablePtr ignored;
        bool ok = ok1;
        if (ok && df1) ok = runs(second, env, &ignored);
        if (ok && !df1) {
          // Re-run the whole program to classify the failure.
          try {
            run_program(Program{{first, second}}, inst.inputs);
          } catch (const EngineError& e) {
            ok = !e.is_column_error();
          }
        }
        if (ok) {
          expected.insert(to_string(Program{{first, second}}));
        } else {
          ++r.column_errors;
        }
      }
    }
    const std::set<std::string> got = collect(space, Shape::uniform(k, kMiniOps), true, &r.duplicates);
    r.enumerated += got.size();
    std::set_difference(expected.begin(), expected.end(), got.begin(), got.end(), std::back_inserter(r.missing));
    std::set_difference(got.begin(), got.end(), expected.begin(), expected.end(), std::back_inserter(r.extra));
  }
  return r;
}

struct CubeReport {
  std::size_t cubes = 0;
  std::size_t whole = 0;
  std::size_t union_size = 0;
  std::size_t overlaps = 0;
  bool same_set = true;
  bool ok() const { return same_set && whole == union_size && overlaps == 0; }
};

/// Enumerates every cube of each size up to `max_size` over the full language
/// and compares the union with the unrestricted enumeration.
inline CubeReport cube_decomposition_check(const ArgumentSpace& space, std::size_t max_size) {
  CubeReport r;
  const std::vector<Op> all(kAllOps.begin(), kAllOps.end());
  for (std::size_t k = 1; k <= max_size; ++k) {
    std::set<std::string> whole = collect(space, Shape::uniform(k, all), true);
    r.whole += whole.size();
    std::set<std::string> joined;
    std::vector<Op> cube(k, all.front());
    std::vector<std::size_t> digits(k, 0);
    for (;;) {
      for (std::size_t i = 0; i < k; ++i) cube[i] = all[digits[i]];
      ++r.cubes;
      CallbackSink sink([&](const Program& p) {
        if (!joined.insert(to_string(p)).second) ++r.overlaps;
        return true;
      });
      enumerate(space, Shape::cube(cube), sink);
      std::size_t d = k;
      while (d-- > 0) {
        if (++digits[d] < all.size()) break;
        digits[d] = 0;
      }
      if (d == static_cast<std::size_t>(-1)) break;
    }
    r.union_size += joined.size();
    r.same_set = r.same_set && joined == whole;
  }
  return r;
}

/// Output score written from scratch: numbers and numeric text compare as decimals
/// rounded to 12 significant digits, booleans as 0/1.
inline std::string plain_key(const Value& v) {
  auto number = [](double d) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", d);
    double r = std::strtod(buf, nullptr);
    if (r == 0) r = 0;  // folds -0
    std::snprintf(buf, sizeof buf, "%.12g", r);
    return std::string("#") + buf;
  };
  switch (v.type()) {
    case ValueType::Null: return "null";
    case ValueType::Integer: {
      const auto i = v.as_integer();
      if (i > (std::int64_t{1} << 53) || i < -(std::int64_t{1} << 53)) return "#" + std::to_string(i);
      return number(static_cast<double>(i));
    }
    case ValueType::Real: return number(v.as_real());
    case ValueType::Boolean: return v.as_boolean() ? number(1) : number(0);
    case ValueType::Text: {
      const std::string& s = v.as_text();
      char* end = nullptr;
      const double d = std::strtod(s.c_str(), &end);
      if (!s.empty() && end == s.c_str() + s.size() && std::isfinite(d) && !std::isspace(s[0])) return number(d);
      return "'" + s;
    }
    case ValueType::DateTime: return "'" + v.as_datetime().iso;
  }
  return "?";
}

inline double reference_score(const Table& output, const Table& expected) {
  std::set<std::string> want, have;
  for (const auto& row : expected.rows) {
    for (const auto& v : row) {
      if (!v.is_null()) want.insert(plain_key(v));
    }
  }
  for (const auto& row : output.rows) {
    for (const auto& v : row) {
      if (!v.is_null()) have.insert(plain_key(v));
    }
  }
  if (want.empty()) return 1.0;
  std::size_t hit = 0;
  for (const auto& k : want) hit += have.count(k);
  return static_cast<double>(hit) / static_cast<double>(want.size());
}

}  // namespace sqlpbe::oracles
