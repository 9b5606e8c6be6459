#include "sqlpbe/fuzzer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace sqlpbe {

namespace {

std::string random_letters(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> letter('a', 'z');
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += static_cast<char>(letter(rng));
  return s;
}

std::int64_t saturating_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) return b > 0 ? std::numeric_limits<std::int64_t>::max()
                                                     : std::numeric_limits<std::int64_t>::min();
  return r;
}

std::int64_t saturating_negate(std::int64_t a) {
  return a == std::numeric_limits<std::int64_t>::min() ? std::numeric_limits<std::int64_t>::max() : -a;
}

/// Shifts the date part of an ISO date or date-time by `days`.
std::string shift_days(const std::string& iso, int days) {
  using namespace std::chrono;
  const int y = std::stoi(iso.substr(0, 4));
  const unsigned m = static_cast<unsigned>(std::stoi(iso.substr(5, 2)));
  const unsigned d = static_cast<unsigned>(std::stoi(iso.substr(8, 2)));
  const sys_days shifted = sys_days(year_month_day{year{y}, month{m}, day{d}}) + std::chrono::days{days};
  const year_month_day ymd{shifted};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf + iso.substr(10);
}

void push_unique(std::vector<Value>& out, Value v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
}

Value convert_to(const Value& v, ValueType t) {
  if (t == ValueType::Real && v.type() == ValueType::Integer) return Value::real(static_cast<double>(v.as_integer()));
  if (t == ValueType::Integer && v.type() == ValueType::Real) {
    const double d = v.as_real();
    if (std::trunc(d) == d && d >= -9.2e18 && d <= 9.2e18) return Value::integer(static_cast<std::int64_t>(d));
    return Value::null();
  }
  return v;
}

std::size_t weighted_pick(const std::array<double, 3>& w, std::mt19937_64& rng) {
  double total = w[0] + w[1] + w[2];
  double x = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (std::size_t i = 0; i < 3; ++i) {
    if (x < w[i]) return i;
    x -= w[i];
  }
  return w[2] > 0 ? 2 : (w[1] > 0 ? 1 : 0);
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

}  // namespace

std::vector<Value> related_values(const Value& v, std::mt19937_64& rng) {
  std::vector<Value> out{v};
  switch (v.type()) {
    case ValueType::Null: break;
    case ValueType::Text:
      push_unique(out, Value::text(v.as_text() + random_letters(1, rng)));
      push_unique(out, Value::text(v.as_text() + random_letters(2, rng)));
      break;
    case ValueType::Integer:
      push_unique(out, Value::integer(saturating_add(v.as_integer(), -1)));
      push_unique(out, Value::integer(saturating_add(v.as_integer(), 1)));
      push_unique(out, Value::integer(saturating_negate(v.as_integer())));
      break;
    case ValueType::Real:
      push_unique(out, Value::real(v.as_real() - 1));
      push_unique(out, Value::real(v.as_real() + 1));
      push_unique(out, Value::real(-v.as_real()));
      break;
    case ValueType::DateTime:
      push_unique(out, Value::datetime(shift_days(v.as_datetime().iso, -1)));
      push_unique(out, Value::datetime(shift_days(v.as_datetime().iso, 1)));
      break;
    case ValueType::Boolean: push_unique(out, Value::boolean(!v.as_boolean())); break;
  }
  return out;
}

Value uniform_value(ValueType t, std::mt19937_64& rng) {
  switch (t) {
    case ValueType::Null: return Value::null();
    case ValueType::Integer:
      return Value::integer(std::uniform_int_distribution<std::int64_t>(std::numeric_limits<std::int64_t>::min(),
                                                                         std::numeric_limits<std::int64_t>::max())(rng));
    case ValueType::Real: {
      const auto milli = std::uniform_int_distribution<std::int64_t>(-1'000'000'000, 1'000'000'000)(rng);
      return Value::real(static_cast<double>(milli) / 1000.0);
    }
    case ValueType::Text:
      return Value::text(random_letters(std::uniform_int_distribution<std::size_t>(1, 8)(rng), rng));
    case ValueType::Boolean: return Value::boolean(std::uniform_int_distribution<int>(0, 1)(rng) == 1);
    case ValueType::DateTime: {
      using namespace std::chrono;
      const auto day_index = std::uniform_int_distribution<int>(0, 365 * 68)(rng);
      const year_month_day ymd{sys_days{} + days{day_index}};
      char buf[16];
      std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                    static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
      return Value::datetime(buf);
    }
  }
  return Value::null();
}

ColumnPools column_pools(const Table& t, std::size_t column, const std::vector<Value>& constants,
                         std::mt19937_64& rng) {
  ColumnPools pools;
  const ValueType type = t.schema[column].type;
  std::set<Value, ValueLess> originals;
  for (const auto& row : t.rows) originals.insert(row[column]);
  for (const auto& v : originals) {
    for (auto& r : related_values(v, rng)) push_unique(pools.original, std::move(r));
  }
  for (const auto& c : constants) {
    if (c.is_null() || !comparable(type, c.type())) continue;
    Value v = convert_to(c, type);
    if (v.is_null()) continue;
    for (auto& r : related_values(v, rng)) push_unique(pools.constants, std::move(r));
  }
  return pools;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t level, std::uint64_t round) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (level * 65'537 + round + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Database fuzz_database(const Database& inputs, const std::vector<Value>& constants,
                       const std::vector<ForeignKey>& foreign_keys, const FuzzConfig& config) {
  std::mt19937_64 rng(config.seed);

  // Parents before children; tables outside any cycle keep input order.
  std::vector<std::size_t> order;
  std::vector<int> state(inputs.size(), 0);
  auto index_of = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (inputs[i].name == name) return i;
    }
    return std::nullopt;
  };
  auto visit = [&](auto&& self, std::size_t i) -> void {
    if (state[i] != 0) return;
    state[i] = 1;
    for (const auto& fk : foreign_keys) {
      if (fk.from_table != inputs[i].name || fk.to_table == fk.from_table) continue;
      if (auto p = index_of(fk.to_table); p && state[*p] == 0) self(self, *p);
    }
    state[i] = 2;
    order.push_back(i);
  };
  for (std::size_t i = 0; i < inputs.size(); ++i) visit(visit, i);

  std::set<std::pair<std::string, std::string>> referenced;
  for (const auto& fk : foreign_keys) referenced.emplace(fk.to_table, fk.to_column);

  std::vector<TablePtr> generated(inputs.size());
  for (std::size_t ti : order) {
    const Table& orig = *inputs[ti].table;
    const std::string& tname = inputs[ti].name;
    auto [lo, hi] = config.row_count_range.value_or(std::make_pair<std::size_t, std::size_t>(1, 2 * orig.rows.size() + 2));
    const std::size_t n = std::uniform_int_distribution<std::size_t>(lo, std::max(lo, hi))(rng);

    std::vector<std::vector<Value>> columns(orig.schema.size());
    for (std::size_t c = 0; c < orig.schema.size(); ++c) {
      const Column& col = orig.schema[c];
      const ForeignKey* fk = nullptr;
      for (const auto& k : foreign_keys) {
        if (k.from_table == tname && k.from_column == col.name) {
          fk = &k;
          break;
        }
      }
      if (fk) {
        auto p = index_of(fk->to_table);
        const Table* parent = p ? generated[*p].get() : nullptr;
        if (!parent) throw EmptyKeyPool(fk->to_table + " is not generated before " + tname);
        const std::size_t pc = *parent->schema.index_of(fk->to_column);
        std::vector<Value> keys;
        for (const auto& row : parent->rows) {
          if (!row[pc].is_null()) push_unique(keys, convert_to(row[pc], col.type));
        }
        if (keys.empty()) throw EmptyKeyPool(fk->to_table + "." + fk->to_column + " has no generated values");
        for (std::size_t r = 0; r < n; ++r) columns[c].push_back(pick(keys, rng));
        continue;
      }

      const ColumnPools pools = column_pools(orig, c, constants, rng);
      const bool is_key = referenced.contains({tname, col.name});
      std::set<Value, ValueLess> distinct_orig;
      bool unique = true;
      for (const auto& row : orig.rows) unique = unique && distinct_orig.insert(row[c]).second;
      const bool keep_unique = is_key && unique;

      std::array<double, 3> w = config.source_weights;
      if (pools.original.empty()) w[1] = 0;
      if (pools.constants.empty()) w[2] = 0;
      std::set<Value, ValueLess> used;
      for (std::size_t r = 0; r < n; ++r) {
        Value v;
        for (int attempt = 0; attempt < 64; ++attempt) {
          switch (weighted_pick(w, rng)) {
            case 0: v = uniform_value(col.type, rng); break;
            case 1: v = pick(pools.original, rng); break;
            default: v = pick(pools.constants, rng); break;
          }
          if (is_key && v.is_null()) continue;
          if (keep_unique && used.contains(v)) continue;
          break;
        }
        if (is_key && v.is_null()) v = uniform_value(col.type, rng);
        if (keep_unique) {
          while (used.contains(v)) v = uniform_value(col.type, rng);
          used.insert(v);
        }
        columns[c].push_back(std::move(v));
      }
    }
    Table t{orig.schema, std::vector<Row>(n, Row(orig.schema.size()))};
    for (std::size_t c = 0; c < columns.size(); ++c) {
      for (std::size_t r = 0; r < n; ++r) t.rows[r][c] = std::move(columns[c][r]);
    }
    generated[ti] = std::make_shared<const Table>(std::move(t));
  }

  Database out;
  for (std::size_t i = 0; i < inputs.size(); ++i) out.push_back(NamedTable{inputs[i].name, generated[i]});
  return out;
}

}  // namespace sqlpbe
