#include "sqlpbe/verifier.hpp"

#include <algorithm>

namespace sqlpbe {

Table execute(const Program& p, const Instance& inst) { return run_program(p, inst.inputs); }

namespace {

std::vector<std::vector<std::string>> key_columns(const Table& t) {
  std::vector<std::vector<std::string>> cols(t.schema.size());
  for (auto& c : cols) c.reserve(t.rows.size());
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) cols[c].push_back(lax_key(row[c]));
  }
  return cols;
}

}  // namespace

ExpectedOutput::ExpectedOutput(Table expected) : table_(std::move(expected)) {
  const auto cols = key_columns(table_);
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (std::size_t r = 0; r < cols[c].size(); ++r) {
      if (!table_.rows[r][c].is_null()) unique_.insert(cols[c][r]);
    }
  }
  column_keys_ = cols;
  for (auto& c : column_keys_) std::sort(c.begin(), c.end());
  rows_.assign(table_.rows.size(), {});
  for (std::size_t r = 0; r < table_.rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) rows_[r].push_back(cols[c][r]);
  }
  std::sort(rows_.begin(), rows_.end());
}

double score(const Table& output, const ExpectedOutput& expected) {
  const auto& want = expected.unique_keys();
  if (want.empty()) return 1.0;
  std::set<std::string> found;
  for (const auto& row : output.rows) {
    for (const auto& v : row) {
      if (v.is_null()) continue;
      std::string k = lax_key(v);
      if (want.contains(k)) found.insert(std::move(k));
    }
    if (found.size() == want.size()) break;
  }
  return static_cast<double>(found.size()) / static_cast<double>(want.size());
}

double score(const Table& output, const Table& expected) { return score(output, ExpectedOutput(expected)); }

std::optional<Projection> satisfies(const Table& output, const ExpectedOutput& expected) {
  if (score(output, expected) < 1.0) return std::nullopt;
  const Table& want = expected.table();
  if (output.rows.size() != want.rows.size() || output.schema.size() < want.schema.size()) return std::nullopt;

  const auto out_cols = key_columns(output);
  std::vector<std::vector<std::string>> out_sorted = out_cols;
  for (auto& c : out_sorted) std::sort(c.begin(), c.end());

  // Candidate output columns per expected column: equal sorted key lists.
  const std::size_t n_expected = want.schema.size();
  std::vector<std::vector<std::size_t>> candidates(n_expected);
  for (std::size_t e = 0; e < n_expected; ++e) {
    for (std::size_t o = 0; o < out_sorted.size(); ++o) {
      if (out_sorted[o] == expected.column_keys()[e]) candidates[e].push_back(o);
    }
    if (candidates[e].empty()) return std::nullopt;
  }

  std::vector<std::size_t> chosen;
  std::vector<bool> taken(output.schema.size(), false);
  std::vector<std::vector<std::string>> rows(output.rows.size(), std::vector<std::string>(n_expected));
  auto rows_match = [&] {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      for (std::size_t e = 0; e < n_expected; ++e) rows[r][e] = out_cols[chosen[e]][r];
    }
    std::sort(rows.begin(), rows.end());
    return rows == expected.sorted_rows();
  };
  auto search = [&](auto&& self, std::size_t e) -> bool {
    if (e == n_expected) return rows_match();
    for (auto o : candidates[e]) {
      if (taken[o]) continue;
      taken[o] = true;
      chosen.push_back(o);
      if (self(self, e + 1)) return true;
      chosen.pop_back();
      taken[o] = false;
    }
    return false;
  };
  if (!search(search, 0)) return std::nullopt;
  return Projection{chosen, want.schema.names()};
}

std::optional<Projection> satisfies(const Table& output, const Table& expected) {
  return satisfies(output, ExpectedOutput(expected));
}

}  // namespace sqlpbe
