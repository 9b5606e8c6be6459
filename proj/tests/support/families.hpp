#pragma once

#include <string>
#include <vector>

#include "sqlpbe/query.hpp"
#include "test_support.hpp"

namespace sqlpbe::testing {

inline Database threshold_db() {
  return {named("T", make_table({{"a", ValueType::Integer}}, {{I(0)}, {I(0)}, {I(0)}, {I(0)}}))};
}

/// n queries `a < 10`, `a < 20`, ... which all return every row of T.
inline std::vector<Query> threshold_queries(std::size_t n) {
  std::vector<Query> out;
  for (std::size_t i = 1; i <= n; ++i) {
    out.push_back(Query::program(parse_program("df1 = filter(T, a < " + std::to_string(10 * i) + ")")));
  }
  return out;
}

}  // namespace sqlpbe::testing
