#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "sqlpbe/errors.hpp"
#include "sqlpbe/instance.hpp"
#include "sqlpbe/table.hpp"

namespace sqlpbe {

class EmptyKeyPool : public Error {
 public:
  using Error::Error;
};

struct FuzzConfig {
  std::uint64_t seed = 0;
  /// Rows per table; when unset each table draws from [1, 2 * original + 2].
  std::optional<std::pair<std::size_t, std::size_t>> row_count_range;
  /// Weights of the three value sources: type-uniform, original column
  /// values and their neighbours, query constants and their neighbours.
  std::array<double, 3> source_weights{1.0, 2.0, 2.0};
};

/// Value neighbourhood used by the fuzzer, `v` first. Text gains one or two
/// random letters, numbers move by one or flip sign, dates move by one day,
/// booleans flip.
std::vector<Value> related_values(const Value& v, std::mt19937_64& rng);

/// A type-uniform random value: integers over the whole 64-bit range, reals
/// in [-1e6, 1e6] with three decimals, texts of 1 to 8 lowercase letters,
/// dates between 1970 and 2037.
Value uniform_value(ValueType t, std::mt19937_64& rng);

/// Candidate values per source for one column, as drawn by fuzz_database.
struct ColumnPools {
  std::vector<Value> original;
  std::vector<Value> constants;
};

ColumnPools column_pools(const Table& t, std::size_t column, const std::vector<Value>& constants,
                         std::mt19937_64& rng);

/// Random database with the schemas of `inputs`. Foreign-key columns take
/// values only from the generated parent column; parents are generated first.
/// Parent columns that are unique in the original stay unique.
Database fuzz_database(const Database& inputs, const std::vector<Value>& constants,
                       const std::vector<ForeignKey>& foreign_keys, const FuzzConfig& config);

/// Seed for fuzzing round `round` of question `level` derived from `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t level, std::uint64_t round);

}  // namespace sqlpbe
