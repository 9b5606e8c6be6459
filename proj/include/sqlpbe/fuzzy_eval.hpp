#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "sqlpbe/fuzzer.hpp"
#include "sqlpbe/instance.hpp"
#include "sqlpbe/query.hpp"

namespace sqlpbe {

enum class VerdictKind : std::uint8_t { PossiblyCorrect, IncorrectByFuzzing, Inconclusive, ExecutionError };

std::string_view to_string(VerdictKind k);

struct EvalVerdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  /// Round that told the queries apart; 0 is the original input.
  std::optional<std::size_t> round;
  /// The distinguishing input, for IncorrectByFuzzing.
  std::optional<Database> witness;
  std::string detail;
};

struct FuzzyCheckOptions {
  std::size_t rounds = 16;
  std::chrono::milliseconds per_round_timeout{60'000};
  std::uint64_t seed = 0;
  FuzzConfig fuzz;
};

/// Whether two queries agree on `db` under lax comparison. Both failing counts
/// as agreement, one failing as disagreement. QueryTimeout propagates.
bool outputs_agree(const Query& a, const Query& b, const Database& db,
                   std::optional<std::chrono::milliseconds> budget = std::nullopt);

/// Checks `candidate` against `truth` on the instance inputs, then on
/// `rounds` inputs fuzzed with the reference query's constants.
EvalVerdict fuzzy_check(const Query& candidate, const Query& truth, const Instance& inst,
                        const FuzzyCheckOptions& options = {});

/// True when `witness` still tells the two queries apart.
bool recheck(const Query& candidate, const Query& truth, const Database& witness);

struct ReportLine {
  std::string instance;
  EvalVerdict verdict;
  double elapsed_seconds = 0;
  /// SQL of the evaluated candidate; empty when nothing was synthesized.
  std::string sql;
};

/// One JSON object per line: {"instance", "verdict", "round", "elapsed"},
/// plus "sql" and "detail" when present.
nlohmann::json to_json(const ReportLine& line);

}  // namespace sqlpbe
