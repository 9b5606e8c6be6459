#include "sqlpbe/fuzzy_eval.hpp"

#include "sqlpbe/relational.hpp"
#include "sqlpbe/sql.hpp"

namespace sqlpbe {

std::string_view to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::PossiblyCorrect: return "PossiblyCorrect";
    case VerdictKind::IncorrectByFuzzing: return "IncorrectByFuzzing";
    case VerdictKind::Inconclusive: return "Inconclusive";
    case VerdictKind::ExecutionError: return "ExecutionError";
  }
  return "?";
}

namespace {

std::optional<Table> try_run(const Query& q, const Database& db, std::optional<std::chrono::milliseconds> budget) {
  try {
    return q.run(db, budget);
  } catch (const QueryTimeout&) {
    throw;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

bool outputs_agree(const Query& a, const Query& b, const Database& db,
                   std::optional<std::chrono::milliseconds> budget) {
  const auto x = try_run(a, db, budget);
  const auto y = try_run(b, db, budget);
  if (!x || !y) return !x && !y;
  return tables_equal_lax(*x, *y);
}

EvalVerdict fuzzy_check(const Query& candidate, const Query& truth, const Instance& inst,
                        const FuzzyCheckOptions& options) {
  using Clock = std::chrono::steady_clock;
  const auto budget = options.per_round_timeout;
  EvalVerdict v;
  try {
    const auto mine = try_run(candidate, inst.inputs, budget);
    if (!mine) {
      v.kind = VerdictKind::ExecutionError;
      v.detail = "candidate fails on the original input";
      return v;
    }
    const auto ref = try_run(truth, inst.inputs, budget);
    if (!ref || !tables_equal_lax(*mine, *ref)) {
      v.kind = VerdictKind::IncorrectByFuzzing;
      v.round = 0;
      v.witness = inst.inputs;
      v.detail = "outputs differ on the original input";
      return v;
    }
  } catch (const QueryTimeout&) {
    v.kind = VerdictKind::Inconclusive;
    v.round = 0;
    v.detail = "timeout on the original input";
    return v;
  }

  const std::vector<Value> constants = truth.constants();
  for (std::size_t round = 1; round <= options.rounds; ++round) {
    FuzzConfig cfg = options.fuzz;
    cfg.seed = derive_seed(options.seed, 0, round);
    Database fuzzed;
    try {
      fuzzed = fuzz_database(inst.inputs, constants, inst.foreign_keys, cfg);
    } catch (const EmptyKeyPool&) {
      continue;
    }
    const auto start = Clock::now();
    try {
      if (!outputs_agree(candidate, truth, fuzzed, budget)) {
        v.kind = VerdictKind::IncorrectByFuzzing;
        v.round = round;
        v.witness = std::move(fuzzed);
        return v;
      }
    } catch (const QueryTimeout&) {
      v.kind = VerdictKind::Inconclusive;
      v.round = round;
      v.detail = "round timed out";
      return v;
    }
    if (Clock::now() - start > budget) {
      v.kind = VerdictKind::Inconclusive;
      v.round = round;
      v.detail = "round timed out";
      return v;
    }
  }
  v.kind = VerdictKind::PossiblyCorrect;
  return v;
}

bool recheck(const Query& candidate, const Query& truth, const Database& witness) {
  return !outputs_agree(candidate, truth, witness);
}

nlohmann::json to_json(const ReportLine& line) {
  nlohmann::json j{{"instance", line.instance},
                   {"verdict", std::string(to_string(line.verdict.kind))},
                   {"round", nullptr},
                   {"elapsed", line.elapsed_seconds}};
  if (line.verdict.round) j["round"] = *line.verdict.round;
  if (!line.sql.empty()) j["sql"] = line.sql;
  if (!line.verdict.detail.empty()) j["detail"] = line.verdict.detail;
  return j;
}

}  // namespace sqlpbe
