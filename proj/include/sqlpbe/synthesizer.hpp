#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sqlpbe/cube_engine.hpp"
#include "sqlpbe/enumerator.hpp"
#include "sqlpbe/instance.hpp"
#include "sqlpbe/messages.hpp"
#include "sqlpbe/verifier.hpp"

namespace sqlpbe {

enum class SearchMode : std::uint8_t { First, All };

struct SynthesisOptions {
  std::size_t workers = 1;
  std::chrono::milliseconds time_limit{60'000};
  SearchMode mode = SearchMode::First;
  std::uint64_t seed = 0;
  std::size_t ratio_f = 1;
  std::size_t ratio_b = 2;
  /// Single thread, workers served round-robin; output depends only on the
  /// seed. Needs max_size or program_budget to end before the time limit if
  /// the result must be reproducible.
  bool deterministic = false;
  /// Whole-space enumeration by increasing size, no cubes and no model.
  bool sequential = false;
  /// Largest program size considered; 0 grows until the time limit.
  std::size_t max_size = 0;
  /// Stop after this many evaluated programs; 0 for no limit.
  std::size_t program_budget = 0;
  std::size_t batch_size = 64;
  double delta = 0.99999;
  double alpha = 1.0;
  SpaceOptions space;
};

struct Solution {
  Program program;
  Projection projection;
  std::string sql;
  double elapsed_seconds = 0;
  std::vector<Op> cube;
};

enum class SynthesisStatus : std::uint8_t {
  Solved,
  /// Time limit reached with no solution.
  Timeout,
  /// Every program up to max_size (or the budget) was tried without a solution.
  Exhausted,
};

std::string_view to_string(SynthesisStatus s);

struct SynthesisStats {
  std::size_t programs = 0;
  std::size_t cubes = 0;
  std::size_t crashes = 0;
  std::size_t largest_size = 0;
};

struct SynthesisResult {
  SynthesisStatus status = SynthesisStatus::Timeout;
  /// In discovery order.
  std::vector<Solution> solutions;
  SynthesisStats stats;
  double elapsed_seconds = 0;
};

/// Enumerates the programs of one shape against an instance, executing lines
/// as the search descends so that shared prefixes run once.
class CubeSolver {
 public:
  struct Hooks {
    std::function<void(ScoreBatch&&)> batch;
    /// Returns false to stop after this solution.
    std::function<bool(SolutionFound&&)> solution;
    std::function<bool()> stop;
  };

  CubeSolver(const Instance& inst, const ArgumentSpace& space, const ExpectedOutput& expected,
             std::size_t batch_size = 64);

  /// Returns the number of programs evaluated and whether the shape was
  /// enumerated to the end.
  std::pair<std::size_t, bool> solve(const Shape& shape, const std::vector<Op>& cube, std::size_t worker,
                                     Hooks& hooks);

 private:
  const Instance& inst_;
  const ArgumentSpace& space_;
  const ExpectedOutput& expected_;
  std::size_t batch_size_;
};

/// Parallel divide-and-conquer synthesis (or the sequential baseline).
SynthesisResult synthesize(const Instance& inst, const SynthesisOptions& options);

}  // namespace sqlpbe
