#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "sqlpbe/cube_engine.hpp"
#include "sqlpbe/dsl.hpp"
#include "sqlpbe/relational.hpp"

namespace sqlpbe {

// Worker -> coordinator.

struct CubeRequest {
  std::size_t worker = 0;
};

struct ScoreBatch {
  std::size_t worker = 0;
  /// Operation sequence and score of each evaluated program.
  std::vector<std::pair<std::vector<Op>, double>> scores;
};

struct SolutionFound {
  std::size_t worker = 0;
  Program program;
  Projection projection;
  double elapsed_seconds = 0;
  std::vector<Op> cube;
};

struct Exhausted {
  std::size_t worker = 0;
  std::vector<Op> cube;
  std::size_t programs = 0;
  /// False when the worker stopped before finishing the cube.
  bool complete = true;
};

struct WorkerCrash {
  std::size_t worker = 0;
  std::vector<Op> cube;
  std::string what;
};

// Coordinator -> worker.

struct CubeAssignment {
  std::vector<Op> cube;
  DslSubset subset = DslSubset::Full;
};

struct Shutdown {};

using WorkerMessage = std::variant<CubeRequest, ScoreBatch, SolutionFound, Exhausted, WorkerCrash>;
using CoordinatorMessage = std::variant<CubeAssignment, Shutdown>;

}  // namespace sqlpbe
