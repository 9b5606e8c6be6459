#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqlpbe/errors.hpp"
#include "sqlpbe/fuzzer.hpp"
#include "sqlpbe/instance.hpp"
#include "sqlpbe/query.hpp"
#include "sqlpbe/relational.hpp"

namespace sqlpbe {

enum class Answer : std::uint8_t { Yes, No };

std::string_view to_string(Answer a);

/// Raised by an oracle when the user quits.
class OracleAbort : public Error {
 public:
  using Error::Error;
};

/// Answers "is O' the output you want for input I'?".
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual Answer answer(const Database& input, const Table& output) = 0;
};

/// Runs a reference query on the input and compares laxly. A reference that
/// fails to run answers no.
class GroundTruthOracle : public Oracle {
 public:
  explicit GroundTruthOracle(Query truth) : truth_(std::move(truth)) {}
  Answer answer(const Database& input, const Table& output) override;

 private:
  Query truth_;
};

/// Queries that agree on one fuzzed input. `output` is empty for the group of
/// queries that failed to run.
struct OutputGroup {
  std::optional<Table> output;
  /// Indices into the candidate list, ascending.
  std::vector<std::size_t> members;

  bool is_error() const { return !output.has_value(); }
};

struct Split {
  Database input;
  /// Non-error groups in order of their first member, then the error group.
  std::vector<OutputGroup> groups;
  /// Group whose output is shown; never the error group.
  std::size_t chosen = 0;
};

/// Runs each listed candidate on `input` and groups the outputs under lax
/// equality. `chosen` is set to the non-error group closest to half of
/// `members` (earliest on ties).
Split group_by_output(const std::vector<Query>& candidates, const std::vector<std::size_t>& members,
                      Database input, std::optional<std::chrono::milliseconds> budget = std::nullopt);

/// Whether `candidate` is a strictly better question than `best` for `n`
/// remaining queries. A split needs two groups and a non-error group to ask
/// about; closer to n/2 wins, then more groups.
bool better_split(const Split* best, const Split& candidate, std::size_t n);

struct DisambiguationOptions {
  /// Fuzzed inputs tried per question.
  std::size_t rounds = 16;
  std::uint64_t seed = 0;
  FuzzConfig fuzz;
  std::optional<std::chrono::milliseconds> query_budget = std::chrono::milliseconds(10'000);
};

struct LogEntry {
  Database input;
  Table output;
  Answer answer = Answer::No;
  std::size_t before = 0;
  std::size_t after = 0;
};

using SessionLog = std::vector<LogEntry>;

/// The question loop as a state machine, so that answers can arrive from a
/// prompt, an HTTP request or an oracle.
class DisambiguationSession {
 public:
  enum class Status : std::uint8_t { AwaitingAnswer, Finished, Aborted };

  /// `candidates` are in discovery order; all are assumed to satisfy the
  /// example. Computes the first question (or the result) immediately.
  DisambiguationSession(std::vector<Query> candidates, Database inputs, std::vector<ForeignKey> foreign_keys,
                        DisambiguationOptions options = {});

  Status status() const { return status_; }
  /// Current question; only while awaiting an answer.
  const Split& question() const;
  const Table& question_output() const;

  /// Throws std::logic_error unless awaiting an answer.
  void answer(Answer a);
  void abort();

  /// Candidate returned when finished (earliest remaining when aborted).
  std::size_t result_index() const;
  const Query& result() const { return candidates_[result_index()]; }

  const std::vector<Query>& candidates() const { return candidates_; }
  const std::vector<std::size_t>& remaining() const { return remaining_; }
  const SessionLog& log() const { return log_; }
  std::size_t question_count() const { return log_.size(); }
  const Database& inputs() const { return inputs_; }

 private:
  void advance();

  std::vector<Query> candidates_;
  Database inputs_;
  std::vector<ForeignKey> foreign_keys_;
  DisambiguationOptions options_;
  std::vector<std::size_t> remaining_;
  std::optional<Split> question_;
  SessionLog log_;
  Status status_ = Status::Finished;
  std::size_t level_ = 0;
};

struct DisambiguationResult {
  std::size_t index = 0;
  Query query;
  SessionLog log;
  /// The oracle quit; `query` is the earliest candidate still in play.
  bool aborted = false;
};

DisambiguationResult disambiguate(const std::vector<Query>& candidates, const Database& inputs,
                                  const std::vector<ForeignKey>& foreign_keys, Oracle& oracle,
                                  const DisambiguationOptions& options = {});

}  // namespace sqlpbe
