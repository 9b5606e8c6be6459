#include "sqlpbe/disambiguator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace sqlpbe {

std::string_view to_string(Answer a) { return a == Answer::Yes ? "yes" : "no"; }

Answer GroundTruthOracle::answer(const Database& input, const Table& output) {
  try {
    return tables_equal_lax(truth_.run(input), output) ? Answer::Yes : Answer::No;
  } catch (const Error&) {
    return Answer::No;
  }
}

namespace {

double distance_to_half(std::size_t group, std::size_t n) {
  return std::abs(static_cast<double>(group) - static_cast<double>(n) / 2.0);
}

}  // namespace

Split group_by_output(const std::vector<Query>& candidates, const std::vector<std::size_t>& members,
                      Database input, std::optional<std::chrono::milliseconds> budget) {
  Split split;
  std::map<LaxForm, std::size_t> index;
  OutputGroup errors;
  for (std::size_t m : members) {
    std::optional<Table> out;
    try {
      out = candidates[m].run(input, budget);
    } catch (const Error&) {
      errors.members.push_back(m);
      continue;
    }
    LaxForm key = lax_canonical(*out);
    auto [it, inserted] = index.emplace(std::move(key), split.groups.size());
    if (inserted) split.groups.push_back(OutputGroup{std::move(out), {}});
    split.groups[it->second].members.push_back(m);
  }
  const std::size_t asked = split.groups.size();
  for (std::size_t g = 1; g < asked; ++g) {
    if (distance_to_half(split.groups[g].members.size(), members.size()) <
        distance_to_half(split.groups[split.chosen].members.size(), members.size())) {
      split.chosen = g;
    }
  }
  if (!errors.members.empty()) split.groups.push_back(std::move(errors));
  split.input = std::move(input);
  return split;
}

bool better_split(const Split* best, const Split& candidate, std::size_t n) {
  if (candidate.groups.size() < 2 || candidate.groups[candidate.chosen].is_error()) return false;
  if (!best) return true;
  const double c = distance_to_half(candidate.groups[candidate.chosen].members.size(), n);
  const double b = distance_to_half(best->groups[best->chosen].members.size(), n);
  if (c != b) return c < b;
  return candidate.groups.size() > best->groups.size();
}

DisambiguationSession::DisambiguationSession(std::vector<Query> candidates, Database inputs,
                                             std::vector<ForeignKey> foreign_keys, DisambiguationOptions options)
    : candidates_(std::move(candidates)),
      inputs_(std::move(inputs)),
      foreign_keys_(std::move(foreign_keys)),
      options_(std::move(options)) {
  if (candidates_.empty()) throw std::invalid_argument("no candidate queries");
  if (options_.rounds == 0) throw std::invalid_argument("rounds must be at least 1");
  for (std::size_t i = 0; i < candidates_.size(); ++i) remaining_.push_back(i);
  advance();
}

void DisambiguationSession::advance() {
  question_.reset();
  status_ = Status::Finished;
  if (remaining_.size() < 2) return;
  // Constants of the queries still in play, so the pool narrows with them.
  std::vector<Value> constants;
  for (std::size_t i : remaining_) {
    for (auto& c : candidates_[i].constants()) {
      if (std::find(constants.begin(), constants.end(), c) == constants.end()) constants.push_back(std::move(c));
    }
  }
  std::optional<Split> best;
  for (std::size_t round = 0; round < options_.rounds; ++round) {
    FuzzConfig cfg = options_.fuzz;
    cfg.seed = derive_seed(options_.seed, level_, round);
    Database fuzzed;
    try {
      fuzzed = fuzz_database(inputs_, constants, foreign_keys_, cfg);
    } catch (const EmptyKeyPool&) {
      continue;
    }
    Split s = group_by_output(candidates_, remaining_, std::move(fuzzed), options_.query_budget);
    if (better_split(best ? &*best : nullptr, s, remaining_.size())) best = std::move(s);
  }
  ++level_;
  if (!best) return;
  question_ = std::move(best);
  status_ = Status::AwaitingAnswer;
}

const Split& DisambiguationSession::question() const {
  if (status_ != Status::AwaitingAnswer) throw std::logic_error("no question pending");
  return *question_;
}

const Table& DisambiguationSession::question_output() const {
  const Split& s = question();
  return *s.groups[s.chosen].output;
}

void DisambiguationSession::answer(Answer a) {
  if (status_ != Status::AwaitingAnswer) throw std::logic_error("session is not awaiting an answer");
  const Split& s = *question_;
  const std::vector<std::size_t>& group = s.groups[s.chosen].members;
  std::vector<std::size_t> next;
  if (a == Answer::Yes) {
    next = group;
  } else {
    std::set_difference(remaining_.begin(), remaining_.end(), group.begin(), group.end(), std::back_inserter(next));
  }
  log_.push_back(LogEntry{s.input, *s.groups[s.chosen].output, a, remaining_.size(), next.size()});
  remaining_ = std::move(next);
  advance();
}

void DisambiguationSession::abort() {
  if (status_ != Status::AwaitingAnswer) throw std::logic_error("session is not awaiting an answer");
  question_.reset();
  status_ = Status::Aborted;
}

std::size_t DisambiguationSession::result_index() const { return remaining_.front(); }

DisambiguationResult disambiguate(const std::vector<Query>& candidates, const Database& inputs,
                                  const std::vector<ForeignKey>& foreign_keys, Oracle& oracle,
                                  const DisambiguationOptions& options) {
  DisambiguationSession session(candidates, inputs, foreign_keys, options);
  while (session.status() == DisambiguationSession::Status::AwaitingAnswer) {
    Answer a;
    try {
      a = oracle.answer(session.question().input, session.question_output());
    } catch (const OracleAbort&) {
      session.abort();
      break;
    }
    session.answer(a);
  }
  const std::size_t i = session.result_index();
  return DisambiguationResult{i, session.candidates()[i], session.log(),
                              session.status() == DisambiguationSession::Status::Aborted};
}

}  // namespace sqlpbe
