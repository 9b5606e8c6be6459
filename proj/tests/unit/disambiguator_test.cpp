#include <gtest/gtest.h>

#include <cmath>

#include "sqlpbe/disambiguator.hpp"
#include "sqlpbe/fuzzy_eval.hpp"
#include "families.hpp"
#include "test_support.hpp"

namespace sqlpbe {
namespace {

using namespace sqlpbe::testing;

Split sized_split(std::vector<std::size_t> sizes, bool with_error = false) {
  Split s;
  std::size_t next = 0;
  for (std::size_t k : sizes) {
    OutputGroup g{Table{}, {}};
    for (std::size_t i = 0; i < k; ++i) g.members.push_back(next++);
    s.groups.push_back(std::move(g));
  }
  if (with_error) s.groups.push_back(OutputGroup{std::nullopt, {next}});
  // Pick like group_by_output does.
  for (std::size_t g = 1; g < sizes.size(); ++g) {
    std::size_t n = next + with_error;
    if (std::abs(double(sizes[g]) - n / 2.0) < std::abs(double(sizes[s.chosen]) - n / 2.0)) s.chosen = g;
  }
  return s;
}

TEST(BetterSplit, CloserToHalfWins) {
  const Split balanced = sized_split({1, 3, 3});
  const Split skewed = sized_split({1, 1, 5});
  EXPECT_EQ(balanced.chosen, 1u);
  EXPECT_TRUE(better_split(&skewed, balanced, 7));
  EXPECT_FALSE(better_split(&balanced, skewed, 7));
}

TEST(BetterSplit, SingleGroupNeverWins) {
  EXPECT_FALSE(better_split(nullptr, sized_split({7}), 7));
  EXPECT_TRUE(better_split(nullptr, sized_split({6, 1}), 7));
}

TEST(BetterSplit, TiesKeepEarlierUnlessMoreGroups) {
  const Split a = sized_split({2, 2});
  const Split b = sized_split({2, 2});
  EXPECT_FALSE(better_split(&a, b, 4));
  const Split c = sized_split({2, 1, 1});
  EXPECT_TRUE(better_split(&a, c, 4));
  EXPECT_FALSE(better_split(&c, a, 4));
}

TEST(BetterSplit, ErrorGroupCountsButIsNeverAsked) {
  const Split s = sized_split({3}, true);
  EXPECT_EQ(s.chosen, 0u);
  EXPECT_TRUE(better_split(nullptr, s, 4));
}

std::vector<Query> sql_queries(std::initializer_list<const char*> texts) {
  std::vector<Query> out;
  for (const char* t : texts) out.push_back(Query::sql(t));
  return out;
}

TEST(GroupByOutput, IdenticalQueriesShareAGroup) {
  const auto qs = sql_queries({"SELECT CourseID FROM Courses", "SELECT CourseID FROM Courses ORDER BY 1 DESC",
                               "SELECT Courses.CourseID AS x FROM Courses"});
  const Split s = group_by_output(qs, {0, 1, 2}, grades_db());
  ASSERT_EQ(s.groups.size(), 1u);
  EXPECT_EQ(s.groups[0].members, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(GroupByOutput, ErrorsFormTheirOwnGroupLast) {
  const auto qs = sql_queries({"SELECT nope FROM Courses", "SELECT CourseID FROM Courses",
                               "SELECT CourseID FROM Courses WHERE CourseID > 10", "SELECT * FROM Missing"});
  const Split s = group_by_output(qs, {0, 1, 2, 3}, grades_db());
  ASSERT_EQ(s.groups.size(), 3u);
  EXPECT_EQ(s.groups[0].members, std::vector<std::size_t>{1});
  EXPECT_EQ(s.groups[1].members, std::vector<std::size_t>{2});
  EXPECT_TRUE(s.groups[2].is_error());
  EXPECT_EQ(s.groups[2].members, (std::vector<std::size_t>{0, 3}));
  EXPECT_FALSE(s.groups[s.chosen].is_error());
}

class ScriptedOracle : public Oracle {
 public:
  explicit ScriptedOracle(std::vector<Answer> script) : script_(std::move(script)) {}
  Answer answer(const Database&, const Table&) override {
    if (next_ == script_.size()) throw OracleAbort("script ended");
    return script_[next_++];
  }

 private:
  std::vector<Answer> script_;
  std::size_t next_ = 0;
};

TEST(Disambiguate, SingleCandidateAsksNothing) {
  ScriptedOracle oracle({});
  const auto r = disambiguate(sql_queries({"SELECT 1"}), grades_db(), {}, oracle);
  EXPECT_EQ(r.index, 0u);
  EXPECT_TRUE(r.log.empty());
  EXPECT_FALSE(r.aborted);
}

TEST(Disambiguate, IndistinguishableReturnsEarliest) {
  ScriptedOracle oracle({});
  const auto qs = sql_queries({"SELECT CourseName FROM Courses", "SELECT CourseName FROM Courses ORDER BY 1"});
  const auto r = disambiguate(qs, grades_db(), {}, oracle);
  EXPECT_EQ(r.index, 0u);
  EXPECT_TRUE(r.log.empty());
}

TEST(Disambiguate, ThresholdFamilyNeedsLogarithmicQuestions) {
  for (std::size_t n : {2, 4, 8, 16, 32}) {
    const auto qs = threshold_queries(n);
    double total = 0;
    for (std::size_t truth = 0; truth < n; ++truth) {
      GroundTruthOracle oracle(qs[truth]);
      DisambiguationOptions o;
      o.seed = truth;
      const auto r = disambiguate(qs, threshold_db(), {}, oracle, o);
      EXPECT_EQ(r.index, truth) << "n=" << n;
      EXPECT_LE(r.log.size(), n - 1);
      for (const auto& e : r.log) EXPECT_LT(e.after, e.before);
      total += r.log.size();
    }
    EXPECT_LE(total / n, std::ceil(std::log2(double(n))) + 1) << "n=" << n;
  }
}

TEST(Disambiguate, SessionLogIsReproducible) {
  const auto qs = threshold_queries(8);
  auto run = [&] {
    GroundTruthOracle oracle(qs[5]);
    return disambiguate(qs, threshold_db(), {}, oracle, DisambiguationOptions{16, 99});
  };
  const auto a = run();
  const auto b = run();
  ASSERT_EQ(a.log.size(), b.log.size());
  for (std::size_t i = 0; i < a.log.size(); ++i) {
    EXPECT_EQ(a.log[i].input[0].table->rows, b.log[i].input[0].table->rows);
    EXPECT_EQ(a.log[i].output.rows, b.log[i].output.rows);
    EXPECT_EQ(a.log[i].answer, b.log[i].answer);
  }
}

TEST(Disambiguate, AbortReturnsEarliestRemainingFlagged) {
  ScriptedOracle oracle({Answer::No});
  const auto qs = threshold_queries(8);
  const auto r = disambiguate(qs, threshold_db(), {}, oracle);
  EXPECT_TRUE(r.aborted);
  ASSERT_EQ(r.log.size(), 1u);
  EXPECT_EQ(r.query.text(), qs[r.index].text());
}

TEST(Disambiguate, CandidateFixtureKeepsTheTruth) {
  const Instance inst = load_instance(fixture("grades_candidates/manifest.json"));
  std::vector<Query> qs;
  for (const auto& c : inst.candidates) qs.push_back(Query::sql(c));
  ASSERT_EQ(qs.size(), 7u);
  const Query truth = Query::sql(*inst.ground_truth);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GroundTruthOracle oracle(truth);
    const auto r = disambiguate(qs, inst.inputs, inst.foreign_keys, oracle, DisambiguationOptions{16, seed});
    EXPECT_LE(r.log.size(), 3u) << "seed " << seed;
    EXPECT_EQ(fuzzy_check(r.query, truth, inst).kind, VerdictKind::PossiblyCorrect) << r.query.text();
  }
}

TEST(DisambiguationSession, StateMachine) {
  const auto qs = threshold_queries(4);
  DisambiguationSession s(qs, threshold_db(), {});
  ASSERT_EQ(s.status(), DisambiguationSession::Status::AwaitingAnswer);
  EXPECT_EQ(s.question().input.size(), 1u);
  while (s.status() == DisambiguationSession::Status::AwaitingAnswer) s.answer(Answer::Yes);
  EXPECT_EQ(s.status(), DisambiguationSession::Status::Finished);
  EXPECT_THROW(s.answer(Answer::No), std::logic_error);
  EXPECT_THROW(s.question(), std::logic_error);
  EXPECT_GE(s.question_count(), 1u);
}

}  // namespace
}  // namespace sqlpbe
