#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sqlpbe/enumerator.hpp"
#include "sqlpbe/relational.hpp"
#include "test_support.hpp"

namespace sqlpbe {
namespace {

using namespace sqlpbe::testing;

class PruningOracle : public ::testing::TestWithParam<const char*> {};

TEST_P(PruningOracle, MatchesBruteForceMinusColumnErrors) {
  const Instance inst = load_instance(fixture(std::string("pruning/") + GetParam() + "/manifest.json"));
  const oracles::PruningReport r = oracles::pruning_check(inst, 2);
  EXPECT_GT(r.column_errors, 0u);
  EXPECT_EQ(r.enumerated + r.column_errors, r.brute_force);
  EXPECT_EQ(r.duplicates, 0u);
  EXPECT_TRUE(r.missing.empty()) << "first missing: " << (r.missing.empty() ? "" : r.missing.front());
  EXPECT_TRUE(r.extra.empty()) << "first extra: " << (r.extra.empty() ? "" : r.extra.front());
}

INSTANTIATE_TEST_SUITE_P(Fixtures, PruningOracle, ::testing::Values("grades", "staff", "sales"));

ArgumentSpace small_space() {
  SpaceOptions o;
  o.compound_filters = false;
  o.max_group_columns = 1;
  return build_argument_space(load_instance(fixture("partition/manifest.json")), o);
}

TEST(CubeDecomposition, CubesPartitionTheSearchSpace) {
  const oracles::CubeReport r = oracles::cube_decomposition_check(small_space(), 3);
  EXPECT_EQ(r.cubes, 13u + 169u + 2197u);
  EXPECT_EQ(r.overlaps, 0u);
  EXPECT_EQ(r.whole, r.union_size);
  EXPECT_TRUE(r.same_set);
}

TEST(ArgumentSpace, GradesArguments) {
  const Instance inst = load_instance(fixture("grades/manifest.json"));
  const ArgumentSpace s = build_argument_space(inst);
  EXPECT_TRUE(s.filters.empty());
  const bool has_n = std::any_of(s.aggregates.begin(), s.aggregates.end(), [](const AnnotatedAggregate& a) {
    return a.condition.fn == AggregateFn::n && a.condition.output == "n" && a.ann1.none();
  });
  EXPECT_TRUE(has_n);
  EXPECT_EQ(s.input_names, (std::vector<std::string>{"Grades", "Courses"}));
  EXPECT_EQ(s.universe.names_of(s.input_columns[1]), (std::vector<std::string>{"CourseID", "CourseName"}));
  EXPECT_TRUE(s.cols.front().cols.empty());
}

TEST(ArgumentSpace, ConstantOnTextColumnGivesEqualityAtoms) {
  Instance inst = load_instance(fixture("grades/manifest.json"));
  inst.constants = {S("A")};
  inst.comparison_columns = {"Grade"};
  SpaceOptions o;
  o.compound_filters = false;
  const ArgumentSpace s = build_argument_space(inst, o);
  ASSERT_EQ(s.filters.size(), 2u);
  EXPECT_EQ(to_string(s.filters[0].condition), "Grade == 'A'");
  EXPECT_EQ(to_string(s.filters[1].condition), "Grade != 'A'");
  EXPECT_EQ(build_argument_space(inst).filters.size(), 2u + 2u);
}

TEST(Enumerate, JoinThenSummariseCubeHoldsTheGradeCountProgram) {
  const Instance inst = load_instance(fixture("grades/manifest.json"));
  const ArgumentSpace s = build_argument_space(inst);
  const auto got = oracles::collect(s, Shape::cube({Op::natural_join, Op::summarise}), true);
  const Program want = parse_program("df1 = natural_join(Grades, Courses)\n"
                                     "df2 = summarise(df1, n = n(), [CourseName])");
  EXPECT_TRUE(got.count(to_string(want)));
}

TEST(Enumerate, NeverProducesFilterOnMissingColumn) {
  Instance inst = load_instance(fixture("grades/manifest.json"));
  inst.constants = {S("A")};
  const ArgumentSpace s = build_argument_space(inst);
  const auto got = oracles::collect(s, Shape::cube({Op::filter}), true);
  EXPECT_FALSE(got.empty());
  EXPECT_FALSE(got.count(to_string(parse_program("df1 = filter(Courses, Grade == 'A')"))));
  EXPECT_TRUE(got.count(to_string(parse_program("df1 = filter(Grades, Grade == 'A')"))));
}

TEST(Enumerate, EmptyFilterSpaceYieldsNothing) {
  const ArgumentSpace s = build_argument_space(load_instance(fixture("grades/manifest.json")));
  ASSERT_TRUE(s.filters.empty());
  EXPECT_TRUE(oracles::collect(s, Shape::cube({Op::filter}), true).empty());
  EXPECT_TRUE(oracles::collect(s, Shape::cube({Op::natural_join, Op::filter}), true).empty());
}

// Column sets from the inference rules agree with the tables the engine builds.
TEST(Enumerate, LineColumnsMatchExecutedSchemas) {
  Instance inst = load_instance(fixture("pruning/grades/manifest.json"));
  const ArgumentSpace s = build_argument_space(inst);
  const std::vector<Op> all(kAllOps.begin(), kAllOps.end());
  std::size_t executed = 0;
  CallbackSink sink([&](const Program& p) {
    const Validation v = validate(p, inst.inputs);
    EXPECT_TRUE(v.ok()) << to_string(p);
    Table out;
    try {
      out = run_program(p, inst.inputs);
    } catch (const EngineError& e) {
      EXPECT_FALSE(e.is_column_error()) << to_string(p) << ": " << e.what();
      return true;
    }
    ++executed;
    ColumnNames names;
    for (const auto& c : out.schema) names.insert(c.name);
    EXPECT_EQ(names, v.line_columns.back()) << to_string(p);
    return true;
  });
  enumerate(s, Shape::uniform(1, all), sink);
  EXPECT_GT(executed, 100u);
}

TEST(Enumerate, UnprunedIsASuperset) {
  const ArgumentSpace s = small_space();
  const auto pruned = oracles::collect(s, Shape::uniform(2, oracles::kMiniOps), true);
  const auto all = oracles::collect(s, Shape::uniform(2, oracles::kMiniOps), false);
  EXPECT_LT(pruned.size(), all.size());
  EXPECT_TRUE(std::includes(all.begin(), all.end(), pruned.begin(), pruned.end()));
}

TEST(Enumerate, SinkCanStopEarly) {
  const ArgumentSpace s = small_space();
  std::size_t seen = 0;
  CallbackSink sink([&](const Program&) { return ++seen < 5; });
  const EnumerationStats st = enumerate(s, Shape::uniform(2, oracles::kMiniOps), sink);
  EXPECT_EQ(seen, 5u);
  EXPECT_TRUE(st.stopped);
}

TEST(ColumnUniverse, OverflowThrows) {
  ColumnUniverse u(2);
  u.add("a", ValueType::Integer);
  u.add("b", ValueType::Integer);
  EXPECT_EQ(u.add("a", ValueType::Integer), 0u);
  EXPECT_THROW(u.add("c", ValueType::Integer), UniverseOverflow);
}

}  // namespace
}  // namespace sqlpbe
