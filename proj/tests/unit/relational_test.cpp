#include <gtest/gtest.h>

#include "sqlpbe/relational.hpp"
#include "test_support.hpp"

namespace sqlpbe {
namespace {

using namespace sqlpbe::testing;

Env env_of(std::initializer_list<std::pair<std::string, Table>> tables) {
  Env env;
  for (const auto& [name, t] : tables) env.emplace(name, std::make_shared<const Table>(t));
  return env;
}

TEST(Relational, NaturalJoinThenCountReproducesGradeCounts) {
  const Program p = parse_program(
      "df1 = natural_join(Grades, Courses)\n"
      "df2 = summarise(df1, n = n(), [CourseName])");
  Table out = run_program(p, grades_db());
  ASSERT_EQ(out.schema.names(), (std::vector<std::string>{"CourseName", "n"}));
  Table renamed = project(out, Projection{{0, 1}, {"CourseName", "GradeCount"}});
  EXPECT_TRUE(tables_equal_strict(renamed, grade_counts()));
}

TEST(Relational, NaturalJoinColumnOrderAndRowCount) {
  Env env = env_of({{"G", grades()}, {"C", courses()}});
  Line l = parse_program("df1 = natural_join(G, C)").lines[0];
  Table t = apply_line(l, env);
  EXPECT_EQ(t.schema.names(), (std::vector<std::string>{"CourseID", "StudentID", "Grade", "CourseName"}));
  EXPECT_EQ(t.rows.size(), 9u);
}

TEST(Relational, NullKeysNeverJoin) {
  Table a = make_table({{"k", ValueType::Integer}, {"x", ValueType::Text}}, {{I(1), S("a")}, {N(), S("b")}});
  Table b = make_table({{"k", ValueType::Integer}, {"y", ValueType::Text}}, {{I(1), S("c")}, {N(), S("d")}});
  Env env = env_of({{"A", a}, {"B", b}});
  EXPECT_EQ(apply_line(parse_program("o = natural_join(A, B)").lines[0], env).rows.size(), 1u);
  Table left = apply_line(parse_program("o = left_join(A, B)").lines[0], env);
  ASSERT_EQ(left.rows.size(), 2u);
  EXPECT_TRUE(left.rows[1][2].is_null());
}

TEST(Relational, NaturalJoinWithoutSharedColumnsIsCrossProduct) {
  Table a = make_table({{"x", ValueType::Integer}}, {{I(1)}, {I(2)}});
  Table b = make_table({{"y", ValueType::Integer}}, {{I(3)}, {I(4)}, {I(5)}});
  Env env = env_of({{"A", a}, {"B", b}});
  EXPECT_EQ(apply_line(parse_program("o = natural_join(A, B)").lines[0], env).rows.size(), 6u);
  EXPECT_THROW(apply_line(parse_program("o = left_join(A, B)").lines[0], env), EngineError);
}

TEST(Relational, FilterTreatsNullAsFalse) {
  Table a = make_table({{"v", ValueType::Integer}}, {{I(1)}, {N()}, {I(7)}});
  Env env = env_of({{"A", a}});
  EXPECT_EQ(apply_line(parse_program("o = filter(A, v > 0)").lines[0], env).rows.size(), 2u);
  EXPECT_EQ(apply_line(parse_program("o = filter(A, v != 1)").lines[0], env).rows.size(), 1u);
  EXPECT_EQ(apply_line(parse_program("o = filter(A, v < 2 | v > 5)").lines[0], env).rows.size(), 2u);
  EXPECT_EQ(apply_line(parse_program("o = filter(A, v > 0 & v < 5)").lines[0], env).rows.size(), 1u);
}

TEST(Relational, FilterTypeMismatch) {
  Env env = env_of({{"G", grades()}});
  try {
    apply_line(parse_program("o = filter(G, Grade > 3)").lines[0], env);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.kind(), EngineErrorKind::TypeMismatch);
  }
}

TEST(Relational, UnknownColumnIsColumnError) {
  Env env = env_of({{"G", grades()}});
  try {
    apply_line(parse_program("o = filter(G, Nope > 3)").lines[0], env);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.kind(), EngineErrorKind::UnknownColumn);
    EXPECT_TRUE(e.is_column_error());
  }
}

TEST(Relational, SummariseAggregates) {
  Table t = make_table({{"g", ValueType::Text}, {"v", ValueType::Integer}},
                       {{S("a"), I(3)}, {S("a"), I(1)}, {S("b"), I(5)}, {S("a"), I(1)}, {S("b"), N()}});
  Env env = env_of({{"T", t}});
  auto run = [&](const std::string& cond) {
    return apply_line(parse_program("o = summarise(T, " + cond + ", [g])").lines[0], env);
  };
  // Group a holds 3,1,1; group b holds 5,NULL.
  auto second = [](const Table& r, std::size_t row) { return r.rows[row][1]; };
  Table n = run("x = n()");
  EXPECT_EQ(second(n, 0), I(3));
  EXPECT_EQ(second(n, 1), I(2));
  EXPECT_EQ(second(run("x = n_distinct(v)"), 0), I(2));
  EXPECT_EQ(second(run("x = sum(v)"), 0), I(5));
  EXPECT_EQ(second(run("x = sum(v)"), 1), I(5));
  EXPECT_EQ(second(run("x = mean(v)"), 0), R(5.0 / 3.0));
  EXPECT_EQ(second(run("x = min(v)"), 0), I(1));
  EXPECT_EQ(second(run("x = max(v)"), 0), I(3));
  EXPECT_EQ(second(run("x = mode(v)"), 0), I(1));
  EXPECT_EQ(second(run("x = median(v)"), 0), R(1.0));
  EXPECT_EQ(second(run("x = median(v)"), 1), R(5.0));
}

TEST(Relational, SummariseWithoutGroupsAlwaysYieldsOneRow) {
  Table empty = make_table({{"v", ValueType::Integer}}, {});
  Env env = env_of({{"T", empty}});
  Table n = apply_line(parse_program("o = summarise(T, n = n(), [])").lines[0], env);
  ASSERT_EQ(n.rows.size(), 1u);
  EXPECT_EQ(n.rows[0][0], I(0));
  Table s = apply_line(parse_program("o = summarise(T, s = sum(v), [])").lines[0], env);
  EXPECT_TRUE(s.rows[0][0].is_null());
}

TEST(Relational, SummarisePremises) {
  Env env = env_of({{"G", grades()}});
  try {
    apply_line(parse_program("o = summarise(G, Grade = n(), [Grade])").lines[0], env);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.kind(), EngineErrorKind::ColumnConflict);
  }
  try {
    apply_line(parse_program("o = summarise(G, x = cumsum(CourseID), [Grade])").lines[0], env);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.kind(), EngineErrorKind::ArityError);
  }
}

TEST(Relational, IntegerSumOverflowIsReported) {
  Table t = make_table({{"v", ValueType::Integer}}, {{I(INT64_MAX)}, {I(1)}});
  Env env = env_of({{"T", t}});
  try {
    apply_line(parse_program("o = summarise(T, s = sum(v), [])").lines[0], env);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.kind(), EngineErrorKind::Overflow);
  }
}

TEST(Relational, MutateWindowsFollowRowOrder) {
  Table t = make_table({{"v", ValueType::Integer}}, {{I(3)}, {I(1)}, {N()}, {I(4)}, {I(1)}});
  Env env = env_of({{"T", t}});
  auto col = [&](const std::string& cond) {
    Table r = apply_line(parse_program("o = mutate(T, " + cond + ")").lines[0], env);
    std::vector<Value> out;
    for (auto& row : r.rows) out.push_back(row.back());
    return out;
  };
  EXPECT_EQ(col("x = cumsum(v)"), (std::vector<Value>{I(3), I(4), I(4), I(8), I(9)}));
  EXPECT_EQ(col("x = pmin(v)"), (std::vector<Value>{I(3), I(1), I(1), I(1), I(1)}));
  EXPECT_EQ(col("x = pmax(v)"), (std::vector<Value>{I(3), I(3), I(3), I(4), I(4)}));
  EXPECT_EQ(col("x = lag(v)"), (std::vector<Value>{N(), I(3), I(1), N(), I(4)}));
  EXPECT_EQ(col("x = lead(v)"), (std::vector<Value>{I(1), N(), I(4), I(1), N()}));
  EXPECT_EQ(col("x = rank(v)"), (std::vector<Value>{I(4), I(2), I(1), I(5), I(2)}));
  EXPECT_EQ(col("x = row_number()"), (std::vector<Value>{I(1), I(2), I(3), I(4), I(5)}));
  EXPECT_EQ(col("x = n()"), (std::vector<Value>(5, I(5))));
  EXPECT_EQ(col("x = max(v)"), (std::vector<Value>(5, I(4))));
}

TEST(Relational, SemiAntiJoin) {
  Table a = make_table({{"k", ValueType::Integer}, {"x", ValueType::Text}},
                       {{I(1), S("a")}, {I(2), S("b")}, {N(), S("c")}});
  Table b = make_table({{"k", ValueType::Integer}}, {{I(2)}, {N()}});
  Env env = env_of({{"A", a}, {"B", b}});
  Table semi = apply_line(parse_program("o = semi_join(A, B)").lines[0], env);
  ASSERT_EQ(semi.rows.size(), 1u);
  EXPECT_EQ(semi.rows[0][0], I(2));
  Table anti = apply_line(parse_program("o = anti_join(A, B, [])").lines[0], env);
  EXPECT_EQ(anti.rows.size(), 2u);
  Table anti_k = apply_line(parse_program("o = anti_join(A, B, [k])").lines[0], env);
  EXPECT_TRUE(tables_equal_strict(anti, anti_k));
}

TEST(Relational, UnionBindsRowsAndPadsMissingColumns) {
  Table a = make_table({{"k", ValueType::Integer}, {"x", ValueType::Text}}, {{I(1), S("a")}});
  Table b = make_table({{"k", ValueType::Real}, {"y", ValueType::Text}}, {{R(2.5), S("z")}});
  Env env = env_of({{"A", a}, {"B", b}});
  Table u = apply_line(parse_program("o = union(A, B)").lines[0], env);
  EXPECT_EQ(u.schema.names(), (std::vector<std::string>{"k", "x", "y"}));
  EXPECT_EQ(u.schema[0].type, ValueType::Real);
  ASSERT_EQ(u.rows.size(), 2u);
  EXPECT_TRUE(u.rows[0][2].is_null());
  EXPECT_TRUE(u.rows[1][1].is_null());
  u.validate();

  Table c = make_table({{"k", ValueType::Text}}, {{S("q")}});
  env.emplace("C", std::make_shared<const Table>(c));
  try {
    apply_line(parse_program("o = union(A, C)").lines[0], env);
    FAIL();
  } catch (const EngineError& e) {
    EXPECT_EQ(e.kind(), EngineErrorKind::NonUnionCompatible);
  }
}

TEST(Relational, IntersectDistinctValues) {
  Table a = make_table({{"k", ValueType::Integer}}, {{I(1)}, {I(2)}, {I(2)}, {N()}, {I(3)}});
  Table b = make_table({{"k", ValueType::Integer}}, {{I(2)}, {I(3)}, {N()}, {I(9)}});
  Env env = env_of({{"A", a}, {"B", b}});
  Table r = apply_line(parse_program("o = intersect(A, B, k)").lines[0], env);
  EXPECT_EQ(r.rows, (std::vector<Row>{{I(2)}, {N()}, {I(3)}}));
}

TEST(Relational, InnerAndCrossJoin) {
  Table a = make_table({{"a", ValueType::Integer}, {"s", ValueType::Text}}, {{I(1), S("x")}, {I(2), S("y")}});
  Table b = make_table({{"b", ValueType::Integer}, {"s", ValueType::Text}}, {{I(2), S("q")}, {I(2), S("r")}});
  Env env = env_of({{"A", a}, {"B", b}});
  Table inner = apply_line(parse_program("o = inner_join(A, B, a == b)").lines[0], env);
  EXPECT_EQ(inner.schema.names(), (std::vector<std::string>{"a", "s", "b"}));
  EXPECT_EQ(inner.rows.size(), 2u);
  Table cross = apply_line(parse_program("o = cross_join(A, B, s == s)").lines[0], env);
  EXPECT_TRUE(cross.rows.empty());
  EXPECT_THROW(apply_line(parse_program("o = cross_join(A, B, a == b)").lines[0], env), EngineError);
}

TEST(Relational, LaxComparisonIgnoresNamesOrderAndNumericForm) {
  Table a = make_table({{"x", ValueType::Integer}, {"y", ValueType::Text}}, {{I(1), S("p")}, {I(2), S("q")}});
  Table b = make_table({{"name", ValueType::Text}, {"num", ValueType::Text}}, {{S("q"), S("2.0")}, {S("p"), S("1")}});
  EXPECT_TRUE(tables_equal_lax(a, b));
  EXPECT_FALSE(tables_equal_strict(a, b));
  Table c = make_table({{"x", ValueType::Real}, {"y", ValueType::Text}}, {{R(1.0), S("p")}, {R(2.0), S("p")}});
  EXPECT_FALSE(tables_equal_lax(a, c));
}

TEST(Relational, LaxComparisonResolvesTiedColumns) {
  // Columns with the same value multiset must still be matched row-wise.
  Table a = make_table({{"x", ValueType::Integer}, {"y", ValueType::Integer}}, {{I(1), I(2)}, {I(2), I(1)}});
  Table b = make_table({{"x", ValueType::Integer}, {"y", ValueType::Integer}}, {{I(1), I(1)}, {I(2), I(2)}});
  Table c = make_table({{"y", ValueType::Integer}, {"x", ValueType::Integer}}, {{I(2), I(1)}, {I(1), I(2)}});
  EXPECT_FALSE(tables_equal_lax(a, b));
  EXPECT_TRUE(tables_equal_lax(a, c));
}

TEST(Relational, ResultSchemaMatchesExecution) {
  std::map<std::string, Schema, std::less<>> schemas{{"Grades", grades().schema}, {"Courses", courses().schema}};
  Line l = parse_program("df1 = natural_join(Grades, Courses)").lines[0];
  EXPECT_EQ(result_schema(l, schemas), run_program(Program{{l}}, grades_db()).schema);
}

}  // namespace
}  // namespace sqlpbe
