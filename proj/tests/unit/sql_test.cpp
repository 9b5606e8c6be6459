#include <gtest/gtest.h>

#include "sqlpbe/relational.hpp"
#include "sqlpbe/sql.hpp"
#include "test_support.hpp"

namespace sqlpbe {
namespace {

using namespace sqlpbe::testing;

Database mixed_db() {
  Table people = make_table({{"pid", ValueType::Integer},
                             {"name", ValueType::Text},
                             {"age", ValueType::Integer},
                             {"score", ValueType::Real},
                             {"active", ValueType::Boolean},
                             {"joined", ValueType::DateTime}},
                            {{I(1), S("ann"), I(31), R(2.5), B(true), Value::datetime("2020-01-05")},
                             {I(2), S("bob"), I(25), R(7.0), B(false), Value::datetime("2021-03-01")},
                             {I(3), S("cy"), N(), R(7.0), B(true), Value::datetime("2019-12-31")},
                             {I(4), S("di"), I(25), N(), B(true), N()},
                             {I(5), S("o'neil"), I(40), R(-1.25), B(false), Value::datetime("2021-03-01")}});
  Table orders = make_table({{"oid", ValueType::Integer}, {"pid", ValueType::Integer}, {"amount", ValueType::Integer}},
                            {{I(100), I(1), I(20)},
                             {I(101), I(1), I(5)},
                             {I(102), I(2), I(20)},
                             {I(103), I(4), N()},
                             {I(104), N(), I(7)},
                             {I(105), I(9), I(1)}});
  Table vip = make_table({{"pid", ValueType::Integer}, {"level", ValueType::Text}},
                         {{I(2), S("gold")}, {I(5), S("silver")}, {I(5), S("gold")}});
  return {named("people", people), named("orders", orders), named("vip", vip)};
}

/// Engine result and SQLite result of the translated query must agree.
void expect_same(const Program& p, const Database& db, bool strict = true) {
  SCOPED_TRACE(to_string(p));
  Table engine = run_program(p, db);
  const std::string sql = to_sql(p, db);
  SCOPED_TRACE(sql);
  SqliteDatabase sqlite(db);
  Table via_sql = coerce_like(sqlite.query(sql), engine.schema);
  EXPECT_EQ(via_sql.schema.names(), engine.schema.names());
  if (strict) {
    EXPECT_TRUE(tables_equal_strict(engine, via_sql)) << engine.render() << "\nvs\n" << via_sql.render();
  } else {
    EXPECT_TRUE(tables_equal_lax(engine, via_sql)) << engine.render() << "\nvs\n" << via_sql.render();
  }
}

TEST(Sql, GradesPerCourseQueryReproducesExpectedOutput) {
  const Program p = parse_program(
      "df1 = natural_join(Grades, Courses)\n"
      "df2 = summarise(df1, n = n(), [CourseName])");
  const Database db = grades_db();
  const std::string sql = to_sql(p, db, Projection{{0, 1}, {"CourseName", "GradeCount"}});
  EXPECT_NE(sql.find("NATURAL JOIN"), std::string::npos);
  EXPECT_NE(sql.find("GROUP BY"), std::string::npos);
  EXPECT_NE(sql.find("count(*)"), std::string::npos);
  SqliteDatabase sqlite(db);
  EXPECT_TRUE(tables_equal_strict(sqlite.query(sql), grade_counts())) << sql;
}

TEST(Sql, SingleFilterIsOneSelect) {
  Database db = {named("T", make_table({{"a", ValueType::Integer}}, {{I(3)}, {I(9)}}))};
  EXPECT_EQ(to_sql(parse_program("df1 = filter(T, a > 5)"), db), "SELECT * FROM \"T\" WHERE \"a\" > 5");
}

TEST(Sql, QuotingEscapes) {
  EXPECT_EQ(quote_identifier("a\"b"), "\"a\"\"b\"");
  EXPECT_EQ(sql_literal(S("o'neil")), "'o''neil'");
  EXPECT_EQ(sql_literal(B(true)), "1");
  EXPECT_EQ(sql_literal(N()), "NULL");
}

class SqlRoundTrip : public ::testing::TestWithParam<const char*> {};

TEST_P(SqlRoundTrip, EngineAgreesWithSqlite) { expect_same(parse_program(GetParam()), mixed_db()); }

INSTANTIATE_TEST_SUITE_P(
    Programs, SqlRoundTrip,
    ::testing::Values(
        "df1 = natural_join(people, orders)",
        "df1 = natural_join3(people, orders, vip)",
        "df1 = natural_join4(people, orders, vip, vip)",
        "df1 = left_join(people, orders)",
        "df1 = inner_join(orders, people, pid == pid)",
        "df1 = inner_join(people, orders, age == amount)",
        "df1 = cross_join(people, vip, pid == pid)",
        "df1 = filter(people, age > 25)",
        "df1 = filter(people, age >= 25 & score < 7.0)",
        "df1 = filter(people, age == 25 | name == 'o''neil')",
        "df1 = filter(people, active == TRUE)",
        "df1 = filter(people, joined < '2021-01-01')",
        "df1 = filter(people, age != pid)",
        "df1 = summarise(people, n = n(), [age])",
        "df1 = summarise(people, n = n(), [])",
        "df1 = summarise(people, x = n_distinct(score), [active])",
        "df1 = summarise(people, x = sum(age), [active])",
        "df1 = summarise(people, x = sum(score), [active, age])",
        "df1 = summarise(people, x = mean(age), [active])",
        "df1 = summarise(people, x = min(name), [active])",
        "df1 = summarise(people, x = max(joined), [active])",
        "df1 = summarise(people, x = str_count(name), [active])",
        "df1 = summarise(people, x = mode(score), [active])",
        "df1 = summarise(people, x = mode(score), [])",
        "df1 = summarise(people, x = median(age), [active])",
        "df1 = summarise(people, x = median(score), [])",
        "df1 = mutate(people, x = n())",
        "df1 = mutate(people, x = max(age))",
        "df1 = mutate(people, x = n_distinct(age))",
        "df1 = mutate(people, x = mean(score))",
        "df1 = mutate(people, x = median(age))",
        "df1 = mutate(people, x = mode(age))",
        "df1 = mutate(people, x = cumsum(age))",
        "df1 = mutate(people, x = pmin(score))",
        "df1 = mutate(people, x = pmax(name))",
        "df1 = mutate(people, x = lead(name))",
        "df1 = mutate(people, x = lag(age))",
        "df1 = mutate(people, x = rank(age))",
        "df1 = mutate(people, x = row_number())",
        "df1 = mutate(people, age = max(age))",
        "df1 = anti_join(people, orders, [])",
        "df1 = anti_join(people, orders, [pid])",
        "df1 = semi_join(people, vip)",
        "df1 = union(people, vip)",
        "df1 = union(orders, orders)",
        "df1 = intersect(people, orders, pid)",
        "df1 = natural_join(people, orders)\ndf2 = summarise(df1, s = sum(amount), [name])",
        "df1 = filter(orders, amount > 5)\ndf2 = natural_join(people, df1)\ndf3 = summarise(df2, n = n(), [age])",
        "df1 = summarise(orders, n = n(), [pid])\ndf2 = filter(df1, n > 1)\ndf3 = semi_join(people, df2)",
        "df1 = summarise(orders, m = max(amount), [pid])\ndf2 = natural_join(orders, df1)\n"
        "df3 = filter(df2, amount == m)",
        "df1 = union(people, vip)\ndf2 = summarise(df1, n = n(), [level])",
        "df1 = intersect(people, vip, pid)\ndf2 = natural_join(df1, orders)"));

TEST(Sql, ProjectionAppliesToCompoundQueries) {
  const Database db = mixed_db();
  const Program p = parse_program("df1 = union(people, vip)");
  const Table engine = project(run_program(p, db), Projection{{6, 1}, {"L", "N"}});
  SqliteDatabase sqlite(db);
  const Table via_sql = sqlite.query(to_sql(p, db, Projection{{6, 1}, {"L", "N"}}));
  EXPECT_EQ(via_sql.schema.names(), (std::vector<std::string>{"L", "N"}));
  EXPECT_TRUE(tables_equal_strict(engine, via_sql));
}

TEST(Sql, QueryBudgetInterruptsLongQueries) {
  SqliteDatabase sqlite;
  EXPECT_THROW(sqlite.query("WITH RECURSIVE c(x) AS (SELECT 1 UNION ALL SELECT x + 1 FROM c) SELECT max(x) FROM c",
                            std::chrono::milliseconds(50)),
               SqlError);
}

}  // namespace
}  // namespace sqlpbe
