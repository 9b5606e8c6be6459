#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "sqlpbe/instance.hpp"
#include "sqlpbe/relational.hpp"
#include "test_support.hpp"

namespace sqlpbe {
namespace {

using namespace sqlpbe::testing;
namespace fs = std::filesystem;

TEST(Csv, QuotingAndLineEnds) {
  const auto recs = parse_csv("\xEF\xBB\xBF" "a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n,\"\"\n");
  ASSERT_EQ(recs.size(), 3u);
  EXPECT_EQ(recs[0][0].text, "a");
  EXPECT_EQ(recs[1][0].text, "x, y");
  EXPECT_EQ(recs[1][1].text, "say \"hi\"");
  EXPECT_FALSE(recs[2][0].quoted);
  EXPECT_TRUE(recs[2][1].quoted);
  EXPECT_THROW(parse_csv("a,b\n1\n"), ParseError);
  EXPECT_THROW(parse_csv("a\n\"open\n"), ParseError);
}

TEST(Csv, WriteThenReadKeepsTheTable) {
  const Table t = make_table({{"s", ValueType::Text}, {"n", ValueType::Integer}, {"r", ValueType::Real}},
                             {{S("a,b"), I(1), R(0.5)}, {S(""), N(), R(-2)}, {S("q\"uote"), I(3), N()}});
  const Table back = table_from_csv(parse_csv(write_csv(t)));
  EXPECT_EQ(back.schema, t.schema);
  EXPECT_TRUE(tables_equal_strict(back, t));
}

TEST(InferType, Precedence) {
  EXPECT_EQ(infer_type({"10", "11", "12"}), ValueType::Integer);
  EXPECT_EQ(infer_type({"1", "2.5"}), ValueType::Real);
  EXPECT_EQ(infer_type({"2021-01-01", "2021-02-03"}), ValueType::DateTime);
  EXPECT_EQ(infer_type({"2021-02-30"}), ValueType::Text);
  EXPECT_EQ(infer_type({"true", "False"}), ValueType::Boolean);
  EXPECT_EQ(infer_type({"A", "B", "A"}), ValueType::Text);
  EXPECT_EQ(infer_type({"", "7"}), ValueType::Integer);
  EXPECT_EQ(infer_type({"", ""}), ValueType::Text);
  EXPECT_EQ(infer_type({"99999999999999999999"}), ValueType::Real);
}

TEST(InferType, DatesSortChronologically) {
  const std::vector<std::string> cells{"2021-02-03", "2020-12-31", "2021-01-01T10:00"};
  ASSERT_EQ(infer_type(cells), ValueType::DateTime);
  std::vector<Value> vs;
  for (const auto& c : cells) vs.push_back(parse_value(c, ValueType::DateTime));
  std::sort(vs.begin(), vs.end(), ValueLess{});
  EXPECT_EQ(vs[0].as_datetime().iso, "2020-12-31");
  EXPECT_EQ(vs[2].as_datetime().iso, "2021-02-03");
}

TEST(LoadInstance, GradesExample) {
  const Instance inst = load_instance(fixture("grades/manifest.json"));
  EXPECT_EQ(inst.id, "grades_per_course");
  ASSERT_EQ(inst.inputs.size(), 2u);
  EXPECT_TRUE(tables_equal_strict(*inst.inputs[0].table, grades()));
  EXPECT_TRUE(tables_equal_strict(*inst.inputs[1].table, courses()));
  EXPECT_TRUE(tables_equal_strict(inst.output, grade_counts()));
  EXPECT_EQ(inst.aggregators, (std::vector<AggregateFn>{AggregateFn::n, AggregateFn::n_distinct}));
  ASSERT_EQ(inst.foreign_keys.size(), 1u);
  EXPECT_EQ(inst.foreign_keys[0], (ForeignKey{"Grades", "CourseID", "Courses", "CourseID"}));
  EXPECT_TRUE(inst.ground_truth);
}

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("sqlpbe_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                                   ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }

 private:
  fs::path path_;
};

TEST(LoadInstance, Errors) {
  TempDir dir;
  dir.write("T.csv", "a\n1\n");
  dir.write("empty.csv", "a\n");
  const auto empty = dir.write("m1.json", R"({"inputs": [{"name": "T", "path": "T.csv"}], "output": "empty.csv"})");
  EXPECT_THROW(load_instance(empty), EmptyOutput);
  const auto missing = dir.write("m2.json", R"({"inputs": [{"name": "T", "path": "nope.csv"}], "output": "T.csv"})");
  EXPECT_THROW(load_instance(missing), MissingTable);
  const auto bad_json = dir.write("m3.json", "{");
  EXPECT_THROW(load_instance(bad_json), ParseError);
  const auto bad_fk = dir.write("m4.json", R"({"inputs": [{"name": "T", "path": "T.csv"}], "output": "T.csv",
                                              "foreign_keys": [{"from": "T.a", "to": "U.a"}]})");
  EXPECT_THROW(load_instance(bad_fk), SchemaError);
  const auto bad_cmp = dir.write("m5.json", R"({"inputs": [{"name": "T", "path": "T.csv"}], "output": "T.csv",
                                               "comparison_columns": ["zzz"]})");
  EXPECT_THROW(load_instance(bad_cmp), SchemaError);
  EXPECT_THROW(load_instance(dir.write("m6.json", "") .parent_path() / "absent.json"), MissingTable);
}

TEST(LoadInstance, DeclaredTypesAndConstants) {
  TempDir dir;
  dir.write("T.csv", "code,when\n007,2021-01-01\n010,2021-01-02\n");
  const auto m = dir.write("m.json", R"({"inputs": [{"name": "T", "path": "T.csv"}], "output": "T.csv",
                                        "types": {"T.code": "text"}, "constants": ["007", 3, "2021-01-01", "x"]})");
  const Instance inst = load_instance(m);
  EXPECT_EQ(inst.inputs[0].table->schema[0].type, ValueType::Text);
  EXPECT_EQ(inst.inputs[0].table->rows[0][0], S("007"));
  EXPECT_EQ(inst.inputs[0].table->schema[1].type, ValueType::DateTime);
  EXPECT_EQ(inst.constants, (std::vector<Value>{I(7), I(3), Value::datetime("2021-01-01"), S("x")}));
}

TEST(LoadInstance, InlineTablesAndIdempotence) {
  const nlohmann::json m{{"id", "inline"},
                         {"inputs", {{{"name", "T"}, {"columns", {"a", "b"}}, {"rows", {{1, "x"}, {2, nullptr}}}}}},
                         {"output", {{"columns", {"a"}}, {"rows", {{1}}}}}};
  const Instance a = instance_from_json(m, ".");
  const Instance b = instance_from_json(m, ".");
  EXPECT_TRUE(a.inputs[0].table->rows[1][1].is_null());
  EXPECT_TRUE(tables_equal_strict(*a.inputs[0].table, *b.inputs[0].table));
  EXPECT_EQ(table_to_json(*a.inputs[0].table), (nlohmann::json{{"columns", {"a", "b"}}, {"rows", {{1, "x"}, {2, nullptr}}}}));
}

}  // namespace
}  // namespace sqlpbe
