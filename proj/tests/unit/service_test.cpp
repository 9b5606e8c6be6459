#include <gtest/gtest.h>

#include <httplib.h>

#include <thread>

#include "sqlpbe/service.hpp"
#include "test_support.hpp"

namespace sqlpbe {
namespace {

using namespace sqlpbe::testing;
using nlohmann::json;

class Service : public ::testing::Test {
 protected:
  void SetUp() override {
    install_routes(server_, sessions_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  void TearDown() override {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(60, 0);
    return c;
  }

  json post(const std::string& path, const json& body, int expect) {
    auto res = client().Post(path, body.dump(), "application/json");
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body);
  }

  json get(const std::string& path, int expect) {
    auto res = client().Get(path);
    EXPECT_TRUE(res);
    if (!res) return {};
    EXPECT_EQ(res->status, expect) << res->body;
    return json::parse(res->body);
  }

  std::string create_candidate_session() {
    const json created = post("/sessions", json{{"manifest", fixture("grades_candidates/manifest.json").string()}}, 201);
    return created.at("id");
  }

  SessionManager sessions_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(Service, HappyPathEndsWithSql) {
  const std::string id = create_candidate_session();
  json state = get("/sessions/" + id, 200);
  EXPECT_EQ(state.at("id"), id);
  EXPECT_EQ(state.at("candidates").size(), 7u);
  ASSERT_EQ(state.at("status"), "awaiting_answer");
  const json& q = state.at("question");
  EXPECT_EQ(q.at("input").size(), 2u);
  EXPECT_EQ(q.at("input")[0].at("name"), "Grades");
  EXPECT_EQ(q.at("output").at("columns"), (json{"CourseName", "GradeCount"}));

  std::size_t asked = 0;
  while (state.at("status") == "awaiting_answer") {
    state = post("/sessions/" + id + "/answer", json{{"answer", asked % 2 ? "no" : "yes"}}, 200);
    ++asked;
    ASSERT_LE(asked, 6u);
  }
  EXPECT_EQ(state.at("status"), "finished");
  EXPECT_TRUE(state.at("question").is_null());
  const json result = get("/sessions/" + id + "/result", 200);
  EXPECT_FALSE(result.at("sql").get<std::string>().empty());
  EXPECT_EQ(result.at("question_count"), asked);
  EXPECT_EQ(result.at("log").size(), asked);
  EXPECT_FALSE(result.at("aborted"));

  post("/sessions/" + id + "/answer", json{{"answer", "yes"}}, 409);
  post("/sessions/" + id + "/abort", json::object(), 409);
}

TEST_F(Service, AbortFlagsTheEarliestRemainingQuery) {
  const std::string id = create_candidate_session();
  get("/sessions/" + id + "/result", 409);
  const json state = post("/sessions/" + id + "/abort", json::object(), 200);
  EXPECT_EQ(state.at("status"), "aborted");
  const json result = get("/sessions/" + id + "/result", 200);
  EXPECT_TRUE(result.at("aborted"));
  EXPECT_EQ(result.at("question_count"), 0);
  EXPECT_EQ(result.at("sql"), state.at("candidates")[0]);
}

TEST_F(Service, UnknownSessionIs404) {
  get("/sessions/deadbeef", 404);
  get("/sessions/deadbeef/result", 404);
  post("/sessions/deadbeef/answer", json{{"answer", "yes"}}, 404);
}

TEST_F(Service, BadRequests) {
  post("/sessions", json{{"nothing", 1}}, 400);
  post("/sessions", json{{"manifest", "/no/such/manifest.json"}}, 400);
  const std::string id = create_candidate_session();
  post("/sessions/" + id + "/answer", json{{"answer", "maybe"}}, 400);
  auto res = client().Post("/sessions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
}

TEST_F(Service, InlineInstanceIsSynthesized) {
  const json instance{
      {"id", "inline"},
      {"inputs", json::array({json{{"name", "T"}, {"columns", {"a", "b"}}, {"rows", {{1, "x"}, {2, "y"}, {3, "x"}}}}})},
      {"output", json{{"columns", {"a", "b"}}, {"rows", {{1, "x"}, {3, "x"}}}}},
      {"constants", {"x"}}};
  const json created = post("/sessions", json{{"instance", instance}, {"options", {{"timeout", 5}, {"seed", 3}, {"max_size", 2}}}}, 201);
  const json state = get("/sessions/" + created.at("id").get<std::string>(), 200);
  EXPECT_GE(state.at("candidates").size(), 1u);
  EXPECT_EQ(sessions_.size(), 1u);
}

TEST(SessionManagerDirect, StateMachineTransitions) {
  SessionManager m;
  const std::string id = m.create(json{{"manifest", fixture("grades_candidates/manifest.json").string()}});
  EXPECT_EQ(m.state(id).at("status"), "awaiting_answer");
  json s = m.answer(id, Answer::Yes);
  while (s.at("status") == "awaiting_answer") s = m.answer(id, Answer::Yes);
  EXPECT_EQ(s.at("status"), "finished");
  try {
    m.answer(id, Answer::No);
    FAIL();
  } catch (const ServiceError& e) {
    EXPECT_EQ(e.status(), 409);
  }
}

}  // namespace
}  // namespace sqlpbe
