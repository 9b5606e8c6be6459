#include "sqlpbe/service.hpp"

#include <random>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "sqlpbe/sql.hpp"

namespace sqlpbe {

using nlohmann::json;

std::vector<Query> collect_candidates(const Instance& inst, const SynthesisOptions& options) {
  std::vector<Query> out;
  if (!inst.candidates.empty()) {
    for (const auto& c : inst.candidates) out.push_back(Query::sql(c));
    return out;
  }
  SynthesisOptions o = options;
  o.mode = SearchMode::All;
  for (auto& s : synthesize(inst, o).solutions) out.push_back(Query::program(s.program, s.projection));
  return out;
}

std::string_view to_string(DisambiguationSession::Status s) {
  switch (s) {
    case DisambiguationSession::Status::AwaitingAnswer: return "awaiting_answer";
    case DisambiguationSession::Status::Finished: return "finished";
    case DisambiguationSession::Status::Aborted: return "aborted";
  }
  return "?";
}

json database_to_json(const Database& db) {
  json out = json::array();
  for (const auto& t : db) {
    json j = table_to_json(*t.table);
    j["name"] = t.name;
    out.push_back(std::move(j));
  }
  return out;
}

json log_to_json(const SessionLog& log) {
  json out = json::array();
  for (const auto& e : log) {
    out.push_back(json{{"input", database_to_json(e.input)},
                       {"output", table_to_json(e.output)},
                       {"answer", std::string(to_string(e.answer))},
                       {"before", e.before},
                       {"after", e.after}});
  }
  return out;
}

SessionManager::SessionManager() : salt_(std::random_device{}()) {}

std::string SessionManager::create(const json& body) {
  auto entry = std::make_shared<Entry>();
  SessionOptions options;
  options.synthesis.time_limit = std::chrono::seconds(10);
  try {
    if (body.contains("manifest")) {
      entry->instance = load_instance(body.at("manifest").get<std::string>());
    } else if (body.contains("instance")) {
      entry->instance = instance_from_json(body.at("instance"), body.value("base_dir", std::string(".")));
    } else {
      throw ServiceError(400, "body needs \"manifest\" or \"instance\"");
    }
    const json opts = body.value("options", json::object());
    options.disambiguation.rounds = opts.value("rounds", options.disambiguation.rounds);
    options.disambiguation.seed = opts.value("seed", options.disambiguation.seed);
    options.synthesis.seed = options.disambiguation.seed;
    options.synthesis.workers = opts.value("workers", options.synthesis.workers);
    options.synthesis.max_size = opts.value("max_size", options.synthesis.max_size);
    if (opts.contains("timeout")) {
      options.synthesis.time_limit = std::chrono::milliseconds(static_cast<std::int64_t>(opts.at("timeout").get<double>() * 1000));
    }
    if (options.disambiguation.rounds == 0) throw ServiceError(400, "rounds must be at least 1");
  } catch (const json::exception& e) {
    throw ServiceError(400, e.what());
  } catch (const ServiceError&) {
    throw;
  } catch (const Error& e) {
    throw ServiceError(400, e.what());
  }

  std::vector<Query> candidates = collect_candidates(entry->instance, options.synthesis);
  if (candidates.empty()) throw ServiceError(422, "no candidate query satisfies the example");
  entry->session = std::make_unique<DisambiguationSession>(std::move(candidates), entry->instance.inputs,
                                                           entry->instance.foreign_keys, options.disambiguation);
  std::lock_guard lock(mutex_);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(derive_seed(salt_, 0, next_++)));
  entry->id = buf;
  sessions_.emplace(entry->id, entry);
  spdlog::info("session {} created with {} candidates", entry->id, entry->session->candidates().size());
  return entry->id;
}

std::shared_ptr<SessionManager::Entry> SessionManager::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError(404, "unknown session " + id);
  return it->second;
}

json SessionManager::state_of(const Entry& e) {
  const DisambiguationSession& s = *e.session;
  json candidates = json::array();
  for (const auto& q : s.candidates()) candidates.push_back(q.to_sql(s.inputs()));
  json j{{"id", e.id},
         {"instance", e.instance.id},
         {"status", std::string(to_string(s.status()))},
         {"candidates", candidates},
         {"remaining", s.remaining()},
         {"question_count", s.question_count()},
         {"question", nullptr},
         {"result", nullptr},
         {"log", log_to_json(s.log())}};
  if (s.status() == DisambiguationSession::Status::AwaitingAnswer) {
    j["question"] = json{{"input", database_to_json(s.question().input)}, {"output", table_to_json(s.question_output())}};
  } else {
    j["result"] = json{{"sql", s.result().to_sql(s.inputs())},
                       {"index", s.result_index()},
                       {"aborted", s.status() == DisambiguationSession::Status::Aborted}};
  }
  return j;
}

json SessionManager::state(const std::string& id) const {
  auto e = find(id);
  std::lock_guard lock(e->mutex);
  return state_of(*e);
}

json SessionManager::answer(const std::string& id, Answer a) {
  auto e = find(id);
  std::lock_guard lock(e->mutex);
  if (e->session->status() != DisambiguationSession::Status::AwaitingAnswer) {
    throw ServiceError(409, "session is " + std::string(to_string(e->session->status())));
  }
  e->session->answer(a);
  return state_of(*e);
}

json SessionManager::abort(const std::string& id) {
  auto e = find(id);
  std::lock_guard lock(e->mutex);
  if (e->session->status() != DisambiguationSession::Status::AwaitingAnswer) {
    throw ServiceError(409, "session is " + std::string(to_string(e->session->status())));
  }
  e->session->abort();
  return state_of(*e);
}

json SessionManager::result(const std::string& id) const {
  auto e = find(id);
  std::lock_guard lock(e->mutex);
  const DisambiguationSession& s = *e->session;
  if (s.status() == DisambiguationSession::Status::AwaitingAnswer) throw ServiceError(409, "question pending");
  return json{{"sql", s.result().to_sql(s.inputs())},
              {"question_count", s.question_count()},
              {"aborted", s.status() == DisambiguationSession::Status::Aborted},
              {"log", log_to_json(s.log())}};
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const ServiceError& e) {
      reply(res, e.status(), json{{"error", e.what()}});
    } catch (const json::exception& e) {
      reply(res, 400, json{{"error", e.what()}});
    } catch (const std::exception& e) {
      spdlog::error("request {} {} failed: {}", req.method, req.path, e.what());
      reply(res, 500, json{{"error", e.what()}});
    }
  };
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ServiceError(400, e.what());
  }
}

}  // namespace

void install_routes(httplib::Server& server, SessionManager& sessions) {
  server.Post("/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
                reply(res, 201, json{{"id", sessions.create(parse_body(req))}});
              }));
  server.Get(R"(/sessions/([0-9a-f]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
               reply(res, 200, sessions.state(req.matches[1]));
             }));
  server.Post(R"(/sessions/([0-9a-f]+)/answer)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                const std::string a = parse_body(req).at("answer").get<std::string>();
                if (a != "yes" && a != "no") throw ServiceError(400, "answer must be yes or no");
                reply(res, 200, sessions.answer(req.matches[1], a == "yes" ? Answer::Yes : Answer::No));
              }));
  server.Post(R"(/sessions/([0-9a-f]+)/abort)", guarded([&](const httplib::Request& req, httplib::Response& res) {
                reply(res, 200, sessions.abort(req.matches[1]));
              }));
  server.Get(R"(/sessions/([0-9a-f]+)/result)", guarded([&](const httplib::Request& req, httplib::Response& res) {
               reply(res, 200, sessions.result(req.matches[1]));
             }));
}

}  // namespace sqlpbe
