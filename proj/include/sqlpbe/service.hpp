#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <json.hpp>

#include "sqlpbe/disambiguator.hpp"
#include "sqlpbe/errors.hpp"
#include "sqlpbe/instance.hpp"
#include "sqlpbe/synthesizer.hpp"

namespace httplib {
class Server;
}

namespace sqlpbe {

/// Maps to an HTTP status in the service.
class ServiceError : public Error {
 public:
  ServiceError(int status, const std::string& what) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

struct SessionOptions {
  DisambiguationOptions disambiguation;
  /// Used when the instance lists no candidates.
  SynthesisOptions synthesis;
};

/// Candidate queries of an instance: the listed SQL candidates, or every
/// solution synthesis finds within the options' limits.
std::vector<Query> collect_candidates(const Instance& inst, const SynthesisOptions& options);

std::string_view to_string(DisambiguationSession::Status s);

nlohmann::json database_to_json(const Database& db);
nlohmann::json log_to_json(const SessionLog& log);

/// In-memory disambiguation sessions. Calls on one session are serialized;
/// distinct sessions proceed independently.
class SessionManager {
 public:
  SessionManager();

  /// Body: {"manifest": path} or {"instance": {...inline manifest...}}, and
  /// optionally {"options": {"rounds", "seed", "timeout", "workers", "max_size"}}.
  /// Throws ServiceError(400) on bad input, ServiceError(422) when there is
  /// no candidate to disambiguate.
  std::string create(const nlohmann::json& body);

  /// Throws ServiceError(404) for unknown ids.
  nlohmann::json state(const std::string& id) const;
  /// Throws ServiceError(409) unless the session awaits an answer.
  nlohmann::json answer(const std::string& id, Answer a);
  nlohmann::json abort(const std::string& id);
  /// Throws ServiceError(409) while a question is pending.
  nlohmann::json result(const std::string& id) const;

  std::size_t size() const;

 private:
  struct Entry {
    std::string id;
    Instance instance;
    std::unique_ptr<DisambiguationSession> session;
    mutable std::mutex mutex;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  static nlohmann::json state_of(const Entry& e);

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_ = 0;
  std::uint64_t salt_ = 0;
};

/// Installs the /sessions routes on `server`.
void install_routes(httplib::Server& server, SessionManager& sessions);

}  // namespace sqlpbe
