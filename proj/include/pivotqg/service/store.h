#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "pivotqg/service/session.h"

struct sqlite3;

namespace pivotqg::service {

/// Durable session table (id -> JSON document) with a write-through cache.
/// ":memory:" gives a private in-memory database.
class SessionStore {
 public:
  explicit SessionStore(const std::string& path);
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  std::optional<Session> get(const std::string& id);
  void put(const Session& session);
  bool erase(const std::string& id);
  std::size_t size();

 private:
  std::mutex mu_;
  sqlite3* db_ = nullptr;
  std::map<std::string, Session> cache_;
};

}  // namespace pivotqg::service
