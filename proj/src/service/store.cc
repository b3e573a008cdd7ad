#include "pivotqg/service/store.h"

#include <sqlite3.h>

#include "pivotqg/common/error.h"

namespace pivotqg::service {

namespace {

constexpr std::size_t kCacheLimit = 256;

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK) {
      throw Error(Errc::BadData, std::string("sqlite: ") + sqlite3_errmsg(db));
    }
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  void bind(int index, const std::string& text) {
    sqlite3_bind_text(stmt_, index, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT);
  }
  int step() { return sqlite3_step(stmt_); }
  std::string column_text(int index) {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, index));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, index))) : "";
  }
  long long column_int(int index) { return sqlite3_column_int64(stmt_, index); }

 private:
  sqlite3_stmt* stmt_ = nullptr;
};

void check(sqlite3* db, int rc, int expected) {
  if (rc != expected) throw Error(Errc::BadData, std::string("sqlite: ") + sqlite3_errmsg(db));
}

}  // namespace

SessionStore::SessionStore(const std::string& path) {
  if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
    const std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    throw Error(Errc::InvalidConfig, "cannot open session database '" + path + "': " + msg);
  }
  check(db_,
        sqlite3_exec(db_,
                     "CREATE TABLE IF NOT EXISTS sessions ("
                     "id TEXT PRIMARY KEY, body TEXT NOT NULL, updated_at TEXT NOT NULL)",
                     nullptr, nullptr, nullptr),
        SQLITE_OK);
}

SessionStore::~SessionStore() { sqlite3_close(db_); }

std::optional<Session> SessionStore::get(const std::string& id) {
  std::lock_guard lock(mu_);
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  Statement st(db_, "SELECT body FROM sessions WHERE id = ?1");
  st.bind(1, id);
  const int rc = st.step();
  if (rc == SQLITE_DONE) return std::nullopt;
  check(db_, rc, SQLITE_ROW);
  Session s;
  try {
    s = nlohmann::json::parse(st.column_text(0)).get<Session>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadData, "stored session '" + id + "' is corrupt: " + e.what());
  }
  if (cache_.size() >= kCacheLimit) cache_.clear();
  cache_.emplace(id, s);
  return s;
}

void SessionStore::put(const Session& session) {
  const std::string body = nlohmann::json(session).dump();
  std::lock_guard lock(mu_);
  Statement st(db_,
               "INSERT INTO sessions (id, body, updated_at) VALUES (?1, ?2, ?3) "
               "ON CONFLICT(id) DO UPDATE SET body = excluded.body, updated_at = excluded.updated_at");
  st.bind(1, session.id);
  st.bind(2, body);
  st.bind(3, session.updated_at);
  check(db_, st.step(), SQLITE_DONE);
  if (cache_.size() >= kCacheLimit) cache_.clear();
  cache_[session.id] = session;
}

bool SessionStore::erase(const std::string& id) {
  std::lock_guard lock(mu_);
  cache_.erase(id);
  Statement st(db_, "DELETE FROM sessions WHERE id = ?1");
  st.bind(1, id);
  check(db_, st.step(), SQLITE_DONE);
  return sqlite3_changes(db_) > 0;
}

std::size_t SessionStore::size() {
  std::lock_guard lock(mu_);
  Statement st(db_, "SELECT COUNT(*) FROM sessions");
  check(db_, st.step(), SQLITE_ROW);
  return static_cast<std::size_t>(st.column_int(0));
}

}  // namespace pivotqg::service
