#include "nirisk/service/store.hpp"

#include "nirisk/errors.hpp"

#include <sqlite3.h>

namespace nirisk::service {

namespace {

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
      throw IoError(std::string("session store: ") + sqlite3_errmsg(db));
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  void bind(int i, const std::string& text) {
    if (sqlite3_bind_text(stmt_, i, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT) != SQLITE_OK)
      throw IoError(std::string("session store: ") + sqlite3_errmsg(db_));
  }
  // True while rows remain.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw IoError(std::string("session store: ") + sqlite3_errmsg(db_));
  }
  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }

 private:
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

}  // namespace

SessionStore::SessionStore(const std::filesystem::path& path) {
  const int flags = SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE | SQLITE_OPEN_FULLMUTEX;
  if (sqlite3_open_v2(path.string().c_str(), &db_, flags, nullptr) != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "out of memory";
    sqlite3_close(db_);
    db_ = nullptr;
    throw IoError("cannot open session store " + path.string() + ": " + msg);
  }
  sqlite3_busy_timeout(db_, 5000);
  exec("CREATE TABLE IF NOT EXISTS sessions (patient_id TEXT PRIMARY KEY, document TEXT NOT NULL)");
  exec("CREATE TABLE IF NOT EXISTS meta (key TEXT PRIMARY KEY, value TEXT NOT NULL)");
}

SessionStore::~SessionStore() { sqlite3_close(db_); }

void SessionStore::exec(const char* sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql, nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "unknown error";
    sqlite3_free(err);
    throw IoError("session store: " + msg);
  }
}

void SessionStore::put(const Session& s) {
  std::lock_guard lock(mutex_);
  Statement st(db_, "INSERT OR REPLACE INTO sessions (patient_id, document) VALUES (?1, ?2)");
  st.bind(1, s.patient_id);
  st.bind(2, session_to_json(s).dump());
  st.step();
}

std::optional<Session> SessionStore::get(const std::string& patient_id) const {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT document FROM sessions WHERE patient_id = ?1");
  st.bind(1, patient_id);
  if (!st.step()) return std::nullopt;
  return session_from_json(pgm::json::parse(st.text(0)));
}

std::vector<Session> SessionStore::load_all() const {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT document FROM sessions ORDER BY patient_id");
  std::vector<Session> out;
  while (st.step()) {
    try {
      out.push_back(session_from_json(pgm::json::parse(st.text(0))));
    } catch (const pgm::json::exception& e) {
      throw FormatError(std::string("stored session: ") + e.what());
    }
  }
  return out;
}

std::optional<std::string> SessionStore::meta(const std::string& key) const {
  std::lock_guard lock(mutex_);
  Statement st(db_, "SELECT value FROM meta WHERE key = ?1");
  st.bind(1, key);
  if (!st.step()) return std::nullopt;
  return st.text(0);
}

void SessionStore::set_meta(const std::string& key, const std::string& value) {
  std::lock_guard lock(mutex_);
  Statement st(db_, "INSERT OR REPLACE INTO meta (key, value) VALUES (?1, ?2)");
  st.bind(1, key);
  st.bind(2, value);
  st.step();
}

}  // namespace nirisk::service
