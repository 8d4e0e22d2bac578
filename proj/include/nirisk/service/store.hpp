#pragma once

#include "nirisk/service/session.hpp"

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

struct sqlite3;

namespace nirisk::service {

// Sessions persisted as JSON documents in an SQLite file, one row per
// patient, replaced whole on every write.  Safe to share between threads.
class SessionStore {
 public:
  // ":memory:" keeps everything in memory.  Throws IoError.
  explicit SessionStore(const std::filesystem::path& path);
  ~SessionStore();
  SessionStore(const SessionStore&) = delete;
  SessionStore& operator=(const SessionStore&) = delete;

  void put(const Session& s);
  std::optional<Session> get(const std::string& patient_id) const;
  std::vector<Session> load_all() const;

  std::optional<std::string> meta(const std::string& key) const;
  void set_meta(const std::string& key, const std::string& value);

 private:
  void exec(const char* sql);

  sqlite3* db_ = nullptr;
  mutable std::mutex mutex_;
};

}  // namespace nirisk::service
