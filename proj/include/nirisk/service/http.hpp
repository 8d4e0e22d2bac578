#pragma once

#include "nirisk/service/risk_service.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace nirisk::service {

//   POST /patients                    {"patient_id"?, "fixed": {...}}
//   POST /patients/{id}/days          {"day": n, "observations": {...}}
//   GET  /patients/{id}/trajectory
//   POST /patients/{id}/what-if       {"observations": {...}}
//   GET  /model
//   GET  /healthz
// Errors come back as {"code", "message", "field"?}.  When `static_dir` is
// given its files are served under "/".
void register_routes(httplib::Server& server, RiskService& service,
                     const std::optional<std::filesystem::path>& static_dir = std::nullopt);

// HTTP status and error body for an exception thrown while serving.
std::pair<int, pgm::json> error_response(const std::exception& e);

class HttpServer {
 public:
  HttpServer(RiskService& service, const std::optional<std::filesystem::path>& static_dir = std::nullopt);
  ~HttpServer();

  // Port 0 picks a free one.  Returns the bound port; throws IoError.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  void listen();
  void stop();

 private:
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace nirisk::service
