#include "nirisk/service/http.hpp"

#include "nirisk/dbn/io.hpp"

#include <httplib.h>

namespace nirisk::service {

namespace {

constexpr const char* kJson = "application/json";

class BadRequest : public Error {
 public:
  using Error::Error;
};

void send(httplib::Response& res, int status, const pgm::json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

pgm::json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return pgm::json::object();
  try {
    auto j = pgm::json::parse(req.body);
    if (!j.is_object()) throw BadRequest("request body must be a JSON object");
    return j;
  } catch (const pgm::json::parse_error& e) {
    throw BadRequest(std::string("request body is not valid JSON: ") + e.what());
  }
}

pgm::Assignment assignment(const pgm::json& body, const char* key) {
  pgm::Assignment a;
  if (!body.contains(key) || body.at(key).is_null()) return a;
  const auto& obj = body.at(key);
  if (!obj.is_object()) throw ValidationError(key, std::string("\"") + key + "\" must be an object");
  for (const auto& [name, value] : obj.items()) {
    if (!value.is_string()) throw ValidationError(name, "value of '" + name + "' must be a state label string");
    a.emplace(name, value.get<std::string>());
  }
  return a;
}

pgm::json risk_json(const Risk& r) {
  return {{"patient_id", r.patient_id}, {"day", r.day}, {"probability", r.probability}};
}

// Runs `fn`, turning exceptions into error bodies.
template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    auto [status, body] = error_response(e);
    send(res, status, body);
  }
}

}  // namespace

std::pair<int, pgm::json> error_response(const std::exception& e) {
  auto body = [&](const char* code, const std::string& field = "") {
    pgm::json j = {{"code", code}, {"message", e.what()}};
    if (!field.empty()) j["field"] = field;
    return j;
  };
  if (dynamic_cast<const NotFound*>(&e)) return {404, body("not_found")};
  if (dynamic_cast<const Conflict*>(&e)) return {409, body("conflict")};
  if (auto* v = dynamic_cast<const ValidationError*>(&e)) return {422, body("validation_error", v->field())};
  if (auto* v = dynamic_cast<const SchemaMismatch*>(&e)) return {422, body("validation_error", v->field())};
  if (dynamic_cast<const ImpossibleEvidence*>(&e)) return {422, body("impossible_evidence")};
  if (dynamic_cast<const InputError*>(&e) || dynamic_cast<const RangeError*>(&e))
    return {422, body("validation_error")};
  if (dynamic_cast<const BadRequest*>(&e)) return {400, body("bad_request")};
  return {500, body("internal_error")};
}

void register_routes(httplib::Server& server, RiskService& service,
                     const std::optional<std::filesystem::path>& static_dir) {
  server.Post("/patients", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto body = parse_body(req);
      std::string id;
      if (body.contains("patient_id") && !body.at("patient_id").is_null()) {
        if (!body.at("patient_id").is_string()) throw ValidationError("patient_id", "patient_id must be a string");
        id = body.at("patient_id").get<std::string>();
      }
      send(res, 201, risk_json(service.create_patient(assignment(body, "fixed"), id)));
    });
  });

  server.Post(R"(/patients/([^/]+)/days)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto body = parse_body(req);
      if (!body.contains("day") || !body.at("day").is_number_integer())
        throw ValidationError("day", "\"day\" must be an integer");
      send(res, 201,
           risk_json(service.submit_day(req.matches[1], body.at("day").get<int>(), assignment(body, "observations"))));
    });
  });

  server.Get(R"(/patients/([^/]+)/trajectory)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const std::string id = req.matches[1];
      send(res, 200, {{"patient_id", id}, {"trajectory", dbn::trace_to_json(service.trajectory(id))}});
    });
  });

  server.Post(R"(/patients/([^/]+)/what-if)", [&service](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto body = parse_body(req);
      send(res, 200, risk_json(service.what_if(req.matches[1], assignment(body, "observations"))));
    });
  });

  server.Get("/model", [&service](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, service.model_summary()); });
  });

  server.Get("/healthz", [&service](const httplib::Request&, httplib::Response& res) {
    send(res, 200, {{"status", "ok"}, {"sessions", service.session_count()}});
  });

  if (static_dir) server.set_mount_point("/", static_dir->string());

  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    pgm::json body = {{"code", res.status == 404 ? "not_found" : "error"},
                      {"message", req.method + " " + req.path + " failed with status " + std::to_string(res.status)}};
    res.set_content(body.dump(), kJson);
  });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      auto [status, body] = error_response(e);
      send(res, status, body);
    } catch (...) {
      send(res, 500, {{"code", "internal_error"}, {"message", "unknown error"}});
    }
  });
}

HttpServer::HttpServer(RiskService& service, const std::optional<std::filesystem::path>& static_dir)
    : server_(std::make_unique<httplib::Server>()) {
  register_routes(*server_, service, static_dir);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::listen() { server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

}  // namespace nirisk::service
