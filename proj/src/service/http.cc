#include "pivotqg/service/http.h"

#include <httplib.h>

#include <functional>

namespace pivotqg::service {

using nlohmann::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, Errc code, const std::string& message,
                const json& details) {
  send_json(res, http_status(code),
            {{"code", std::string(errc_name(code))}, {"message", message}, {"details", details}});
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw ApiError(Errc::BadData, std::string("request body is not valid JSON: ") + e.what());
  }
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

// Runs `fn`, translating exceptions into the error body.
Handler guarded(std::function<void(const httplib::Request&, httplib::Response&)> fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const ApiError& e) {
      send_error(res, e.code(), e.what(), e.details());
    } catch (const Error& e) {
      send_error(res, e.code(), e.what(), json::object());
    } catch (const std::exception& e) {
      send_json(res, 500,
                {{"code", "Internal"}, {"message", e.what()}, {"details", json::object()}});
    }
  };
}

Handler json_route(std::function<json(const httplib::Request&)> fn, int status = 200) {
  return guarded([fn = std::move(fn), status](const httplib::Request& req, httplib::Response& res) {
    send_json(res, status, fn(req));
  });
}

const std::string& param(const httplib::Request& req, const char* name) {
  return req.path_params.at(name);
}

}  // namespace

HttpServer::HttpServer(std::shared_ptr<Service> service)
    : service_(std::move(service)), server_(std::make_unique<httplib::Server>()) {
  auto& s = *server_;
  Service* svc = service_.get();
  const std::string origin = svc->config().cors_origin;

  s.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, PATCH, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
  });
  s.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  s.Get("/v1/health", json_route([svc](const auto&) { return svc->health(); }));
  s.Post("/v1/sessions",
         json_route([svc](const auto& req) { return svc->create_session(parse_body(req)); }, 201));
  s.Get("/v1/sessions/:id",
        json_route([svc](const auto& req) { return svc->get_session(param(req, "id")); }));
  s.Patch("/v1/sessions/:id/text", json_route([svc](const auto& req) {
            return svc->edit_text(param(req, "id"), parse_body(req));
          }));
  s.Get("/v1/sessions/:id/candidates", json_route([svc](const auto& req) {
          return svc->candidates(param(req, "id"), req.get_param_value("kind"));
        }));
  s.Post("/v1/sessions/:id/generate", json_route([svc](const auto& req) {
           return svc->generate(param(req, "id"), parse_body(req));
         }));
  s.Get("/v1/sessions/:id/questions/:qid/attention", json_route([svc](const auto& req) {
          return svc->attention(param(req, "id"), param(req, "qid"));
        }));
  s.Put("/v1/sessions/:id/questions/:qid", json_route([svc](const auto& req) {
          return svc->edit_question(param(req, "id"), param(req, "qid"), parse_body(req));
        }));
  s.Get("/v1/sessions/:id/questions/:qid/history", json_route([svc](const auto& req) {
          return svc->question_history(param(req, "id"), param(req, "qid"));
        }));
  s.Put("/v1/sessions/:id/answers/:aid", json_route([svc](const auto& req) {
          return svc->edit_answer(param(req, "id"), param(req, "aid"), parse_body(req));
        }));
  s.Get("/v1/sessions/:id/answers/:aid/history", json_route([svc](const auto& req) {
          return svc->answer_history(param(req, "id"), param(req, "aid"));
        }));
  s.Put("/v1/sessions/:id/knobs", json_route([svc](const auto& req) {
          return svc->set_knobs(param(req, "id"), parse_body(req));
        }));
  s.Get("/v1/sessions/:id/filtered",
        json_route([svc](const auto& req) { return svc->filtered(param(req, "id")); }));
  s.Get("/v1/sessions/:id/export",
        guarded([svc](const httplib::Request& req, httplib::Response& res) {
          const std::string format =
              req.has_param("format") ? req.get_param_value("format") : std::string("json");
          const auto doc = svc->export_session(param(req, "id"), format);
          res.status = 200;
          res.set_content(doc.body, doc.content_type);
        }));
  s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) {
      send_error(res, Errc::NotFound, "no route for " + req.method + " " + req.path,
                 json::object());
    }
  });
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::listen(const std::string& host, int port) {
  if (!server_->listen(host, port)) {
    throw Error(Errc::InvalidConfig, "cannot listen on " + host + ":" + std::to_string(port));
  }
}

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? server_->bind_to_any_port(host)
                              : (server_->bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(Errc::InvalidConfig, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void HttpServer::serve() { server_->listen_after_bind(); }

void HttpServer::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

}  // namespace pivotqg::service
