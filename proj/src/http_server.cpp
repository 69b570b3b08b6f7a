#include "pcq/service.hpp"

// After Eigen: a system header pulled in by httplib defines `_res`.
#include <httplib.h>

namespace pcq {

struct HttpServer::Impl {
  QuestionnaireService& service;
  httplib::Server server;
};

namespace {

void reply(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body, "application/json");
}

}  // namespace

HttpServer::HttpServer(QuestionnaireService& service) : impl_(new Impl{service, {}}) {
  auto& s = impl_->server;
  auto& api = impl_->service;
  s.Post("/v1/sessions", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.create_session(req.body));
  });
  s.Get("/v1/sessions/:id/next", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.next(req.path_params.at("id")));
  });
  s.Post("/v1/sessions/:id/answers", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.answer(req.path_params.at("id"), req.body));
  });
  s.Post("/v1/sessions/:id/stop", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.stop(req.path_params.at("id")));
  });
  s.Get("/v1/sessions/:id", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.get(req.path_params.at("id")));
  });
  s.Get("/v1/patterns", [&api](const httplib::Request& req, httplib::Response& res) {
    reply(res, api.patterns(req.has_param("n") ? req.get_param_value("n") : std::string()));
  });
  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const std::string code = res.status == 404 ? "not_found" : "bad_request";
    res.set_content("{\n  \"code\": \"" + code + "\",\n  \"message\": \"no such endpoint\"\n}\n", "application/json");
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    res.status = 500;
    res.set_content("{\n  \"code\": \"internal\",\n  \"message\": \"unexpected server error\"\n}\n", "application/json");
  });
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace pcq
