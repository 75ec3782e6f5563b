#include "httplib.h"

#include "cpnkit/service.hpp"

namespace cpn {

struct HttpServer::Impl {
  explicit Impl(Service& s) : service(s) {
    auto forward = [this](const httplib::Request& req, httplib::Response& res) {
      HttpRequest r{req.method, req.path, {}, req.body};
      for (const auto& [k, v] : req.params) r.query.emplace(k, v);
      const HttpResponse out = service.handle(r);
      res.status = out.status;
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_content(out.body, out.content_type);
    };
    // Without SO_REUSEPORT a second server on the same port fails to bind.
    server.set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
    });
    server.Get(".*", forward);
    server.Post(".*", forward);
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
  }

  Service& service;
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace cpn
