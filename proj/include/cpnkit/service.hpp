#pragma once

#include <chrono>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "cpnkit/interchange.hpp"

namespace cpn {

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct HttpResponse {
  int status = 200;
  std::string body;
  std::string content_type = "application/json";
};

/// Session-based facade over the engine, independent of any transport.
class Service {
 public:
  using Clock = std::chrono::steady_clock;

  struct Options {
    std::chrono::seconds idle_timeout{3600};
    std::size_t undo_depth = 100;
    std::function<Clock::time_point()> now = [] { return Clock::now(); };
  };

  Service();
  explicit Service(Options options);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Routes one request. Never throws.
  HttpResponse handle(const HttpRequest& req);

  std::size_t session_count() const;

 private:
  struct Session;

  std::shared_ptr<Session> find(const std::string& id);
  void expire_idle();
  std::string fresh_id();

  HttpResponse create(const HttpRequest& req);
  HttpResponse dispatch(Session& s, const std::string& action, const HttpRequest& req);

  Options options_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t counter_ = 0;
  std::uint64_t salt_;
};

/// httplib front end. Requests are forwarded to a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds to `host:port` (0 picks a free port). Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  bool run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cpn
