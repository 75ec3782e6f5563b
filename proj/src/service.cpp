#include "cpnkit/service.hpp"

#include <cstdio>
#include <deque>
#include <random>
#include <vector>

#include "cpnkit/error.hpp"

namespace cpn {

struct Service::Session {
  std::mutex mutex;
  Model model;
  Marking marking;
  std::deque<Marking> undo;
  std::size_t fired = 0;
  Clock::time_point created;
  Clock::time_point last_used;
};

namespace {

HttpResponse json_response(int status, const Json& body) { return HttpResponse{status, body.dump(), "application/json"}; }

HttpResponse error_response(int status, std::string_view code, const std::string& detail, const std::string& path = {}) {
  Json body = Json::object();
  body["error"] = std::string(code);
  body["detail"] = detail;
  if (!path.empty()) body["path"] = path;
  return json_response(status, body);
}

HttpResponse error_response(int status, const Error& e) {
  return error_response(status, error_name(e.code()), e.detail(), e.path());
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

Json parse_body(const std::string& body) {
  if (body.find_first_not_of(" \t\r\n") == std::string::npos) return Json::object();
  try {
    return Json::parse(body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::SchemaError, std::string("invalid JSON body: ") + e.what());
  }
}

Json state_json(const Net& net, const Marking& m) {
  Json out = Json::object();
  out["marking"] = marking_json(net, m);
  out["globalClock"] = m.global_clock();
  return out;
}

}  // namespace

Service::Service() : Service(Options{}) {}

Service::Service(Options options) : options_(std::move(options)), salt_(std::random_device{}()) {
  salt_ = (salt_ << 32) ^ std::random_device{}();
}

Service::~Service() = default;

std::size_t Service::session_count() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

std::string Service::fresh_id() {
  // splitmix64 over a salted counter: unique per service, hard to guess.
  std::uint64_t z = salt_ + 0x9e3779b97f4a7c15ULL * ++counter_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(z));
  return buf;
}

void Service::expire_idle() {
  const auto now = options_.now();
  std::lock_guard lock(mutex_);
  for (auto it = sessions_.begin(); it != sessions_.end();) {
    // A session in use holds its own mutex; skip it rather than block the whole service.
    std::unique_lock session_lock(it->second->mutex, std::try_to_lock);
    if (session_lock.owns_lock() && now - it->second->last_used > options_.idle_timeout) {
      session_lock.unlock();
      it = sessions_.erase(it);
    } else {
      ++it;
    }
  }
}

std::shared_ptr<Service::Session> Service::find(const std::string& id) {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

HttpResponse Service::handle(const HttpRequest& req) {
  try {
    expire_idle();
    const auto parts = split_path(req.path);
    if (parts.empty() || parts[0] != "sessions") return error_response(404, "NotFound", "no route for " + req.path);
    if (parts.size() == 1) {
      if (req.method != "POST") return error_response(405, "MethodNotAllowed", req.method + " " + req.path);
      return create(req);
    }
    if (parts.size() != 3) return error_response(404, "NotFound", "no route for " + req.path);
    auto session = find(parts[1]);
    if (!session) return error_response(404, error_name(ErrorCode::SessionNotFound), "no session " + parts[1]);
    std::lock_guard lock(session->mutex);
    session->last_used = options_.now();
    return dispatch(*session, parts[2], req);
  } catch (const Error& e) {
    return error_response(400, e);
  } catch (const std::exception& e) {
    return error_response(500, "InternalError", e.what());
  }
}

HttpResponse Service::create(const HttpRequest& req) {
  auto session = std::make_shared<Session>();
  try {
    session->model = load_model(parse_document(parse_body(req.body)));
  } catch (const Error& e) {
    return error_response(400, e);
  }
  session->marking = session->model.marking;
  session->created = session->last_used = options_.now();
  std::string id;
  {
    std::lock_guard lock(mutex_);
    do id = fresh_id();
    while (sessions_.count(id));
    sessions_.emplace(id, session);
  }
  return json_response(201, Json{{"sessionId", id}});
}

HttpResponse Service::dispatch(Session& s, const std::string& action, const HttpRequest& req) {
  const Net& net = s.model.net;
  auto push_undo = [&] {
    s.undo.push_back(s.marking);
    while (s.undo.size() > options_.undo_depth) s.undo.pop_front();
  };
  auto expect = [&](const char* method) { return req.method == method; };
  auto wrong_method = [&] { return error_response(405, "MethodNotAllowed", req.method + " " + req.path); };

  if (action == "state") {
    if (!expect("GET")) return wrong_method();
    Json out = state_json(net, s.marking);
    out["dot"] = render_dot(net, &s.marking);
    return json_response(200, out);
  }
  if (action == "enabled") {
    if (!expect("GET")) return wrong_method();
    try {
      return json_response(200, enabled_json(net, enabled_transitions(net, s.marking)));
    } catch (const Error& e) {
      return error_response(422, e);
    }
  }
  if (action == "fire") {
    if (!expect("POST")) return wrong_method();
    const Json body = parse_body(req.body);
    if (!body.is_object() || !body.contains("transition") || !body["transition"].is_string())
      return error_response(400, error_name(ErrorCode::SchemaError), "body must be {\"transition\": name, \"binding\"?: {...}}");
    std::size_t t;
    try {
      t = net.transition_index(body["transition"].get<std::string>());
    } catch (const Error& e) {
      return error_response(400, e.at("transition"));
    }
    std::optional<Env> env;
    if (body.contains("binding") && !body["binding"].is_null()) {
      try {
        env = env_from_json(body["binding"]);
      } catch (const Error& e) {
        return error_response(400, e.path().empty() ? e.at("binding") : e.at("binding." + e.path()));
      }
    }
    try {
      Marking next = s.marking;
      FiringRecord rec = fire_transition(net, t, next, env);
      rec.index = s.fired++;
      push_undo();
      s.marking = std::move(next);
      Json out = Json::object();
      out["firingRecord"] = record_json(rec);
      out["marking"] = marking_json(net, s.marking);
      out["globalClock"] = s.marking.global_clock();
      return json_response(200, out);
    } catch (const Error& e) {
      return error_response(e.code() == ErrorCode::NotEnabled ? 409 : 422, e);
    }
  }
  if (action == "advance") {
    if (!expect("POST")) return wrong_method();
    push_undo();
    advance_global_clock(net, s.marking);
    return json_response(200, Json{{"globalClock", s.marking.global_clock()}});
  }
  if (action == "undo") {
    if (!expect("POST")) return wrong_method();
    if (s.undo.empty()) return error_response(409, error_name(ErrorCode::NothingToUndo), "undo stack is empty");
    s.marking = std::move(s.undo.back());
    s.undo.pop_back();
    return json_response(200, state_json(net, s.marking));
  }
  if (action == "reset") {
    if (!expect("POST")) return wrong_method();
    push_undo();
    s.marking = s.model.marking;
    return json_response(200, state_json(net, s.marking));
  }
  if (action == "analysis") {
    if (!expect("GET")) return wrong_method();
    ExploreLimits limits;
    if (auto it = req.query.find("maxStates"); it != req.query.end()) {
      try {
        std::size_t used = 0;
        const long long n = std::stoll(it->second, &used);
        if (used != it->second.size() || n < 0) throw std::invalid_argument("bad");
        limits.max_states = static_cast<std::size_t>(n);
      } catch (const std::exception&) {
        return error_response(400, error_name(ErrorCode::SchemaError), "maxStates must be a non-negative integer",
                              "maxStates");
      }
    }
    if (auto it = req.query.find("stripTime"); it != req.query.end())
      limits.strip_time = it->second == "true" || it->second == "1";
    try {
      return json_response(200, report_json(summarize(net, s.marking, limits)));
    } catch (const Error& e) {
      return error_response(e.code() == ErrorCode::LimitZero ? 400 : 422, e);
    }
  }
  if (action == "export") {
    if (!expect("GET")) return wrong_method();
    return HttpResponse{200, export_json(net, s.marking), "application/json"};
  }
  return error_response(404, "NotFound", "no route for " + req.path);
}

}  // namespace cpn
