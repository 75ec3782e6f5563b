#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "cpnkit/service.hpp"
#include "support.hpp"

using namespace cpn;

namespace {

struct Reply {
  int status;
  Json body;
};

Reply call(Service& s, const std::string& method, const std::string& path, const std::string& body = "",
           std::map<std::string, std::string> query = {}) {
  const HttpResponse r = s.handle(HttpRequest{method, path, std::move(query), body});
  return {r.status, Json::parse(r.body)};
}

std::string doubler_text() { return cpntest::read_file(cpntest::data_path("doubler.json")); }
std::string loop_text() { return cpntest::read_file(cpntest::data_path("doubler_loop.json")); }

std::string open(Service& s, const std::string& doc) {
  const Reply r = call(s, "POST", "/sessions", doc);
  EXPECT_EQ(r.status, 201) << r.body.dump();
  return r.body.value("sessionId", "");
}

}  // namespace

TEST(Service, CreateAndState) {
  Service s;
  const std::string id = open(s, doubler_text());
  EXPECT_EQ(id.size(), 16u);
  const Reply st = call(s, "GET", "/sessions/" + id + "/state");
  EXPECT_EQ(st.status, 200);
  EXPECT_EQ(st.body["globalClock"], 0);
  EXPECT_EQ(st.body["marking"]["P_In"].size(), 2u);
  EXPECT_TRUE(st.body["dot"].get<std::string>().rfind("digraph cpn {", 0) == 0);
  EXPECT_EQ(s.session_count(), 1u);
}

TEST(Service, CreateErrors) {
  Service s;
  EXPECT_EQ(call(s, "POST", "/sessions", "{not json").status, 400);
  const Reply r = call(s, "POST", "/sessions", R"({"formatVersion": 1, "places": 3})");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(r.body["error"], "SchemaError");
  Json doc = Json::parse(doubler_text());
  doc["transitions"][0]["guard"] = "x >";
  const Reply g = call(s, "POST", "/sessions", doc.dump());
  EXPECT_EQ(g.status, 400);
  EXPECT_EQ(g.body["error"], "SyntaxError");
  EXPECT_EQ(g.body["path"], "transitions[0].guard");
  EXPECT_EQ(call(s, "GET", "/sessions").status, 405);
  EXPECT_EQ(s.session_count(), 0u);
}

TEST(Service, UnknownRoutes) {
  Service s;
  EXPECT_EQ(call(s, "GET", "/nothing").status, 404);
  const Reply r = call(s, "GET", "/sessions/deadbeef/state");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(r.body["error"], "SessionNotFound");
  const std::string id = open(s, doubler_text());
  EXPECT_EQ(call(s, "GET", "/sessions/" + id + "/bogus").status, 404);
  EXPECT_EQ(call(s, "POST", "/sessions/" + id + "/state").status, 405);
  EXPECT_EQ(call(s, "GET", "/sessions/" + id + "/fire").status, 405);
}

TEST(Service, EnabledAndFire) {
  Service s;
  const std::string id = open(s, doubler_text());
  const Reply en = call(s, "GET", "/sessions/" + id + "/enabled");
  EXPECT_EQ(en.status, 200);
  ASSERT_EQ(en.body.size(), 1u);
  const Reply f = call(s, "POST", "/sessions/" + id + "/fire", R"({"transition": "T", "binding": {"x": 1}})");
  ASSERT_EQ(f.status, 200) << f.body.dump();
  EXPECT_EQ(f.body["globalClock"], 0);
  EXPECT_EQ(f.body["marking"]["P_Out"][0]["value"], 2);
  EXPECT_EQ(f.body["marking"]["P_Out"][0]["timestamp"], 3);
  const Reply again = call(s, "POST", "/sessions/" + id + "/fire", R"({"transition": "T"})");
  EXPECT_EQ(again.status, 409);
  EXPECT_EQ(again.body["error"], "NotEnabled");
  EXPECT_EQ(call(s, "GET", "/sessions/" + id + "/enabled").body.size(), 0u);
}

TEST(Service, FireErrors) {
  Service s;
  const std::string id = open(s, doubler_text());
  const std::string fire = "/sessions/" + id + "/fire";
  EXPECT_EQ(call(s, "POST", fire, "{}").status, 400);
  const Reply unknown = call(s, "POST", fire, R"({"transition": "Nope"})");
  EXPECT_EQ(unknown.status, 400);
  EXPECT_EQ(unknown.body["error"], "UnknownTransition");
  EXPECT_EQ(unknown.body["path"], "transition");
  EXPECT_EQ(call(s, "POST", fire, R"({"transition": "T", "binding": [1]})").status, 400);
  EXPECT_EQ(call(s, "POST", fire, R"({"transition": "T", "binding": {"x": -1}})").status, 409);
  EXPECT_EQ(call(s, "GET", "/sessions/" + id + "/state").body["marking"]["P_In"].size(), 2u);
}

TEST(Service, AdvanceUndoReset) {
  Service s;
  const std::string id = open(s, doubler_text());
  const std::string base = "/sessions/" + id;
  EXPECT_EQ(call(s, "POST", base + "/undo").status, 409);
  call(s, "POST", base + "/fire", R"({"transition": "T"})");
  EXPECT_EQ(call(s, "POST", base + "/advance").body["globalClock"], 3);
  Reply u = call(s, "POST", base + "/undo");
  EXPECT_EQ(u.status, 200);
  EXPECT_EQ(u.body["globalClock"], 0);
  EXPECT_EQ(u.body["marking"]["P_Out"].size(), 1u);
  u = call(s, "POST", base + "/undo");
  EXPECT_EQ(u.body["marking"]["P_In"].size(), 2u);
  EXPECT_EQ(call(s, "POST", base + "/undo").status, 409);
  call(s, "POST", base + "/fire", R"({"transition": "T"})");
  const Reply r = call(s, "POST", base + "/reset");
  EXPECT_EQ(r.body["marking"]["P_In"].size(), 2u);
  EXPECT_EQ(r.body["marking"]["P_Out"].size(), 0u);
  EXPECT_EQ(call(s, "POST", base + "/undo").body["marking"]["P_Out"].size(), 1u);
}

TEST(Service, UndoDepthIsBounded) {
  Service::Options opt;
  opt.undo_depth = 2;
  Service s(opt);
  const std::string base = "/sessions/" + open(s, loop_text());
  for (int i = 0; i < 4; ++i) {
    ASSERT_EQ(call(s, "POST", base + "/fire", R"({"transition": "T"})").status, 200);
    call(s, "POST", base + "/advance");
  }
  EXPECT_EQ(call(s, "POST", base + "/undo").status, 200);
  EXPECT_EQ(call(s, "POST", base + "/undo").status, 200);
  EXPECT_EQ(call(s, "POST", base + "/undo").status, 409);
}

TEST(Service, Analysis) {
  Service s;
  const std::string base = "/sessions/" + open(s, cpntest::read_file(cpntest::data_path("cycle.json")));
  const Reply r = call(s, "GET", base + "/analysis");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body["num_states"], 2);
  EXPECT_EQ(call(s, "GET", base + "/analysis", "", {{"maxStates", "0"}}).status, 400);
  EXPECT_EQ(call(s, "GET", base + "/analysis", "", {{"maxStates", "x"}}).status, 400);
  const Reply t = call(s, "GET", base + "/analysis", "", {{"maxStates", "1"}});
  EXPECT_EQ(t.status, 200);
  EXPECT_EQ(t.body["truncated"], true);
  EXPECT_TRUE(t.body["home_markings"].is_null());

  const std::string timed = "/sessions/" + open(s, doubler_text());
  const Reply u = call(s, "GET", timed + "/analysis");
  EXPECT_EQ(u.status, 422);
  EXPECT_EQ(u.body["error"], "TimedNetUnsupported");
  EXPECT_EQ(call(s, "GET", timed + "/analysis", "", {{"stripTime", "true"}}).status, 200);
}

TEST(Service, ExportRoundTrips) {
  Service s;
  const std::string base = "/sessions/" + open(s, doubler_text());
  call(s, "POST", base + "/fire", R"({"transition": "T"})");
  const HttpResponse exp = s.handle(HttpRequest{"GET", base + "/export", {}, ""});
  EXPECT_EQ(exp.status, 200);
  const std::string base2 = "/sessions/" + open(s, exp.body);
  EXPECT_EQ(call(s, "GET", base2 + "/state").body["marking"], call(s, "GET", base + "/state").body["marking"]);
}

TEST(Service, GetIsIdempotent) {
  Service s;
  const std::string base = "/sessions/" + open(s, doubler_text());
  for (const char* a : {"/state", "/enabled", "/export"}) {
    const std::string first = s.handle(HttpRequest{"GET", base + a, {}, ""}).body;
    EXPECT_EQ(s.handle(HttpRequest{"GET", base + a, {}, ""}).body, first) << a;
  }
  EXPECT_EQ(call(s, "GET", base + "/state").body["marking"]["P_In"].size(), 2u);
}

TEST(Service, SessionsAreIsolated) {
  Service s;
  const std::string a = open(s, doubler_text()), b = open(s, doubler_text());
  EXPECT_NE(a, b);
  call(s, "POST", "/sessions/" + a + "/fire", R"({"transition": "T"})");
  EXPECT_EQ(call(s, "GET", "/sessions/" + b + "/state").body["marking"]["P_Out"].size(), 0u);
}

TEST(Service, IdleSessionsExpire) {
  auto now = Service::Clock::time_point{};
  Service::Options opt;
  opt.idle_timeout = std::chrono::seconds(10);
  opt.now = [&] { return now; };
  Service s(opt);
  const std::string a = open(s, doubler_text());
  now += std::chrono::seconds(8);
  const std::string b = open(s, doubler_text());
  EXPECT_EQ(call(s, "GET", "/sessions/" + a + "/state").status, 200);
  now += std::chrono::seconds(9);
  EXPECT_EQ(call(s, "GET", "/sessions/" + a + "/state").status, 200);
  now += std::chrono::seconds(11);
  EXPECT_EQ(call(s, "GET", "/sessions/" + b + "/state").status, 404);
  EXPECT_EQ(s.session_count(), 0u);
}

TEST(Service, ConcurrentFiringIsSerialized) {
  Service s;
  const std::string doc = R"({"formatVersion": 1, "colorSets": ["colset INT = int;"],
    "places": [{"name": "A", "colorSet": "INT"}, {"name": "B", "colorSet": "INT"}],
    "transitions": [{"name": "T", "variables": ["x"]}],
    "arcs": [{"source": "A", "target": "T", "inscription": "x"}, {"source": "T", "target": "B", "inscription": "x"}],
    "initialMarking": {"tokens": {"A": [)" + [] {
    std::string toks;
    for (int i = 0; i < 200; ++i) toks += (i ? "," : "") + std::string("{\"value\": ") + std::to_string(i) + "}";
    return toks;
  }() + "]}}}";
  const std::string base = "/sessions/" + open(s, doc);
  std::atomic<int> ok{0}, conflict{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 40; ++i) {
        const int status = s.handle(HttpRequest{"POST", base + "/fire", {}, R"({"transition": "T"})"}).status;
        (status == 200 ? ok : conflict)++;
      }
    });
  for (auto& th : threads) th.join();
  EXPECT_EQ(ok.load(), 200);
  EXPECT_EQ(conflict.load(), 120);
  const Reply st = call(s, "GET", base + "/state");
  EXPECT_EQ(st.body["marking"]["A"].size(), 0u);
  EXPECT_EQ(st.body["marking"]["B"].size(), 200u);
}
