#include <doctest.h>

#include <atomic>
#include <chrono>
#include <future>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>

#include "fatgate/binding.hpp"
#include "fatgate/cli.hpp"
#include "fatgate/demo_model.hpp"
#include "fatgate/http_service.hpp"

using namespace fatgate;
using namespace std::chrono_literals;

namespace {

struct Server {
  demo::Model model;
  Registry registry;
  std::unique_ptr<Service> service;
  std::atomic<bool> slow_finished{false};

  explicit Server(std::size_t max_body = 1'048'576, std::chrono::milliseconds slow = 800ms) {
    demo::expose(registry, model);
    auto* flag = &slow_finished;
    registry.register_handler(Path{}, "test", std::make_shared<NodeHandler>(TypeDescriptor{}, ChildMap{}));
    registry.register_handler(
        Path::parse("/test"), "slow",
        std::make_shared<MethodHandler>(OverloadSet("slow", {bind([flag, slow]() {
                                                      std::this_thread::sleep_for(slow);
                                                      *flag = true;
                                                      return 1;
                                                    })})));
    ServiceConfig config;
    config.port = 0;
    config.max_body_bytes = max_body;
    service = Service::serve(config, registry);
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", service->port());
    c.set_read_timeout(5, 0);
    return c;
  }
};

struct Reply {
  int status = 0;
  std::string body;
  std::string content_type;
  friend bool operator==(const Reply&, const Reply&) = default;
  friend std::ostream& operator<<(std::ostream& os, const Reply& r) {
    return os << r.status << " " << r.content_type << " " << r.body;
  }
};

Reply send(const Server& s, const std::string& verb, const std::string& path,
           const std::string& body = "") {
  auto c = s.client();
  httplib::Result r;
  if (verb == "GET") {
    if (body.empty()) {
      r = c.Get(path);
    } else {
      httplib::Request req;
      req.method = "GET";
      req.path = path;
      req.body = body;
      req.set_header("Content-Type", "application/json");
      r = c.send(req);
    }
  } else if (verb == "PUT") {
    r = c.Put(path, body, "application/json");
  } else if (verb == "POST") {
    r = c.Post(path, body, "application/json");
  } else if (verb == "DELETE") {
    r = c.Delete(path);
  } else if (verb == "PATCH") {
    r = c.Patch(path, body, "application/json");
  }
  REQUIRE_MESSAGE(r, verb << " " << path << " failed: " << httplib::to_string(r.error()));
  return {r->status, r->body, r->get_header_value("Content-Type")};
}

std::string cli_output(const std::string& path, const std::string& body) {
  std::vector<std::string> args{"fatgate", "call", path};
  if (!body.empty()) args.push_back(body);
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return out.str();
}

}  // namespace

TEST_CASE("service examples") {
  Server s;
  CHECK(send(s, "GET", "/model/t") == Reply{200, "0", "application/json"});
  CHECK(send(s, "PUT", "/model/t", "10.2").body == "10.2");
  CHECK(send(s, "GET", "/model/t").body == "10.2");

  Server fresh;
  Reply step = send(fresh, "POST", "/model/step", "[3]");
  CHECK(step.status == 200);
  CHECK(parse(step.body).as_number() == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("GET, PUT and POST are interchangeable") {
  const std::vector<std::pair<std::string, std::string>> script{
      {"/model/t", ""},
      {"/model/t", "4.5"},
      {"/model/step", "[2]"},
      {"/model/step", ""},
      {"/model/group/addVariable", R"(["x", 1])"},
      {"/model/group/items/@elem/0/@type", ""},
      {"/model/group/items/@elem/0", R"({"value": 3})"},
      {"/model/@list", ""},
      {"/model/step", R"(["x"])"},
      {"/nope", ""},
      {"/model/t", "{"},
      {"/model/exportEquations", R"(["/nonexistent-dir/x", false])"},
      {"/model", ""},
  };
  Server by_get, by_put, by_post;
  for (const auto& [path, body] : script) {
    Reply g = send(by_get, "GET", path, body);
    CHECK_MESSAGE(g == send(by_put, "PUT", path, body), path << " " << body);
    CHECK_MESSAGE(g == send(by_post, "POST", path, body), path << " " << body);
  }
}

TEST_CASE("error status mapping") {
  Server s(256);
  auto code_of = [](const Reply& r) { return parse(r.body).as_object().find("error")->as_string(); };

  Reply missing = send(s, "GET", "/nope");
  CHECK(missing.status == 404);
  CHECK(code_of(missing) == "NotFound");

  Reply no_match = send(s, "POST", "/model/step", R"(["x"])");
  CHECK(no_match.status == 400);
  CHECK(code_of(no_match) == "NoMatch");

  Reply bad_index = send(s, "GET", "/model/group/items/@elem/9");
  CHECK(bad_index.status == 400);
  CHECK(code_of(bad_index) == "BadIndex");

  Reply malformed = send(s, "POST", "/model/t", "[1,");
  CHECK(malformed.status == 400);
  CHECK(code_of(malformed) == "MalformedInput");

  Reply non_finite = send(s, "POST", "/model/t", "1e999");
  CHECK(non_finite.status == 400);
  CHECK(code_of(non_finite) == "MalformedInput");

  Reply internal = send(s, "POST", "/model/exportEquations", R"(["/nonexistent-dir/x", false])");
  CHECK(internal.status == 500);
  CHECK(code_of(internal) == "Internal");

  Reply too_big = send(s, "POST", "/model/t", std::string(1000, ' ') + "1");
  CHECK(too_big.status == 413);
  CHECK(parse(too_big.body).is_object());

  Reply del = send(s, "DELETE", "/model/t");
  CHECK(del.status == 405);
  CHECK(parse(del.body).is_object());
  CHECK(send(s, "PATCH", "/model/t", "1").status == 405);

  CHECK(send(s, "GET", "/model/t").body == "0");
}

TEST_CASE("query strings are ignored") {
  Server s;
  CHECK(send(s, "GET", "/model/t?x=1").body == "0");
}

TEST_CASE("bodies match the CLI byte for byte") {
  for (const auto& [path, body] : std::vector<std::pair<std::string, std::string>>{
           {"/model/t", ""}, {"/model/step", "[3]"}, {"/model/@list", ""}, {"/nope", ""},
           {"/model/step", R"(["x"])"}, {"/model/exportEquations/@signature", ""}}) {
    Server s;
    CHECK(send(s, "POST", path, body).body == cli_output(path, body));
  }
}

TEST_CASE("a queued request is answered once the slow command completes") {
  Server s;
  auto start = std::chrono::steady_clock::now();
  auto slow = std::async(std::launch::async, [&] { return send(s, "POST", "/test/slow"); });
  std::this_thread::sleep_for(100ms);
  Reply type = send(s, "GET", "/model/@type");
  bool slow_done_first = s.slow_finished.load();
  auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(type == Reply{200, "\"Model\"", "application/json"});
  CHECK(slow_done_first);
  CHECK(slow.get().body == "1");
  CHECK(elapsed < 5s);
}

TEST_CASE("the listener keeps accepting while a command runs") {
  Server s(1'048'576, 1500ms);
  auto slow = std::async(std::launch::async, [&] { return send(s, "POST", "/test/slow"); });
  std::this_thread::sleep_for(100ms);
  // a request refused before reaching the queue is answered immediately
  auto start = std::chrono::steady_clock::now();
  CHECK(send(s, "DELETE", "/model/t").status == 405);
  CHECK(std::chrono::steady_clock::now() - start < 1s);
  CHECK(slow.get().status == 200);
}

TEST_CASE("requests run in arrival order") {
  Server s;
  for (int i = 1; i <= 20; ++i) {
    CHECK(send(s, "PUT", "/model/t", std::to_string(i)).body == std::to_string(i));
  }
  CHECK(send(s, "GET", "/model/t").body == "20");
}

TEST_CASE("shutdown") {
  SUBCASE("immediately after start") {
    Server s;
    s.service->shutdown();
  }
  SUBCASE("twice") {
    Server s;
    s.service->shutdown();
    s.service->shutdown();
  }
  SUBCASE("during a long command lets it finish") {
    Server s;
    auto slow = std::async(std::launch::async, [&] {
      auto c = s.client();
      return c.Post("/test/slow", "", "application/json");
    });
    std::this_thread::sleep_for(100ms);
    s.service->shutdown();
    CHECK(s.slow_finished.load());
    slow.wait();
  }
  SUBCASE("wait returns after shutdown") {
    Server s;
    auto waiter = std::async(std::launch::async, [&] { s.service->wait(); });
    std::this_thread::sleep_for(50ms);
    s.service->shutdown();
    CHECK(waiter.wait_for(2s) == std::future_status::ready);
  }
}

TEST_CASE("config validation") {
  ServiceConfig c;
  CHECK_NOTHROW(c.validate());
  c.port = 70000;
  CHECK_THROWS_AS(c.validate(), Error);
  c.port = 8080;
  c.max_body_bytes = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  CHECK(http_status(ErrorCode::NotFound) == 404);
  CHECK(http_status(ErrorCode::Ambiguous) == 400);
  CHECK(http_status(ErrorCode::Internal) == 500);
}

TEST_CASE("a port already in use is reported") {
  Server s;
  Registry r;
  ServiceConfig c;
  c.port = s.service->port();
  CHECK_THROWS_AS(Service::serve(c, r), Error);
}
