// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <thread>

#include "oce/error.hpp"
#include "oce/genclient.hpp"
#include "stub_server.hpp"
#include "test_support.hpp"

using namespace oce::gen;
using namespace std::chrono_literals;

namespace {

std::vector<ChatTurn> history(std::string text = "hello") { return {{Role::kUser, std::move(text)}}; }

struct Sleeps {
  std::shared_ptr<std::vector<std::chrono::milliseconds>> log = std::make_shared<std::vector<std::chrono::milliseconds>>();
  Sleeper sleeper() {
    auto l = log;
    return [l](std::chrono::milliseconds d) { l->push_back(d); };
  }
};

RemoteBackend remote(const support::StubServer& stub, Sleeps& sleeps, int max_retries = 3) {
  RemoteConfig rc;
  rc.base_url = stub.base_url();
  rc.api_key = "secret";
  rc.retry.max_retries = max_retries;
  rc.sleeper = sleeps.sleeper();
  rc.timeout = 5s;
  return RemoteBackend(rc);
}

oce::Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const oce::Error& e) {
    return e.code();
  }
  FAIL("expected an oce::Error");
  return oce::Errc::kInvalidArgument;
}

}  // namespace

TEST_CASE("payload carries the sampling parameters") {
  GenParams p;
  p.model_id = "m";
  const auto j = build_request_payload(history(), p);
  CHECK(j["temperature"].get<double>() == 0.8);
  CHECK(j["top_p"].get<double>() == 0.95);
  CHECK(j["max_tokens"].get<int>() == 2048);
  CHECK(j["model"] == "m");
  CHECK(j["messages"].size() == 1);
  CHECK(j["messages"][0]["role"] == "user");
  CHECK(j.size() == 5);
}

TEST_CASE("history and params are validated") {
  GenParams p;
  CHECK(code_of([&] { validate_history(std::vector<ChatTurn>{}); }) == oce::Errc::kInvalidArgument);
  CHECK(code_of([&] { validate_history(std::vector<ChatTurn>{{Role::kUser, "a"}, {Role::kAssistant, "b"}}); }) ==
        oce::Errc::kInvalidArgument);
  p.temperature = 3;
  CHECK(code_of([&] { p.validate(); }) == oce::Errc::kConfigError);
  p = {};
  p.top_p = 0;
  CHECK(code_of([&] { p.validate(); }) == oce::Errc::kConfigError);
  p = {};
  p.max_tokens = 0;
  CHECK(code_of([&] { p.validate(); }) == oce::Errc::kConfigError);
}

TEST_CASE("completion body parsing") {
  CHECK(parse_completion_content(support::StubServer::ok_body("hi")) == "hi");
  CHECK(code_of([] { parse_completion_content("{}"); }) == oce::Errc::kTransportError);
  CHECK(code_of([] { parse_completion_content("not json"); }) == oce::Errc::kTransportError);
}

TEST_CASE("backoff delays grow geometrically with bounded jitter") {
  RetryPolicy r;
  CHECK(r.delay(0, 0.0) == 1000ms);
  CHECK(r.delay(1, 0.0) == 2000ms);
  CHECK(r.delay(2, 0.0) == 4000ms);
  CHECK(r.delay(2, 1.0) == 3000ms);
  CHECK(r.delay(0, 0.5) == 875ms);
}

TEST_CASE("remote backend sends the exact payload") {
  support::StubServer stub;
  stub.set_default_text("done");
  Sleeps sleeps;
  auto b = remote(stub, sleeps);
  GenParams p;
  p.model_id = "coder";
  const auto out = b.generate(history("write code"), p);
  CHECK(out.text == "done");
  CHECK(out.retries_used == 0);
  CHECK(out.backend_id == "remote");
  const auto reqs = stub.requests();
  REQUIRE(reqs.size() == 1);
  const auto j = nlohmann::json::parse(reqs[0]);
  CHECK(j == build_request_payload(history("write code"), p));
  CHECK(stub.paths()[0] == "/v1/chat/completions");
  CHECK(stub.auth_headers()[0] == "Bearer secret");
  CHECK(sleeps.log->empty());
}

TEST_CASE("remote backend retries transient failures") {
  support::StubServer stub;
  stub.push(503, "{}");
  stub.push(500, "{}");
  stub.push(200, support::StubServer::ok_body("third time"));
  Sleeps sleeps;
  auto b = remote(stub, sleeps);
  const auto out = b.generate(history(), {});
  CHECK(out.text == "third time");
  CHECK(out.retries_used == 2);
  REQUIRE(sleeps.log->size() == 2);
  CHECK((*sleeps.log)[0] >= 750ms);
  CHECK((*sleeps.log)[0] <= 1000ms);
  CHECK((*sleeps.log)[1] >= 1500ms);
  CHECK((*sleeps.log)[1] <= 2000ms);
}

TEST_CASE("exhausted rate limiting surfaces RateLimited") {
  support::StubServer stub;
  for (int i = 0; i < 4; ++i) stub.push(429, "{}");
  Sleeps sleeps;
  auto b = remote(stub, sleeps);
  CHECK(code_of([&] { b.generate(history(), {}); }) == oce::Errc::kRateLimited);
  CHECK(stub.requests().size() == 4);  // 1 + max_retries
}

TEST_CASE("exhausted server errors surface TransportError") {
  support::StubServer stub;
  for (int i = 0; i < 2; ++i) stub.push(502, "{}");
  Sleeps sleeps;
  auto b = remote(stub, sleeps, 1);
  CHECK(code_of([&] { b.generate(history(), {}); }) == oce::Errc::kTransportError);
  CHECK(stub.requests().size() == 2);
}

TEST_CASE("context overflow is not retried") {
  support::StubServer stub;
  stub.push(400, R"({"error":{"code":"context_length_exceeded","message":"too long"}})");
  Sleeps sleeps;
  auto b = remote(stub, sleeps);
  CHECK(code_of([&] { b.generate(history(), {}); }) == oce::Errc::kContextOverflow);
  CHECK(stub.requests().size() == 1);
  CHECK(sleeps.log->empty());
}

TEST_CASE("other client errors fail immediately") {
  support::StubServer stub;
  stub.push(401, R"({"error":"bad key"})");
  Sleeps sleeps;
  auto b = remote(stub, sleeps);
  CHECK(code_of([&] { b.generate(history(), {}); }) == oce::Errc::kTransportError);
  CHECK(stub.requests().size() == 1);
}

TEST_CASE("unreachable endpoint is a TransportError after retries") {
  int port = 0;
  {
    support::StubServer stub;  // grab a free port, then release it
    port = std::stoi(stub.base_url("").substr(std::string("http://127.0.0.1:").size()));
  }
  RemoteConfig rc;
  rc.base_url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  rc.retry.max_retries = 2;
  Sleeps sleeps;
  rc.sleeper = sleeps.sleeper();
  rc.timeout = 2s;
  RemoteBackend b(rc);
  CHECK(code_of([&] { b.generate(history(), {}); }) == oce::Errc::kTransportError);
  CHECK(sleeps.log->size() == 2);
}

TEST_CASE("base url needs a scheme") {
  RemoteConfig rc;
  rc.base_url = "localhost:8080";
  CHECK(code_of([&] { RemoteBackend b(rc); }) == oce::Errc::kConfigError);
}

TEST_CASE("remote backend does not mutate history") {
  support::StubServer stub;
  Sleeps sleeps;
  auto b = remote(stub, sleeps);
  const std::vector<ChatTurn> h{{Role::kSystem, "sys"}, {Role::kUser, "u"}};
  auto copy = h;
  b.generate(copy, {});
  REQUIRE(copy.size() == h.size());
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(copy[i].content == h[i].content);
}

TEST_CASE("rate limiter spaces requests") {
  RateLimiter unlimited(0);
  for (int i = 0; i < 1000; ++i) unlimited.acquire();
  RateLimiter rl(600);  // 10 per second; capacity 600 makes the first calls free
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 600; ++i) rl.acquire();
  CHECK(std::chrono::steady_clock::now() - start < 500ms);
  rl.acquire();  // bucket empty: waits about 100ms
  CHECK(std::chrono::steady_clock::now() - start >= 80ms);
}

TEST_CASE("mock backend returns scripted text verbatim") {
  MockBackend::Script s{{MockBackend::digest("round one"), "canned\nreply"}};
  MockBackend m(s);
  CHECK(m.generate(history("round one"), {}).text == "canned\nreply");
  CHECK(m.generate(history("round one"), {}).text == "canned\nreply");
  CHECK(m.generate(history("unknown"), {}).text == "<UNREASONABLE>");
  MockBackend custom(s, "FALLBACK");
  CHECK(custom.generate(history("unknown"), {}).text == "FALLBACK");
  CHECK(m.id() == "mock");
}

TEST_CASE("mock keys on the last user turn only") {
  MockBackend m({{MockBackend::digest("second"), "B"}});
  const std::vector<ChatTurn> h{{Role::kUser, "first"}, {Role::kAssistant, "x"}, {Role::kUser, "second"}};
  CHECK(m.generate(h, {}).text == "B");
}

TEST_CASE("mock script file accepts digests and raw prompts") {
  support::TempDir dir;
  support::write_text(dir / "s.jsonl",
                      nlohmann::json{{"prompt", "p1"}, {"response", "r1"}}.dump() + "\n\n" +
                          nlohmann::json{{"digest", MockBackend::digest("p2")}, {"response", "r2"}}.dump() + "\n");
  MockBackend m(MockBackend::load_script(dir / "s.jsonl"));
  CHECK(m.generate(history("p1"), {}).text == "r1");
  CHECK(m.generate(history("p2"), {}).text == "r2");
  support::write_text(dir / "bad.jsonl", "{\"prompt\": 1}\n");
  CHECK(code_of([&] { MockBackend::load_script(dir / "bad.jsonl"); }) == oce::Errc::kParseError);
  CHECK(code_of([&] { MockBackend::load_script(dir / "none.jsonl"); }) == oce::Errc::kUnreadable);
}

TEST_CASE("mock is deterministic under concurrency") {
  MockBackend::Script s;
  for (int i = 0; i < 50; ++i) s[MockBackend::digest("p" + std::to_string(i))] = "r" + std::to_string(i);
  MockBackend m(s);
  std::vector<std::string> results(1000);
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < 8; ++t) {
      threads.emplace_back([&, t] {
        for (int i = t; i < 1000; i += 8) results[i] = m.generate(history("p" + std::to_string(i % 50)), {}).text;
      });
    }
  }
  for (int i = 0; i < 1000; ++i) CHECK(results[i] == "r" + std::to_string(i % 50));
}
