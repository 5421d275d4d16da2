// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

// Local chat-completion endpoint for client tests. Each request is recorded;
// responses come from a queue of (status, body) pairs, then a default reply.

#pragma once

#include <deque>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

namespace support {

class StubServer {
 public:
  StubServer() {
    server_.Post(R"(.*/chat/completions)", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu_);
      requests_.push_back(req.body);
      paths_.push_back(req.path);
      auth_.push_back(req.get_header_value("Authorization"));
      auto [status, body] = replies_.empty() ? std::make_pair(200, ok_body(default_text_)) : replies_.front();
      if (!replies_.empty()) replies_.pop_front();
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  static std::string ok_body(const std::string& text) {
    return nlohmann::json{{"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", text}}}}}}}
        .dump();
  }

  void push(int status, std::string body) {
    std::lock_guard lock(mu_);
    replies_.emplace_back(status, std::move(body));
  }
  void set_default_text(std::string text) {
    std::lock_guard lock(mu_);
    default_text_ = std::move(text);
  }

  std::string base_url(const std::string& prefix = "/v1") const {
    return "http://127.0.0.1:" + std::to_string(port_) + prefix;
  }
  std::vector<std::string> requests() const {
    std::lock_guard lock(mu_);
    return requests_;
  }
  std::vector<std::string> paths() const {
    std::lock_guard lock(mu_);
    return paths_;
  }
  std::vector<std::string> auth_headers() const {
    std::lock_guard lock(mu_);
    return auth_;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mu_;
  std::deque<std::pair<int, std::string>> replies_;
  std::vector<std::string> requests_, paths_, auth_;
  std::string default_text_ = "ok";
};

}  // namespace support
