// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/genclient.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <thread>

#include <httplib.h>

#include "oce/digest.hpp"
#include "oce/error.hpp"

namespace oce::gen {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "user";
}

void GenParams::validate() const {
  if (!(temperature >= 0.0 && temperature <= 2.0)) {
    throw Error(Errc::kConfigError, "temperature must be in [0, 2]");
  }
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(Errc::kConfigError, "top_p must be in (0, 1]");
  if (max_tokens < 1) throw Error(Errc::kConfigError, "max_tokens must be >= 1");
}

void validate_history(std::span<const ChatTurn> history) {
  if (history.empty() || history.back().role != Role::kUser) {
    throw Error(Errc::kInvalidArgument, "history must end with a user turn");
  }
  for (const auto& t : history) {
    if (t.role != Role::kSystem && t.content.empty()) {
      throw Error(Errc::kInvalidArgument, "empty user/assistant turn");
    }
  }
}

nlohmann::json build_request_payload(std::span<const ChatTurn> history, const GenParams& params) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& t : history) {
    messages.push_back({{"role", to_string(t.role)}, {"content", t.content}});
  }
  return {
      {"model", params.model_id},
      {"messages", std::move(messages)},
      {"temperature", params.temperature},
      {"top_p", params.top_p},
      {"max_tokens", params.max_tokens},
  };
}

std::string parse_completion_content(std::string_view body) {
  try {
    auto j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kTransportError, std::string("unexpected response body: ") + e.what());
  }
}

std::chrono::milliseconds RetryPolicy::delay(int retry, double u) const {
  const double scale = 1.0 - jitter * std::clamp(u, 0.0, 1.0);
  const double ms = static_cast<double>(base_delay.count()) * std::pow(factor, retry) * scale;
  return std::chrono::milliseconds(static_cast<std::int64_t>(std::max(0.0, ms)));
}

RateLimiter::RateLimiter(double requests_per_minute)
    : rate_per_ms_(requests_per_minute / 60000.0),
      capacity_(std::max(1.0, requests_per_minute)),
      tokens_(capacity_),
      last_(Clock::now()) {}

void RateLimiter::acquire() {
  if (rate_per_ms_ <= 0) return;
  std::unique_lock lock(mu_);
  for (;;) {
    const auto now = Clock::now();
    const double elapsed =
        std::chrono::duration<double, std::milli>(now - last_).count();
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_ms_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const auto wait = std::chrono::duration<double, std::milli>((1.0 - tokens_) / rate_per_ms_);
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

namespace {

bool mentions_context_overflow(std::string_view body) {
  return body.find("context_length_exceeded") != std::string_view::npos ||
         body.find("maximum context length") != std::string_view::npos ||
         body.find("context window") != std::string_view::npos;
}

double jitter_draw() {
  thread_local std::mt19937_64 rng(std::random_device{}());
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

RemoteBackend::RemoteBackend(RemoteConfig cfg)
    : cfg_(std::move(cfg)), limiter_(cfg_.requests_per_minute) {
  std::string url = cfg_.base_url;
  while (!url.empty() && url.back() == '/') url.pop_back();
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(Errc::kConfigError, "gen.base_url must include a scheme: '" + cfg_.base_url + "'");
  }
  const auto path_begin = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_begin);
  path_ = (path_begin == std::string::npos ? std::string{} : url.substr(path_begin)) +
          "/chat/completions";
  if (!cfg_.sleeper) {
    cfg_.sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

GenResult RemoteBackend::generate(std::span<const ChatTurn> history, const GenParams& params) {
  validate_history(history);
  params.validate();
  const std::string body = build_request_payload(history, params).dump();
  const auto started = std::chrono::steady_clock::now();

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(cfg_.timeout);
  client.set_read_timeout(cfg_.timeout);
  client.set_write_timeout(cfg_.timeout);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

  Errc last_code = Errc::kTransportError;
  std::string last_message;
  for (int attempt = 0; attempt <= cfg_.retry.max_retries; ++attempt) {
    if (attempt > 0) cfg_.sleeper(cfg_.retry.delay(attempt - 1, jitter_draw()));
    limiter_.acquire();
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_code = Errc::kTransportError;
      last_message = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    const int status = res->status;
    if (status >= 200 && status < 300) {
      GenResult out;
      out.text = parse_completion_content(res->body);
      out.backend_id = id();
      out.retries_used = attempt;
      out.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                           std::chrono::steady_clock::now() - started)
                           .count();
      return out;
    }
    if ((status == 400 || status == 413) && mentions_context_overflow(res->body)) {
      throw Error(Errc::kContextOverflow, "HTTP " + std::to_string(status) + ": " + res->body);
    }
    if (status == 429) {
      last_code = Errc::kRateLimited;
    } else if (status >= 500) {
      last_code = Errc::kTransportError;
    } else {
      throw Error(Errc::kTransportError, "HTTP " + std::to_string(status) + ": " + res->body);
    }
    last_message = "HTTP " + std::to_string(status);
  }
  throw Error(last_code, last_message + " after " + std::to_string(cfg_.retry.max_retries) +
                             " retries");
}

MockBackend::MockBackend(Script script, std::string fallback)
    : script_(std::move(script)), fallback_(std::move(fallback)) {}

std::string MockBackend::digest(std::string_view prompt) { return sha256_hex(prompt); }

MockBackend::Script MockBackend::load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kUnreadable, "cannot read mock script " + path.string());
  Script script;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      std::string key = rec.contains("digest") ? rec.at("digest").get<std::string>()
                                               : digest(rec.at("prompt").get<std::string>());
      script.insert_or_assign(std::move(key), rec.at("response").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kParseError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return script;
}

GenResult mock_generate(std::span<const ChatTurn> history, const GenParams& params,
                        const MockBackend::Script& script, std::string_view fallback) {
  validate_history(history);
  params.validate();
  GenResult out;
  auto it = script.find(MockBackend::digest(history.back().content));
  out.text = it == script.end() ? std::string(fallback) : it->second;
  out.backend_id = "mock";
  return out;
}

GenResult MockBackend::generate(std::span<const ChatTurn> history, const GenParams& params) {
  return mock_generate(history, params, script_, fallback_);
}

}  // namespace oce::gen
