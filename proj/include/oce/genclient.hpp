// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include <json.hpp>

namespace oce::gen {

enum class Role { kSystem, kUser, kAssistant };

struct ChatTurn {
  Role role = Role::kUser;
  std::string content;
};

struct GenParams {
  std::string model_id;
  double temperature = 0.8;
  double top_p = 0.95;
  int max_tokens = 2048;

  void validate() const;
};

struct GenResult {
  std::string text;
  std::string backend_id;
  std::int64_t latency_ms = 0;
  int retries_used = 0;
};

std::string_view to_string(Role role);

/// Throws InvalidArgument unless the history ends with a user turn and no
/// user/assistant turn is empty.
void validate_history(std::span<const ChatTurn> history);

/// Chat-completion request body: model, messages, temperature, top_p, max_tokens.
nlohmann::json build_request_payload(std::span<const ChatTurn> history, const GenParams& params);

/// Extracts choices[0].message.content. Throws TransportError on a body that
/// does not have that shape.
std::string parse_completion_content(std::string_view body);

/// A text-generation backend. Implementations must be callable from several
/// threads at once and must not retain the history.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual GenResult generate(std::span<const ChatTurn> history, const GenParams& params) = 0;
  virtual std::string id() const = 0;
};

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  double jitter = 0.25;  // delay is scaled by a uniform factor in [1 - jitter, 1]

  /// Backoff before retry number `retry` (0-based), given u in [0, 1).
  std::chrono::milliseconds delay(int retry, double u) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// Token bucket holding at most one minute's worth of requests. A rate of 0
/// disables limiting.
class RateLimiter {
 public:
  using Clock = std::chrono::steady_clock;

  explicit RateLimiter(double requests_per_minute);

  /// Blocks until a token is available.
  void acquire();

 private:
  double rate_per_ms_;
  double capacity_;
  double tokens_;
  Clock::time_point last_;
  std::mutex mu_;
};

struct RemoteConfig {
  std::string base_url;  // e.g. https://api.example.com/v1
  std::string api_key;
  RetryPolicy retry;
  double requests_per_minute = 0;
  std::chrono::seconds timeout{120};
  Sleeper sleeper;  // defaults to std::this_thread::sleep_for
};

/// HTTP chat-completion client: POST <base_url>/chat/completions.
///
/// 429 and 5xx responses and connection failures are retried with
/// exponential backoff; a 400/413 that reports an exceeded context window is
/// ContextOverflow and is not retried. Other 4xx fail immediately.
class RemoteBackend : public Backend {
 public:
  explicit RemoteBackend(RemoteConfig cfg);

  GenResult generate(std::span<const ChatTurn> history, const GenParams& params) override;
  std::string id() const override { return "remote"; }

 private:
  RemoteConfig cfg_;
  std::string scheme_host_port_;
  std::string path_;
  RateLimiter limiter_;
};

/// Deterministic test double: responses are looked up by the SHA-256 of the
/// last user turn.
class MockBackend : public Backend {
 public:
  using Script = std::unordered_map<std::string, std::string>;

  explicit MockBackend(Script script, std::string fallback = std::string(kDefaultFallback));

  /// JSONL records {"digest": ..., "response": ...} or {"prompt": ..., "response": ...}.
  static Script load_script(const std::filesystem::path& path);
  static std::string digest(std::string_view prompt);

  GenResult generate(std::span<const ChatTurn> history, const GenParams& params) override;
  std::string id() const override { return "mock"; }

  static constexpr std::string_view kDefaultFallback = "<UNREASONABLE>";

 private:
  Script script_;
  std::string fallback_;
};

/// Free-function form of MockBackend::generate.
GenResult mock_generate(std::span<const ChatTurn> history, const GenParams& params,
                        const MockBackend::Script& script, std::string_view fallback);

}  // namespace oce::gen
