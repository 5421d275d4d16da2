// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/synth.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "oce/error.hpp"

namespace oce::synth {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      out.push_back(text.substr(start));
      break;
    }
    out.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return out;
}

bool is_fence(std::string_view line) { return trim(line).starts_with("```"); }

std::string join(std::span<const std::string_view> lines) {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    std::string_view l = lines[i];
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    out += l;
  }
  return out;
}

struct Sections {
  std::optional<std::string> pre_edit_body;
  std::optional<std::string> lazy;
  std::optional<std::string> descriptive;
};

}  // namespace

std::optional<std::string> first_fenced_block(std::string_view text) {
  const auto lines = lines_of(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_fence(lines[i])) continue;
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      if (is_fence(lines[j])) {
        return join(std::span(lines).subspan(i + 1, j - i - 1));
      }
    }
    return std::nullopt;
  }
  return std::nullopt;
}

EditTask parse_round1(std::string_view text) {
  enum class Sec { kNone, kPre, kLazy, kDesc };
  const auto lines = lines_of(text);
  std::vector<std::string_view> pre, lazy, desc;
  bool seen_pre = false, seen_lazy = false, seen_desc = false;
  Sec cur = Sec::kNone;
  bool in_fence = false;  // markers inside a code block are code, not markers
  for (auto line : lines) {
    const auto t = trim(line);
    if (!in_fence) {
      auto try_marker = [&](std::string_view marker, Sec sec, bool& seen) {
        if (!t.starts_with(marker)) return false;
        cur = sec;
        seen = true;
        const auto tail = trim(t.substr(marker.size()));
        if (!tail.empty()) {
          (sec == Sec::kPre ? pre : sec == Sec::kLazy ? lazy : desc).push_back(tail);
        }
        return true;
      };
      if (try_marker(prompt::kPreEditMarker, Sec::kPre, seen_pre) ||
          try_marker(prompt::kLazyMarker, Sec::kLazy, seen_lazy) ||
          try_marker(prompt::kDescriptiveMarker, Sec::kDesc, seen_desc)) {
        continue;
      }
    }
    if (is_fence(line)) in_fence = !in_fence;
    switch (cur) {
      case Sec::kPre: pre.push_back(line); break;
      case Sec::kLazy: lazy.push_back(line); break;
      case Sec::kDesc: desc.push_back(line); break;
      case Sec::kNone: break;
    }
  }
  if (!seen_pre || !seen_lazy || !seen_desc) {
    throw Error(Errc::kMalformedRound1, "missing section");
  }
  EditTask task;
  auto code = first_fenced_block(join(pre));
  if (!code || trim(*code).empty()) throw Error(Errc::kMalformedRound1, "empty pre-edit code block");
  task.pre_edit = std::move(*code);
  task.instruction_lazy = std::string(trim(join(lazy)));
  task.instruction_descriptive = std::string(trim(join(desc)));
  if (task.instruction_lazy.empty() || task.instruction_descriptive.empty()) {
    throw Error(Errc::kMalformedRound1, "empty instruction");
  }
  return task;
}

Round2Result parse_round2(std::string_view text) {
  if (text.find(prompt::kUnreasonableToken) != std::string_view::npos) return Unreasonable{};
  auto code = first_fenced_block(text);
  if (!code || trim(*code).empty()) {
    throw Error(Errc::kMalformedRound2, "no post-edit code block");
  }
  return std::move(*code);
}

std::string_view to_string(DiscardReason reason) {
  switch (reason) {
    case DiscardReason::kUnreasonable: return "unreasonable";
    case DiscardReason::kMalformedRound1: return "malformed_round1";
    case DiscardReason::kMalformedRound2: return "malformed_round2";
    case DiscardReason::kGenerationError: return "generation_error";
  }
  return "?";
}

SynthesisOutcome synthesize_pair(const corpus::SnippetPair& pair, const SynthContext& ctx, Rng& rng) {
  if (ctx.backend == nullptr) throw Error(Errc::kConfigError, "no generation backend");
  const auto bundle = prompt::build_round1_prompt(pair, ctx.pool, rng, ctx.round1);

  SynthesisOutcome out;
  auto discard = [&](DiscardReason r, std::string detail) {
    out.discard_reason = r;
    out.detail = std::move(detail);
    return out;
  };

  std::vector<gen::ChatTurn> history{{gen::Role::kUser, bundle.round1_text}};
  gen::GenResult r1;
  try {
    r1 = ctx.backend->generate(history, ctx.params);
  } catch (const std::exception& e) {
    return discard(DiscardReason::kGenerationError, e.what());
  }

  EditTask task;
  try {
    task = parse_round1(r1.text);
  } catch (const Error& e) {
    return discard(DiscardReason::kMalformedRound1, e.what());
  }

  history.push_back({gen::Role::kAssistant, r1.text});
  history.push_back({gen::Role::kUser, prompt::build_round2_prompt(task)});
  gen::GenResult r2;
  try {
    r2 = ctx.backend->generate(history, ctx.params);
  } catch (const std::exception& e) {
    return discard(DiscardReason::kGenerationError, e.what());
  }

  Round2Result post;
  try {
    post = parse_round2(r2.text);
  } catch (const Error& e) {
    return discard(DiscardReason::kMalformedRound2, e.what());
  }
  if (std::holds_alternative<Unreasonable>(post)) {
    return discard(DiscardReason::kUnreasonable, "generator flagged the task");
  }

  EditTriplet base;
  base.pre_edit = task.pre_edit;
  base.post_edit = std::get<std::string>(post);
  base.generator_id = ctx.params.model_id.empty() ? r2.backend_id : ctx.params.model_id;
  base.pair_provenance = {Provenance{pair.first.source_id, pair.first.start_line},
                          Provenance{pair.second.source_id, pair.second.start_line}};
  base.shot_id = bundle.shot_id;

  EditTriplet lazy = base;
  lazy.instruction = task.instruction_lazy;
  lazy.style = Style::kLazy;
  EditTriplet descriptive = std::move(base);
  descriptive.instruction = task.instruction_descriptive;
  descriptive.style = Style::kDescriptive;
  out.triplets.push_back(std::move(lazy));
  out.triplets.push_back(std::move(descriptive));
  return out;
}

std::map<DiscardReason, std::size_t> DiscardReport::counts() const {
  std::map<DiscardReason, std::size_t> c;
  for (const auto& r : records) ++c[r.reason];
  return c;
}

nlohmann::json DiscardReport::to_json() const {
  nlohmann::json counts_json = nlohmann::json::object();
  for (auto r : {DiscardReason::kUnreasonable, DiscardReason::kMalformedRound1,
                 DiscardReason::kMalformedRound2, DiscardReason::kGenerationError}) {
    counts_json[std::string(to_string(r))] = 0;
  }
  for (const auto& [r, n] : counts()) counts_json[std::string(to_string(r))] = n;
  nlohmann::json recs = nlohmann::json::array();
  for (const auto& r : records) {
    recs.push_back({{"pair_index", r.pair_index}, {"reason", to_string(r.reason)}, {"detail", r.detail}});
  }
  return {{"counts", std::move(counts_json)}, {"total", records.size()}, {"records", std::move(recs)}};
}

namespace {

void check_batch(const corpus::Corpus& corpus, const SynthContext& ctx, const BatchOptions& opts) {
  if (opts.n_pairs < 1) throw Error(Errc::kConfigError, "n_pairs must be >= 1");
  if (corpus.files.size() < 2) throw Error(Errc::kInsufficientFiles, "need at least 2 eligible files");
  if (ctx.pool.empty()) throw Error(Errc::kEmptyShotPool, "no shots");
  if (ctx.backend == nullptr) throw Error(Errc::kConfigError, "no generation backend");
  opts.snippet.validate();
  ctx.params.validate();
}

}  // namespace

std::vector<prompt::PromptBundle> plan_round1(const corpus::Corpus& corpus, const SynthContext& ctx,
                                              const BatchOptions& opts) {
  std::vector<prompt::PromptBundle> plans;
  plans.reserve(opts.n_pairs);
  for (std::size_t i = 0; i < opts.n_pairs; ++i) {
    Rng rng(derive_seed(opts.seed, i));
    const auto pair = corpus::sample_pair(corpus, opts.snippet, rng);
    plans.push_back(prompt::build_round1_prompt(pair, ctx.pool, rng, ctx.round1));
  }
  return plans;
}

BatchResult synthesize_batch(const corpus::Corpus& corpus, const SynthContext& ctx,
                             const BatchOptions& opts) {
  check_batch(corpus, ctx, opts);
  std::vector<SynthesisOutcome> outcomes(opts.n_pairs);
  std::atomic<std::size_t> next{0};
  std::mutex failure_mu;
  std::exception_ptr failure;
  auto worker = [&] {
    try {
      for (std::size_t i = next++; i < opts.n_pairs; i = next++) {
        Rng rng(derive_seed(opts.seed, i));
        const auto pair = corpus::sample_pair(corpus, opts.snippet, rng);
        outcomes[i] = synthesize_pair(pair, ctx, rng);
      }
    } catch (...) {
      std::lock_guard lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = opts.n_pairs;
    }
  };
  const auto n_threads = static_cast<std::size_t>(std::clamp<std::size_t>(
      static_cast<std::size_t>(std::max(opts.parallelism, 1)), 1, opts.n_pairs));
  {
    std::vector<std::jthread> threads;
    threads.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) threads.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  BatchResult result;
  result.pairs = opts.n_pairs;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    auto& o = outcomes[i];
    if (o.discard_reason) {
      result.discards.records.push_back({i, *o.discard_reason, std::move(o.detail)});
    } else {
      for (auto& t : o.triplets) result.triplets.push_back(std::move(t));
    }
  }
  return result;
}

}  // namespace oce::synth
