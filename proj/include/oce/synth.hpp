// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "oce/corpus.hpp"
#include "oce/genclient.hpp"
#include "oce/promptgen.hpp"
#include "oce/rng.hpp"
#include "oce/triplet.hpp"

namespace oce::synth {

/// Round-1 response grammar:
///
///   [PRE-EDIT]
///   ```lang
///   <code>
///   ```
///   [LAZY]
///   <text>
///   [DESCRIPTIVE]
///   <text>
///
/// Markers are recognized at the start of a line, in any order. Text before
/// the first marker is ignored; within [PRE-EDIT] only the first fenced block
/// is kept. Throws MalformedRound1 when a section is missing or empty.
EditTask parse_round1(std::string_view text);

struct Unreasonable {
  bool operator==(const Unreasonable&) const = default;
};
using Round2Result = std::variant<std::string, Unreasonable>;

/// <UNREASONABLE> anywhere wins over code. Otherwise the first fenced block
/// is the post-edit code; MalformedRound2 if there is none or it is empty.
Round2Result parse_round2(std::string_view text);

/// Content of the first complete fenced block, if any.
std::optional<std::string> first_fenced_block(std::string_view text);

enum class DiscardReason { kUnreasonable, kMalformedRound1, kMalformedRound2, kGenerationError };

std::string_view to_string(DiscardReason reason);

struct SynthesisOutcome {
  std::vector<EditTriplet> triplets;  // empty, or {lazy, descriptive}
  std::optional<DiscardReason> discard_reason;
  std::string detail;
};

struct SynthContext {
  std::span<const prompt::ShotExample> pool;
  gen::GenParams params;
  gen::Backend* backend = nullptr;
  prompt::Round1Template round1 = prompt::default_round1_template();
};

/// Runs both dialogue rounds for one snippet pair. Never throws for
/// generation or parsing problems; they become a discard reason.
SynthesisOutcome synthesize_pair(const corpus::SnippetPair& pair, const SynthContext& ctx, Rng& rng);

struct BatchOptions {
  std::size_t n_pairs = 1;
  std::uint64_t seed = 0;
  int parallelism = 8;
  corpus::SnippetConfig snippet;
};

struct DiscardRecord {
  std::size_t pair_index = 0;
  DiscardReason reason = DiscardReason::kGenerationError;
  std::string detail;
};

struct DiscardReport {
  std::vector<DiscardRecord> records;  // ascending pair_index

  std::map<DiscardReason, std::size_t> counts() const;
  nlohmann::json to_json() const;
};

struct BatchResult {
  std::vector<EditTriplet> triplets;  // ascending pair index, lazy before descriptive
  DiscardReport discards;
  std::size_t pairs = 0;
};

/// Pair i draws its snippets and shot from Rng(derive_seed(seed, i)), so the
/// output does not depend on parallelism or completion order.
BatchResult synthesize_batch(const corpus::Corpus& corpus, const SynthContext& ctx,
                             const BatchOptions& opts);

/// The prompts synthesize_batch will send in round 1, in pair order.
std::vector<prompt::PromptBundle> plan_round1(const corpus::Corpus& corpus, const SynthContext& ctx,
                                              const BatchOptions& opts);

}  // namespace oce::synth
