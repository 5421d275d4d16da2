// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oce/corpus.hpp"
#include "oce/rng.hpp"
#include "oce/triplet.hpp"

namespace oce::prompt {

/// The shipped pool size. Smaller pools load with a warning.
inline constexpr std::size_t kDefaultPoolSize = 20;

/// Sentinel the generator emits in round 2 when a task is ill-posed.
inline constexpr std::string_view kUnreasonableToken = "<UNREASONABLE>";

/// Response section markers dictated by the round-1 template.
inline constexpr std::string_view kPreEditMarker = "[PRE-EDIT]";
inline constexpr std::string_view kLazyMarker = "[LAZY]";
inline constexpr std::string_view kDescriptiveMarker = "[DESCRIPTIVE]";

struct ShotExample {
  int shot_id = 0;
  std::string rendered_text;
};

struct ShotPool {
  std::vector<ShotExample> shots;
  std::vector<std::string> warnings;
};

/// Line-delimited JSON records with fields "shot_id" and "text", kept in file
/// order. Throws EmptyShotPool when the file holds no records.
ShotPool load_shot_pool(const std::filesystem::path& path);

/// Round-1 template with placeholders {{SHOT}}, {{SNIPPET_1}} and {{SNIPPET_2}},
/// each of which must appear exactly once.
struct Round1Template {
  std::string text;
  std::string version;
};

Round1Template default_round1_template();
Round1Template load_round1_template(const std::filesystem::path& path);

struct PromptBundle {
  std::string round1_text;
  corpus::SnippetPair pair;
  int shot_id = 0;
  std::string template_version;
};

/// Picks one shot uniformly at random and renders the template. Pure in
/// (pair, pool, rng state, template).
PromptBundle build_round1_prompt(const corpus::SnippetPair& pair, std::span<const ShotExample> pool,
                                 Rng& rng, const Round1Template& tmpl = default_round1_template());

/// Embeds the pre-edit code and the descriptive instruction.
std::string build_round2_prompt(const EditTask& task);

}  // namespace oce::prompt
