// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "oce/corpus.hpp"
#include "oce/genclient.hpp"
#include "oce/pipeline.hpp"
#include "oce/topics.hpp"

namespace oce::config {

/// Directory holding the shipped shot pool, templates and stopword lists.
/// OCE_ASSET_DIR overrides the build-time default.
std::filesystem::path asset_dir();

/// Every knob of a run. Loaded from a sectioned TOML/INI file
/// ([corpus], [prompts], [gen], [filter], [hdp], [topics], [pipeline], [run])
/// and overridden by command-line flags.
struct RunConfig {
  corpus::CorpusSpec corpus;
  corpus::SnippetConfig snippet;

  std::filesystem::path shot_pool_path;
  std::filesystem::path round1_template_path;  // empty: built-in template

  std::string backend = "remote";  // "remote" | "mock"
  std::string base_url = "https://api.deepseek.com/v1";
  gen::GenParams gen;
  int max_retries = 3;
  int parallelism = 8;
  double requests_per_minute = 0;
  int timeout_s = 120;
  std::filesystem::path mock_script;
  std::string mock_fallback = "<UNREASONABLE>";

  pipeline::FilterThresholds thresholds;
  int context_lines = 3;

  topics::HdpConfig hdp;
  int min_doc_freq = 2;
  int min_token_len = 2;
  std::filesystem::path nl_stopwords_path;
  std::filesystem::path code_stopwords_path;

  std::int64_t target_total = 20000;
  std::size_t per_style_per_source = 15000;
  std::string order = "mix_then_filter";  // or "filter_then_mix"

  std::uint64_t master_seed = 0;
  std::filesystem::path output_dir = "out";

  RunConfig();

  /// Sets one "section.key" entry. Throws ConfigError on unknown keys or
  /// malformed values.
  void set(std::string_view key, std::string_view value);
  void load_file(const std::filesystem::path& path);
  void validate() const;

  nlohmann::json to_json() const;

  topics::TokenizerConfig tokenizer() const;
  pipeline::PipelineConfig pipeline() const;
};

}  // namespace oce::config
