// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>

#include <CLI11.hpp>

#include "oce/error.hpp"

namespace oce::config {
namespace fs = std::filesystem;

fs::path asset_dir() {
  if (const char* env = std::getenv("OCE_ASSET_DIR"); env != nullptr && *env != '\0') return env;
  return OCE_DEFAULT_ASSET_DIR;
}

RunConfig::RunConfig() {
  const auto dir = asset_dir();
  shot_pool_path = dir / "shot_pool.jsonl";
  nl_stopwords_path = dir / "nl_stopwords.txt";
  code_stopwords_path = dir / "code_stopwords.txt";
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(Errc::kConfigError, "invalid value '" + std::string(value) + "' for " + std::string(key));
}

template <typename T>
T parse_int(std::string_view key, std::string_view v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v);
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  std::string s(v);
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) bad_value(key, v);
  return out;
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(key, v);
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"corpus.kind", [](RunConfig& c, auto, auto v) { c.corpus.kind = corpus::corpus_kind_from_string(v); }},
      {"corpus.path", [](RunConfig& c, auto, auto v) { c.corpus.path = fs::path(std::string(v)); }},
      {"corpus.code_field", [](RunConfig& c, auto, auto v) { c.corpus.code_field = v; }},
      {"corpus.language_tag", [](RunConfig& c, auto, auto v) { c.corpus.language_tag = v; }},
      {"corpus.min_lines", [](RunConfig& c, auto k, auto v) { c.snippet.min_lines = parse_int<int>(k, v); }},
      {"corpus.max_lines", [](RunConfig& c, auto k, auto v) { c.snippet.max_lines = parse_int<int>(k, v); }},
      {"prompts.shot_pool_path", [](RunConfig& c, auto, auto v) { c.shot_pool_path = fs::path(std::string(v)); }},
      {"prompts.round1_template_path",
       [](RunConfig& c, auto, auto v) { c.round1_template_path = fs::path(std::string(v)); }},
      {"gen.backend", [](RunConfig& c, auto, auto v) { c.backend = v; }},
      {"gen.base_url", [](RunConfig& c, auto, auto v) { c.base_url = v; }},
      {"gen.model_id", [](RunConfig& c, auto, auto v) { c.gen.model_id = v; }},
      {"gen.temperature", [](RunConfig& c, auto k, auto v) { c.gen.temperature = parse_double(k, v); }},
      {"gen.top_p", [](RunConfig& c, auto k, auto v) { c.gen.top_p = parse_double(k, v); }},
      {"gen.max_tokens", [](RunConfig& c, auto k, auto v) { c.gen.max_tokens = parse_int<int>(k, v); }},
      {"gen.max_retries", [](RunConfig& c, auto k, auto v) { c.max_retries = parse_int<int>(k, v); }},
      {"gen.parallelism", [](RunConfig& c, auto k, auto v) { c.parallelism = parse_int<int>(k, v); }},
      {"gen.requests_per_minute",
       [](RunConfig& c, auto k, auto v) { c.requests_per_minute = parse_double(k, v); }},
      {"gen.timeout_s", [](RunConfig& c, auto k, auto v) { c.timeout_s = parse_int<int>(k, v); }},
      {"gen.mock_script", [](RunConfig& c, auto, auto v) { c.mock_script = fs::path(std::string(v)); }},
      {"gen.mock_fallback", [](RunConfig& c, auto, auto v) { c.mock_fallback = v; }},
      {"filter.max_modified_lines",
       [](RunConfig& c, auto k, auto v) { c.thresholds.max_modified_lines = parse_int<int>(k, v); }},
      {"filter.max_hunks", [](RunConfig& c, auto k, auto v) { c.thresholds.max_hunks = parse_int<int>(k, v); }},
      {"filter.drop_zero_hunks",
       [](RunConfig& c, auto k, auto v) { c.thresholds.drop_zero_hunks = parse_bool(k, v); }},
      {"filter.context_lines", [](RunConfig& c, auto k, auto v) { c.context_lines = parse_int<int>(k, v); }},
      {"hdp.gamma", [](RunConfig& c, auto k, auto v) { c.hdp.gamma = parse_double(k, v); }},
      {"hdp.alpha0", [](RunConfig& c, auto k, auto v) { c.hdp.alpha0 = parse_double(k, v); }},
      {"hdp.eta", [](RunConfig& c, auto k, auto v) { c.hdp.eta = parse_double(k, v); }},
      {"hdp.max_topics", [](RunConfig& c, auto k, auto v) { c.hdp.max_topics = parse_int<int>(k, v); }},
      {"hdp.iterations", [](RunConfig& c, auto k, auto v) { c.hdp.iterations = parse_int<int>(k, v); }},
      {"topics.min_doc_freq", [](RunConfig& c, auto k, auto v) { c.min_doc_freq = parse_int<int>(k, v); }},
      {"topics.min_token_len", [](RunConfig& c, auto k, auto v) { c.min_token_len = parse_int<int>(k, v); }},
      {"topics.nl_stopwords_path",
       [](RunConfig& c, auto, auto v) { c.nl_stopwords_path = fs::path(std::string(v)); }},
      {"topics.code_stopwords_path",
       [](RunConfig& c, auto, auto v) { c.code_stopwords_path = fs::path(std::string(v)); }},
      {"pipeline.target_total",
       [](RunConfig& c, auto k, auto v) { c.target_total = parse_int<std::int64_t>(k, v); }},
      {"pipeline.per_style_per_source",
       [](RunConfig& c, auto k, auto v) { c.per_style_per_source = parse_int<std::size_t>(k, v); }},
      {"pipeline.order", [](RunConfig& c, auto, auto v) { c.order = v; }},
      {"run.seed", [](RunConfig& c, auto k, auto v) { c.master_seed = parse_int<std::uint64_t>(k, v); }},
      {"run.output_dir", [](RunConfig& c, auto, auto v) { c.output_dir = fs::path(std::string(v)); }},
  };
  return table;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto& table = setters();
  auto it = table.find(key);
  if (it == table.end()) throw Error(Errc::kConfigError, "unknown config key '" + std::string(key) + "'");
  it->second(*this, key, value);
}

void RunConfig::load_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kConfigError, "cannot read config " + path.string());
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_config(in);
  } catch (const CLI::Error& e) {
    throw Error(Errc::kConfigError, path.string() + ": " + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section open/close markers
    if (item.inputs.size() != 1) {
      throw Error(Errc::kConfigError, "config key '" + item.fullname() + "' needs exactly one value");
    }
    set(item.fullname(), item.inputs.front());
  }
}

void RunConfig::validate() const {
  snippet.validate();
  gen.validate();
  thresholds.validate();
  hdp.validate();
  if (backend != "remote" && backend != "mock") {
    throw Error(Errc::kConfigError, "gen.backend must be \"remote\" or \"mock\"");
  }
  if (order != "mix_then_filter" && order != "filter_then_mix") {
    throw Error(Errc::kConfigError, "pipeline.order must be mix_then_filter or filter_then_mix");
  }
  if (max_retries < 0) throw Error(Errc::kConfigError, "gen.max_retries must be >= 0");
  if (parallelism < 1) throw Error(Errc::kConfigError, "gen.parallelism must be >= 1");
  if (requests_per_minute < 0) throw Error(Errc::kConfigError, "gen.requests_per_minute must be >= 0");
  if (context_lines < 0) throw Error(Errc::kConfigError, "filter.context_lines must be >= 0");
  if (target_total < 0 || target_total % 2 != 0) {
    throw Error(Errc::kConfigError, "pipeline.target_total must be a non-negative even number");
  }
}

nlohmann::json RunConfig::to_json() const {
  return {
      {"corpus",
       {{"kind", corpus::to_string(corpus.kind)},
        {"path", corpus.path.string()},
        {"code_field", corpus.code_field},
        {"language_tag", corpus.language_tag},
        {"min_lines", snippet.min_lines},
        {"max_lines", snippet.max_lines}}},
      {"prompts",
       {{"shot_pool_path", shot_pool_path.string()}, {"round1_template_path", round1_template_path.string()}}},
      {"gen",
       {{"backend", backend},
        {"base_url", base_url},
        {"model_id", gen.model_id},
        {"temperature", gen.temperature},
        {"top_p", gen.top_p},
        {"max_tokens", gen.max_tokens},
        {"max_retries", max_retries},
        {"parallelism", parallelism},
        {"requests_per_minute", requests_per_minute},
        {"timeout_s", timeout_s},
        {"mock_script", mock_script.string()},
        {"mock_fallback", mock_fallback}}},
      {"filter",
       {{"max_modified_lines", thresholds.max_modified_lines},
        {"max_hunks", thresholds.max_hunks},
        {"drop_zero_hunks", thresholds.drop_zero_hunks},
        {"context_lines", context_lines}}},
      {"hdp",
       {{"gamma", hdp.gamma},
        {"alpha0", hdp.alpha0},
        {"eta", hdp.eta},
        {"max_topics", hdp.max_topics},
        {"iterations", hdp.iterations}}},
      {"topics",
       {{"min_doc_freq", min_doc_freq},
        {"min_token_len", min_token_len},
        {"nl_stopwords_path", nl_stopwords_path.string()},
        {"code_stopwords_path", code_stopwords_path.string()}}},
      {"pipeline",
       {{"target_total", target_total}, {"per_style_per_source", per_style_per_source}, {"order", order}}},
      {"run", {{"seed", master_seed}, {"output_dir", output_dir.string()}}},
  };
}

topics::TokenizerConfig RunConfig::tokenizer() const {
  topics::TokenizerConfig t;
  t.nl_stopwords = topics::load_stopwords(nl_stopwords_path);
  t.code_stopwords = topics::load_stopwords(code_stopwords_path);
  t.min_token_len = min_token_len;
  return t;
}

pipeline::PipelineConfig RunConfig::pipeline() const {
  pipeline::PipelineConfig p;
  p.target_total = target_total;
  p.seed = master_seed;
  p.thresholds = thresholds;
  p.diff.context_lines = context_lines;
  p.topic.hdp = hdp;
  p.topic.tokenizer = tokenizer();
  p.topic.min_doc_freq = min_doc_freq;
  return p;
}

}  // namespace oce::config
