// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oce/diffeng.hpp"
#include "oce/rng.hpp"
#include "oce/topics.hpp"
#include "oce/triplet.hpp"

namespace oce::pipeline {

struct FilterThresholds {
  int max_modified_lines = 70;
  int max_hunks = 7;
  bool drop_zero_hunks = true;

  void validate() const;
};

enum class RejectReason { kTooManyLines, kTooManyHunks, kZeroHunks };

std::string_view to_string(RejectReason reason);

struct Rejection {
  std::size_t index = 0;
  RejectReason reason = RejectReason::kZeroHunks;
  diff::DiffMetrics metrics;
};

struct DiffFilterResult {
  std::vector<std::size_t> kept;  // input indices, ascending
  std::vector<Rejection> rejected;
};

/// Keeps a triplet iff 1 <= hunks <= max_hunks and modified_lines <=
/// max_modified_lines. A triplet failing several rules is reported once, with
/// zero_hunks checked first, then too_many_lines, then too_many_hunks.
DiffFilterResult diff_filter(std::span<const EditTriplet> triplets, const FilterThresholds& thresholds,
                             const diff::DiffConfig& diff_cfg = {});

struct TopicFilterConfig {
  topics::HdpConfig hdp;
  topics::TokenizerConfig tokenizer;
  int min_doc_freq = 2;  // vocabulary pruning; <= 1 disables it
};

struct TopicFilterResult {
  std::vector<std::size_t> kept;  // input indices, ascending
  std::map<topics::TopicId, std::int64_t> topic_counts;
  topics::QuotaPlan plan;
  std::vector<topics::TopicId> doc_topics;  // per input document; empty when fitting was skipped
};

/// Text the topic model sees for a triplet: pre-edit code, then instruction.
std::string topic_document(const EditTriplet& t);

/// Quota-balances documents whose dominant topics are already known.
TopicFilterResult balance_by_topic(std::span<const topics::TopicId> doc_topics, std::size_t target,
                                   Rng& rng);

/// Groups one style's triplets by dominant HDP topic and keeps
/// min(target, size) of them by quota allocation.
TopicFilterResult topic_filter(std::span<const EditTriplet> triplets, std::size_t target,
                               const TopicFilterConfig& cfg, Rng& rng);

struct PipelineConfig {
  std::int64_t target_total = 20000;
  std::uint64_t seed = 0;
  FilterThresholds thresholds;
  diff::DiffConfig diff;
  TopicFilterConfig topic;

  std::int64_t per_style_target() const { return target_total / 2; }
  void validate() const;
};

struct CuratedDataset {
  std::vector<EditTriplet> triplets;      // ordered by (style, input index)
  std::vector<std::size_t> input_indices;  // parallel to triplets
  std::map<RejectReason, std::size_t> rejections;
  std::vector<std::string> warnings;
  std::map<Style, TopicFilterResult> topic_results;

  std::map<Style, std::size_t> counts_by_style() const;
};

/// Diff filter on everything, then per-style topic filtering to
/// per_style_target, merged in (style, input index) order. HDP and sampling
/// seeds derive from cfg.seed; cfg.topic.hdp.seed is not used.
CuratedDataset dt_filter(std::span<const EditTriplet> mixed, const PipelineConfig& cfg);

struct SourceDataset {
  std::string source_id;
  std::vector<EditTriplet> triplets;
};

/// Samples per_style_per_source triplets of each style from every source,
/// without replacement, and concatenates them (source order, then lazy before
/// descriptive, then original order). Throws SourceExhausted.
std::vector<EditTriplet> mix_sources(std::span<const SourceDataset> sources,
                                     std::size_t per_style_per_source, Rng& rng);

/// Alternative ordering: each source is curated to target_total / sources on
/// its own, then the results are concatenated.
CuratedDataset filter_then_mix(std::span<const SourceDataset> sources, const PipelineConfig& cfg);

/// Training layout. Change it here only.
inline constexpr std::string_view kCodeBeforeHeader = "## Code Before:\n";
inline constexpr std::string_view kInstructionHeader = "\n## Instruction:\n";
inline constexpr std::string_view kCodeAfterHeader = "\n## Code After:\n";

struct FinetunePair {
  std::string input_text;
  std::string output_text;

  bool operator==(const FinetunePair&) const = default;
};

FinetunePair to_finetune_pair(const EditTriplet& t);

struct FinetuneFields {
  std::string pre_edit;
  std::string instruction;
  std::string post_edit;
};

/// Inverse of to_finetune_pair. Throws ParseError on text not in the layout.
FinetuneFields parse_finetune_pair(const FinetunePair& pair);

enum class ExportFormat { kTripletRecords, kFinetuneRecords };

std::string_view to_string(ExportFormat f);
ExportFormat export_format_from_string(std::string_view s);

struct Manifest {
  nlohmann::json config = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::map<std::string, std::size_t> counts_by_style;
  std::map<std::string, std::size_t> rejections_by_reason;
  std::string sha256;
  std::size_t record_count = 0;
  std::string format;
  nlohmann::json extra = nlohmann::json::object();  // command-specific fields

  nlohmann::json to_json() const;
};

/// Writes line-delimited records and a sidecar manifest (default
/// "<path>.manifest.json"). Fills in counts, format and sha256 of the file.
Manifest export_dataset(std::span<const EditTriplet> triplets, const std::filesystem::path& path,
                        ExportFormat format, Manifest manifest,
                        std::optional<std::filesystem::path> manifest_path = std::nullopt);

std::vector<EditTriplet> import_dataset(const std::filesystem::path& path);

/// Pretty-printed JSON followed by a newline.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace oce::pipeline
