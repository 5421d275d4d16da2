// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "oce/diffeng.hpp"
#include "oce/topics.hpp"
#include "oce/triplet.hpp"

namespace oce::stats {

struct Histogram {
  std::vector<double> bin_edges;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  /// Category names for categorical histograms (one per bin); empty otherwise.
  std::vector<std::string> labels;
};

/// Bins [0, w), [w, 2w), ... covering [0, max(values)]. An empty input yields
/// a single empty bin.
Histogram make_histogram(std::span<const int> values, int bin_width);

struct ComplexityReport {
  Histogram modified_lines;
  Histogram hunks;
};

ComplexityReport complexity_report(std::span<const EditTriplet> dataset, const diff::DiffConfig& cfg = {},
                                   int line_bin_width = 5, int hunk_bin_width = 1);

/// Word count is the number of whitespace-separated tokens.
std::size_t word_count(std::string_view text);

Histogram instruction_length_hist(std::span<const EditTriplet> dataset, Style style, int bin_width = 5);

struct VerbEntry {
  std::string verb;
  std::size_t count = 0;
  std::vector<std::pair<std::string, std::size_t>> objects;
};

struct VerbObjectTable {
  std::vector<VerbEntry> entries;  // by count descending, then verb ascending
};

/// Rule-based approximation of verb/root-noun extraction: the verb is the
/// first token, the object the first later token not in `skip`. Tokens are
/// lowercased and stripped of non-alphanumeric characters.
VerbObjectTable verb_object_table(std::span<const EditTriplet> dataset,
                                  const std::unordered_set<std::string>& skip,
                                  std::size_t k_verbs = 20, std::size_t k_objects = 10);

/// Documents per dominant topic, sorted descending (ties by topic id).
/// Documents without tokens are counted under the label "none".
Histogram topic_report(std::span<const topics::TopicId> doc_topics);

/// Fraction of outcomes that are true. Throws EmptyOutcomes on empty input.
double pass_at_1(std::span<const bool> outcomes);

struct ReportSet {
  std::size_t records = 0;
  ComplexityReport complexity;
  Histogram topics;
  Histogram instr_len_lazy;
  Histogram instr_len_descriptive;
  VerbObjectTable verbs;
  nlohmann::json extra = nlohmann::json::object();
};

/// Builds every report for a dataset, fitting an HDP model over all records
/// for the topic histogram.
ReportSet build_reports(std::span<const EditTriplet> dataset, const topics::TokenizerConfig& tokenizer,
                        const topics::HdpConfig& hdp, int min_doc_freq = 2,
                        const diff::DiffConfig& diff_cfg = {});

/// Writes summary.json and one CSV table (with header) per histogram under dir.
void emit_report(const ReportSet& reports, const std::filesystem::path& dir);

}  // namespace oce::stats
