// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "oce/rng.hpp"

namespace oce::topics {

using TopicId = int;
/// Group id for documents that have no tokens left after tokenization.
inline constexpr TopicId kNoTopic = -1;

struct TokenizerConfig {
  std::unordered_set<std::string> nl_stopwords;
  std::unordered_set<std::string> code_stopwords;  // reserved words across languages
  int min_token_len = 2;
  bool drop_numeric = true;
};

/// One token per line; blank lines and lines starting with '#' are skipped.
/// Tokens are lowercased on load.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

/// Loads assets/nl_stopwords.txt and assets/code_stopwords.txt from a directory.
TokenizerConfig default_tokenizer_config(const std::filesystem::path& asset_dir);

/// Lowercases, splits on every non-alphanumeric ASCII character, and drops
/// short tokens, pure numbers and stopwords.
std::vector<std::string> tokenize(std::string_view doc, const TokenizerConfig& cfg);

/// Drops tokens that occur in fewer than min_doc_freq documents. No-op when
/// min_doc_freq <= 1.
void prune_vocabulary(std::vector<std::vector<std::string>>& docs, int min_doc_freq);

struct HdpConfig {
  double gamma = 1.0;   // top-level concentration
  double alpha0 = 1.0;  // document-level concentration
  double eta = 0.5;     // topic-word smoothing
  int max_topics = 150;
  int iterations = 200;
  std::uint64_t seed = 0;
  /// Recount the tables from the assignments after every sweep and throw on
  /// mismatch. Slow; meant for tests.
  bool verify_counts = false;

  void validate() const;
};

struct TopicModel {
  std::vector<std::string> vocabulary;
  /// topic_word_counts[t][w] for topic id t (dense, ids 0..K-1).
  std::vector<std::vector<int>> topic_word_counts;
  std::vector<int> topic_totals;
  /// Per document, per token (in document order) topic labels.
  std::vector<std::vector<TopicId>> doc_assignments;
  /// Per document, word ids aligned with doc_assignments.
  std::vector<std::vector<int>> doc_words;
  std::set<TopicId> active_topics;

  std::size_t num_docs() const { return doc_assignments.size(); }
};

/// Collapsed Gibbs sampling for the HDP using the direct-assignment scheme of
/// the Chinese restaurant franchise. Deterministic given cfg.seed.
TopicModel fit_hdp(const std::vector<std::vector<std::string>>& docs, const HdpConfig& cfg);

/// Throws if the count tables disagree with the assignments.
void verify_model(const TopicModel& model);

/// Topic with the most token assignments in the document; lowest id on ties.
TopicId dominant_topic(const TopicModel& model, std::size_t doc_index);

struct QuotaPlan {
  std::map<TopicId, std::int64_t> kept;

  std::int64_t total() const;
};

/// Iterative lock-and-redistribute allocation. Each round, topics whose count
/// is at most remaining/unlocked are kept whole and locked; once a round locks
/// nothing, the remainder is split evenly with the leftover units going to the
/// largest unlocked topics (lowest id on ties).
QuotaPlan quota_allocate(const std::map<TopicId, std::int64_t>& counts, std::int64_t target);

/// Uniform sampling without replacement of plan.kept[t] ids from each group.
/// Returns kept ids in ascending order.
std::vector<std::size_t> select_by_quota(const std::map<TopicId, std::vector<std::size_t>>& groups,
                                         const QuotaPlan& plan, Rng& rng);

}  // namespace oce::topics
