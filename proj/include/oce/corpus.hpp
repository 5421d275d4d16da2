// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oce/rng.hpp"

namespace oce::corpus {

struct SourceFile {
  std::string source_id;
  std::string path_or_key;
  std::vector<std::string> lines;  // LF-normalized, no terminators
  std::string language_tag;
};

struct SnippetConfig {
  int min_lines = 5;
  int max_lines = 15;

  void validate() const;
};

struct SeedSnippet {
  std::string source_id;
  int start_line = 1;  // 1-based
  std::vector<std::string> lines;

  std::string text() const;  // lines joined with LF
};

struct SnippetPair {
  SeedSnippet first;
  SeedSnippet second;
};

enum class CorpusKind { kDir, kRecords };

/// Where the seed code comes from: a directory tree, or a JSONL file with one
/// code string per record.
struct CorpusSpec {
  CorpusKind kind = CorpusKind::kDir;
  std::filesystem::path path;
  std::string code_field = "code";
  std::string language_tag = "python";
};

struct IngestionReport {
  std::size_t total = 0;
  std::size_t eligible = 0;
  std::size_t excluded = 0;
  std::vector<std::string> excluded_ids;
};

/// Immutable after load; safe for concurrent readers.
struct Corpus {
  std::vector<SourceFile> files;  // eligible files only
  IngestionReport report;
};

/// Splits text into lines, normalizing CRLF and lone CR to LF. A trailing
/// terminator does not produce an empty final line.
std::vector<std::string> split_lines(std::string_view text);

Corpus load_corpus(const CorpusSpec& spec, const SnippetConfig& cfg = {});

/// Builds a corpus from in-memory files, applying the same eligibility rule.
Corpus make_corpus(std::vector<SourceFile> files, const SnippetConfig& cfg = {});

SeedSnippet sample_snippet(const SourceFile& file, const SnippetConfig& cfg, Rng& rng);

SnippetPair sample_pair(const Corpus& corpus, const SnippetConfig& cfg, Rng& rng);

std::string_view to_string(CorpusKind kind);
CorpusKind corpus_kind_from_string(std::string_view s);

}  // namespace oce::corpus
