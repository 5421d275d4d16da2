// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oce/error.hpp"

namespace oce::corpus {
namespace fs = std::filesystem;

void SnippetConfig::validate() const {
  if (min_lines < 1 || min_lines > max_lines) {
    throw Error(Errc::kConfigError, "snippet config requires 1 <= min_lines <= max_lines");
  }
}

std::string SeedSnippet::text() const {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.push_back('\n');
    out += lines[i];
  }
  return out;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  bool pending = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c == '\r' || c == '\n') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      lines.push_back(std::move(cur));
      cur.clear();
      pending = false;
    } else {
      cur.push_back(c);
      pending = true;
    }
  }
  if (pending) lines.push_back(std::move(cur));
  return lines;
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(Errc::kUnreadable, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<SourceFile> read_dir(const CorpusSpec& spec) {
  std::error_code ec;
  if (!fs::is_directory(spec.path, ec)) {
    throw Error(Errc::kUnreadable, "not a directory: " + spec.path.string());
  }
  std::vector<fs::path> paths;
  fs::recursive_directory_iterator it(spec.path, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error(Errc::kUnreadable, spec.path.string() + ": " + ec.message());
  for (const auto& entry : it) {
    if (entry.is_regular_file()) paths.push_back(entry.path());
  }
  // Directory iteration order is filesystem-dependent.
  std::sort(paths.begin(), paths.end());

  std::vector<SourceFile> files;
  files.reserve(paths.size());
  for (const auto& p : paths) {
    SourceFile f;
    f.source_id = fs::relative(p, spec.path).generic_string();
    f.path_or_key = p.string();
    f.lines = split_lines(read_file(p));
    f.language_tag = spec.language_tag;
    files.push_back(std::move(f));
  }
  return files;
}

std::vector<SourceFile> read_records(const CorpusSpec& spec) {
  std::ifstream in(spec.path, std::ios::binary);
  if (!in) throw Error(Errc::kUnreadable, "cannot read " + spec.path.string());
  std::vector<SourceFile> files;
  std::string line;
  std::size_t lineno = 0;
  const std::string stem = spec.path.filename().string();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(Errc::kUnreadable,
                  spec.path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    SourceFile f;
    f.source_id = stem + ":" + std::to_string(lineno);
    f.path_or_key = f.source_id;
    auto code = rec.find(spec.code_field);
    if (code != rec.end() && code->is_string()) {
      f.lines = split_lines(code->get_ref<const std::string&>());
    }
    f.language_tag = spec.language_tag;
    files.push_back(std::move(f));
  }
  return files;
}

}  // namespace

Corpus make_corpus(std::vector<SourceFile> files, const SnippetConfig& cfg) {
  cfg.validate();
  Corpus corpus;
  corpus.report.total = files.size();
  for (auto& f : files) {
    if (static_cast<int>(f.lines.size()) < cfg.min_lines) {
      corpus.report.excluded_ids.push_back(f.source_id);
    } else {
      corpus.files.push_back(std::move(f));
    }
  }
  corpus.report.eligible = corpus.files.size();
  corpus.report.excluded = corpus.report.excluded_ids.size();
  if (corpus.files.empty()) {
    throw Error(Errc::kZeroEligibleFiles,
                "no file has at least " + std::to_string(cfg.min_lines) + " lines");
  }
  return corpus;
}

Corpus load_corpus(const CorpusSpec& spec, const SnippetConfig& cfg) {
  auto files = spec.kind == CorpusKind::kDir ? read_dir(spec) : read_records(spec);
  return make_corpus(std::move(files), cfg);
}

SeedSnippet sample_snippet(const SourceFile& file, const SnippetConfig& cfg, Rng& rng) {
  cfg.validate();
  const auto n = static_cast<std::int64_t>(file.lines.size());
  if (n < cfg.min_lines) {
    throw Error(Errc::kFileTooShort, file.source_id + " has " + std::to_string(n) + " lines");
  }
  const std::int64_t len = rng.uniform_int(cfg.min_lines, std::min<std::int64_t>(cfg.max_lines, n));
  const std::int64_t start = rng.uniform_int(1, n - len + 1);
  SeedSnippet s;
  s.source_id = file.source_id;
  s.start_line = static_cast<int>(start);
  s.lines.assign(file.lines.begin() + (start - 1), file.lines.begin() + (start - 1 + len));
  return s;
}

SnippetPair sample_pair(const Corpus& corpus, const SnippetConfig& cfg, Rng& rng) {
  const std::size_t n = corpus.files.size();
  if (n < 2) throw Error(Errc::kInsufficientFiles, "need at least 2 eligible files");
  const std::size_t i = rng.uniform_index(n);
  std::size_t j = rng.uniform_index(n - 1);
  if (j >= i) ++j;
  SnippetPair pair;
  pair.first = sample_snippet(corpus.files[i], cfg, rng);
  pair.second = sample_snippet(corpus.files[j], cfg, rng);
  return pair;
}

std::string_view to_string(CorpusKind kind) { return kind == CorpusKind::kDir ? "dir" : "records"; }

CorpusKind corpus_kind_from_string(std::string_view s) {
  if (s == "dir") return CorpusKind::kDir;
  if (s == "records") return CorpusKind::kRecords;
  throw Error(Errc::kConfigError, "corpus.kind must be \"dir\" or \"records\"");
}

}  // namespace oce::corpus
