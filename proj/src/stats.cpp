// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/stats.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>

#include "oce/error.hpp"
#include "oce/pipeline.hpp"

namespace oce::stats {

Histogram make_histogram(std::span<const int> values, int bin_width) {
  if (bin_width < 1) throw Error(Errc::kInvalidArgument, "bin width must be >= 1");
  int max_value = 0;
  for (int v : values) {
    if (v < 0) throw Error(Errc::kInvalidArgument, "histogram values must be non-negative");
    max_value = std::max(max_value, v);
  }
  const std::size_t bins = static_cast<std::size_t>(max_value / bin_width) + 1;
  Histogram h;
  h.counts.assign(bins, 0);
  for (std::size_t i = 0; i <= bins; ++i) h.bin_edges.push_back(static_cast<double>(i) * bin_width);
  for (int v : values) ++h.counts[static_cast<std::size_t>(v / bin_width)];
  h.total = values.size();
  return h;
}

ComplexityReport complexity_report(std::span<const EditTriplet> dataset, const diff::DiffConfig& cfg,
                                   int line_bin_width, int hunk_bin_width) {
  std::vector<int> lines, hunks;
  lines.reserve(dataset.size());
  hunks.reserve(dataset.size());
  for (const auto& t : dataset) {
    const auto m = diff::diff_metrics(t.pre_edit, t.post_edit, cfg);
    lines.push_back(m.modified_lines);
    hunks.push_back(m.hunks);
  }
  return {make_histogram(lines, line_bin_width), make_histogram(hunks, hunk_bin_width)};
}

std::size_t word_count(std::string_view text) {
  std::size_t n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

Histogram instruction_length_hist(std::span<const EditTriplet> dataset, Style style, int bin_width) {
  std::vector<int> lengths;
  for (const auto& t : dataset) {
    if (t.style == style) lengths.push_back(static_cast<int>(word_count(t.instruction)));
  }
  return make_histogram(lengths, bin_width);
}

namespace {

std::string normalize_token(std::string_view raw) {
  std::string out;
  for (char c : raw) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isalnum(u)) out.push_back(static_cast<char>(std::tolower(u)));
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t b = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > b) out.push_back(text.substr(b, i - b));
  }
  return out;
}

template <typename Map>
std::vector<std::pair<std::string, std::size_t>> ranked(const Map& counts, std::size_t k) {
  std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
  std::sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  if (v.size() > k) v.resize(k);
  return v;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_histogram_csv(const std::filesystem::path& path, const Histogram& h) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << "bin_start,bin_end,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << format_number(h.bin_edges[i]) << ',' << format_number(h.bin_edges[i + 1]) << ','
        << h.counts[i] << '\n';
  }
}

nlohmann::json histogram_json(const Histogram& h) {
  nlohmann::json j = {{"bin_edges", h.bin_edges}, {"counts", h.counts}, {"total", h.total}};
  if (!h.labels.empty()) j["labels"] = h.labels;
  return j;
}

}  // namespace

VerbObjectTable verb_object_table(std::span<const EditTriplet> dataset,
                                  const std::unordered_set<std::string>& skip, std::size_t k_verbs,
                                  std::size_t k_objects) {
  std::map<std::string, std::size_t> verb_counts;
  std::map<std::string, std::map<std::string, std::size_t>> object_counts;
  for (const auto& t : dataset) {
    const auto words = split_ws(t.instruction);
    if (words.empty()) continue;
    const std::string verb = normalize_token(words.front());
    if (verb.empty()) continue;
    ++verb_counts[verb];
    for (std::size_t i = 1; i < words.size(); ++i) {
      std::string obj = normalize_token(words[i]);
      if (obj.empty() || skip.contains(obj)) continue;
      ++object_counts[verb][obj];
      break;
    }
  }
  VerbObjectTable table;
  for (auto& [verb, count] : ranked(verb_counts, k_verbs)) {
    VerbEntry e{verb, count, {}};
    if (auto it = object_counts.find(verb); it != object_counts.end()) {
      e.objects = ranked(it->second, k_objects);
    }
    table.entries.push_back(std::move(e));
  }
  return table;
}

Histogram topic_report(std::span<const topics::TopicId> doc_topics) {
  std::map<topics::TopicId, std::size_t> counts;
  for (auto t : doc_topics) ++counts[t];
  std::vector<std::pair<topics::TopicId, std::size_t>> v(counts.begin(), counts.end());
  // Count descending, then topic id; the no-topic bucket goes after real topics.
  std::stable_sort(v.begin(), v.end(), [](const auto& x, const auto& y) {
    if (x.second != y.second) return x.second > y.second;
    return (x.first == topics::kNoTopic) < (y.first == topics::kNoTopic);
  });
  Histogram h;
  h.bin_edges.push_back(0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    h.bin_edges.push_back(static_cast<double>(i + 1));
    h.counts.push_back(v[i].second);
    h.labels.push_back(v[i].first == topics::kNoTopic ? "none" : std::to_string(v[i].first));
  }
  h.total = doc_topics.size();
  return h;
}

double pass_at_1(std::span<const bool> outcomes) {
  if (outcomes.empty()) throw Error(Errc::kEmptyOutcomes, "pass@1 needs at least one outcome");
  const auto passed = static_cast<double>(std::count(outcomes.begin(), outcomes.end(), true));
  return passed / static_cast<double>(outcomes.size());
}

ReportSet build_reports(std::span<const EditTriplet> dataset, const topics::TokenizerConfig& tokenizer,
                        const topics::HdpConfig& hdp, int min_doc_freq, const diff::DiffConfig& diff_cfg) {
  ReportSet r;
  r.records = dataset.size();
  r.complexity = complexity_report(dataset, diff_cfg);
  r.instr_len_lazy = instruction_length_hist(dataset, Style::kLazy);
  r.instr_len_descriptive = instruction_length_hist(dataset, Style::kDescriptive);
  std::unordered_set<std::string> skip = tokenizer.nl_stopwords;
  r.verbs = verb_object_table(dataset, skip);

  std::vector<std::vector<std::string>> docs;
  docs.reserve(dataset.size());
  for (const auto& t : dataset) docs.push_back(topics::tokenize(pipeline::topic_document(t), tokenizer));
  topics::prune_vocabulary(docs, min_doc_freq);
  std::vector<topics::TopicId> doc_topics(dataset.size(), topics::kNoTopic);
  if (std::any_of(docs.begin(), docs.end(), [](const auto& d) { return !d.empty(); })) {
    const auto model = topics::fit_hdp(docs, hdp);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (!docs[i].empty()) doc_topics[i] = topics::dominant_topic(model, i);
    }
  }
  r.topics = topic_report(doc_topics);
  return r;
}

void emit_report(const ReportSet& reports, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::kIoError, "cannot create " + dir.string() + ": " + ec.message());

  write_histogram_csv(dir / "modified_lines.csv", reports.complexity.modified_lines);
  write_histogram_csv(dir / "hunks.csv", reports.complexity.hunks);
  write_histogram_csv(dir / "instr_len_lazy.csv", reports.instr_len_lazy);
  write_histogram_csv(dir / "instr_len_descriptive.csv", reports.instr_len_descriptive);
  {
    std::ofstream out(dir / "topics.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::kIoError, "cannot write topics.csv");
    out << "rank,topic,count\n";
    for (std::size_t i = 0; i < reports.topics.counts.size(); ++i) {
      out << i + 1 << ',' << reports.topics.labels[i] << ',' << reports.topics.counts[i] << '\n';
    }
  }
  {
    std::ofstream out(dir / "verb_object.csv", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::kIoError, "cannot write verb_object.csv");
    out << "verb,verb_count,object,object_count\n";
    for (const auto& e : reports.verbs.entries) {
      if (e.objects.empty()) out << e.verb << ',' << e.count << ",,0\n";
      for (const auto& [obj, n] : e.objects) out << e.verb << ',' << e.count << ',' << obj << ',' << n << '\n';
    }
  }

  nlohmann::json verbs = nlohmann::json::array();
  for (const auto& e : reports.verbs.entries) {
    nlohmann::json objs = nlohmann::json::array();
    for (const auto& [o, n] : e.objects) objs.push_back({{"object", o}, {"count", n}});
    verbs.push_back({{"verb", e.verb}, {"count", e.count}, {"objects", std::move(objs)}});
  }
  nlohmann::json summary = reports.extra.is_object() ? reports.extra : nlohmann::json::object();
  summary["records"] = reports.records;
  summary["modified_lines"] = histogram_json(reports.complexity.modified_lines);
  summary["hunks"] = histogram_json(reports.complexity.hunks);
  summary["topics"] = histogram_json(reports.topics);
  summary["instr_len_lazy"] = histogram_json(reports.instr_len_lazy);
  summary["instr_len_descriptive"] = histogram_json(reports.instr_len_descriptive);
  summary["verb_object"] = std::move(verbs);
  pipeline::write_json_file(dir / "summary.json", summary);
}

}  // namespace oce::stats
