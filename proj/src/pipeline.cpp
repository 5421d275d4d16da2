// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <thread>

#include "oce/digest.hpp"
#include "oce/error.hpp"

namespace oce::pipeline {

void FilterThresholds::validate() const {
  if (max_modified_lines < 1 || max_hunks < 1) {
    throw Error(Errc::kConfigError, "filter thresholds must be >= 1");
  }
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::kTooManyLines: return "too_many_lines";
    case RejectReason::kTooManyHunks: return "too_many_hunks";
    case RejectReason::kZeroHunks: return "zero_hunks";
  }
  return "?";
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, std::max<std::size_t>(1, n / 64));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
}

}  // namespace

DiffFilterResult diff_filter(std::span<const EditTriplet> triplets, const FilterThresholds& thresholds,
                             const diff::DiffConfig& diff_cfg) {
  thresholds.validate();
  std::vector<diff::DiffMetrics> metrics(triplets.size());
  parallel_for(triplets.size(), [&](std::size_t i) {
    metrics[i] = diff::diff_metrics(triplets[i].pre_edit, triplets[i].post_edit, diff_cfg);
  });

  DiffFilterResult out;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& m = metrics[i];
    std::optional<RejectReason> reason;
    if (m.hunks == 0 && thresholds.drop_zero_hunks) {
      reason = RejectReason::kZeroHunks;
    } else if (m.modified_lines > thresholds.max_modified_lines) {
      reason = RejectReason::kTooManyLines;
    } else if (m.hunks > thresholds.max_hunks) {
      reason = RejectReason::kTooManyHunks;
    }
    if (reason) {
      out.rejected.push_back({i, *reason, m});
    } else {
      out.kept.push_back(i);
    }
  }
  return out;
}

std::string topic_document(const EditTriplet& t) { return t.pre_edit + "\n" + t.instruction; }

TopicFilterResult balance_by_topic(std::span<const topics::TopicId> doc_topics, std::size_t target,
                                   Rng& rng) {
  TopicFilterResult out;
  out.doc_topics.assign(doc_topics.begin(), doc_topics.end());
  std::map<topics::TopicId, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < doc_topics.size(); ++i) groups[doc_topics[i]].push_back(i);
  for (const auto& [t, ids] : groups) out.topic_counts[t] = static_cast<std::int64_t>(ids.size());
  out.plan = topics::quota_allocate(out.topic_counts, static_cast<std::int64_t>(target));
  out.kept = topics::select_by_quota(groups, out.plan, rng);
  return out;
}

TopicFilterResult topic_filter(std::span<const EditTriplet> triplets, std::size_t target,
                               const TopicFilterConfig& cfg, Rng& rng) {
  if (!triplets.empty()) {
    const Style s = triplets.front().style;
    for (const auto& t : triplets) {
      if (t.style != s) throw Error(Errc::kInvalidArgument, "topic_filter expects a single style");
    }
  }
  if (triplets.size() <= target) {
    TopicFilterResult out;
    out.kept.resize(triplets.size());
    std::iota(out.kept.begin(), out.kept.end(), std::size_t{0});
    return out;
  }

  std::vector<std::vector<std::string>> docs;
  docs.reserve(triplets.size());
  for (const auto& t : triplets) docs.push_back(topics::tokenize(topic_document(t), cfg.tokenizer));
  topics::prune_vocabulary(docs, cfg.min_doc_freq);

  std::vector<topics::TopicId> doc_topics(triplets.size(), topics::kNoTopic);
  const bool any_tokens = std::any_of(docs.begin(), docs.end(), [](const auto& d) { return !d.empty(); });
  if (any_tokens) {
    const auto model = topics::fit_hdp(docs, cfg.hdp);
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (!docs[i].empty()) doc_topics[i] = topics::dominant_topic(model, i);
    }
  }
  return balance_by_topic(doc_topics, target, rng);
}

void PipelineConfig::validate() const {
  if (target_total < 0 || target_total % 2 != 0) {
    throw Error(Errc::kConfigError, "target_total must be a non-negative even number");
  }
  thresholds.validate();
  topic.hdp.validate();
}

std::map<Style, std::size_t> CuratedDataset::counts_by_style() const {
  std::map<Style, std::size_t> c{{Style::kLazy, 0}, {Style::kDescriptive, 0}};
  for (const auto& t : triplets) ++c[t.style];
  return c;
}

CuratedDataset dt_filter(std::span<const EditTriplet> mixed, const PipelineConfig& cfg) {
  cfg.validate();
  for (const auto& t : mixed) {
    if (t.flagged()) throw Error(Errc::kInvalidArgument, "dt_filter input must be flag-free");
  }
  CuratedDataset out;
  const auto diffed = diff_filter(mixed, cfg.thresholds, cfg.diff);
  for (const auto& r : diffed.rejected) ++out.rejections[r.reason];

  const auto target = static_cast<std::size_t>(cfg.per_style_target());
  for (Style style : {Style::kLazy, Style::kDescriptive}) {
    std::vector<std::size_t> idx;
    std::vector<EditTriplet> subset;
    for (std::size_t i : diffed.kept) {
      if (mixed[i].style == style) {
        idx.push_back(i);
        subset.push_back(mixed[i]);
      }
    }
    if (subset.size() < target) {
      out.warnings.push_back("StyleExhausted: " + std::string(to_string(style)) + " has " +
                             std::to_string(subset.size()) + " survivors, target " +
                             std::to_string(target));
    }
    const auto stream = static_cast<std::uint64_t>(style);
    TopicFilterConfig tcfg = cfg.topic;
    tcfg.hdp.seed = derive_seed(cfg.seed, 0x100 + stream);
    Rng rng(derive_seed(cfg.seed, 0x200 + stream));
    auto result = topic_filter(subset, target, tcfg, rng);
    for (std::size_t k : result.kept) {
      out.triplets.push_back(std::move(subset[k]));
      out.input_indices.push_back(idx[k]);
    }
    out.topic_results.emplace(style, std::move(result));
  }
  return out;
}

std::vector<EditTriplet> mix_sources(std::span<const SourceDataset> sources,
                                     std::size_t per_style_per_source, Rng& rng) {
  std::vector<EditTriplet> mixed;
  for (const auto& src : sources) {
    for (Style style : {Style::kLazy, Style::kDescriptive}) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < src.triplets.size(); ++i) {
        if (src.triplets[i].style == style) idx.push_back(i);
      }
      if (idx.size() < per_style_per_source) {
        throw Error(Errc::kSourceExhausted,
                    "source '" + src.source_id + "' has " + std::to_string(idx.size()) + " " +
                        std::string(to_string(style)) + " triplets, need " +
                        std::to_string(per_style_per_source));
      }
      for (std::size_t i = 0; i < per_style_per_source; ++i) {
        std::swap(idx[i], idx[i + rng.uniform_index(idx.size() - i)]);
      }
      idx.resize(per_style_per_source);
      std::sort(idx.begin(), idx.end());
      for (std::size_t i : idx) mixed.push_back(src.triplets[i]);
    }
  }
  return mixed;
}

CuratedDataset filter_then_mix(std::span<const SourceDataset> sources, const PipelineConfig& cfg) {
  cfg.validate();
  if (sources.empty()) throw Error(Errc::kInvalidArgument, "no sources");
  const auto n = static_cast<std::int64_t>(sources.size());
  if (cfg.target_total % (2 * n) != 0) {
    throw Error(Errc::kConfigError, "target_total must split evenly across sources and styles");
  }
  CuratedDataset out;
  std::size_t offset = 0;
  std::vector<std::pair<Style, std::pair<std::size_t, EditTriplet>>> merged;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    PipelineConfig sub = cfg;
    sub.target_total = cfg.target_total / n;
    sub.seed = derive_seed(cfg.seed, s);
    auto part = dt_filter(sources[s].triplets, sub);
    for (const auto& [r, c] : part.rejections) out.rejections[r] += c;
    for (auto& w : part.warnings) out.warnings.push_back(sources[s].source_id + ": " + w);
    for (std::size_t i = 0; i < part.triplets.size(); ++i) {
      merged.push_back({part.triplets[i].style, {offset + part.input_indices[i], std::move(part.triplets[i])}});
    }
    offset += sources[s].triplets.size();
  }
  std::stable_sort(merged.begin(), merged.end(), [](const auto& x, const auto& y) {
    return std::tie(x.first, x.second.first) < std::tie(y.first, y.second.first);
  });
  for (auto& [style, rec] : merged) {
    out.input_indices.push_back(rec.first);
    out.triplets.push_back(std::move(rec.second));
  }
  return out;
}

FinetunePair to_finetune_pair(const EditTriplet& t) {
  FinetunePair p;
  p.input_text.reserve(t.pre_edit.size() + t.instruction.size() + 64);
  p.input_text += kCodeBeforeHeader;
  p.input_text += t.pre_edit;
  p.input_text += kInstructionHeader;
  p.input_text += t.instruction;
  p.input_text += kCodeAfterHeader;
  p.output_text = t.post_edit + "\n";
  return p;
}

FinetuneFields parse_finetune_pair(const FinetunePair& pair) {
  std::string_view in = pair.input_text;
  if (!in.starts_with(kCodeBeforeHeader) || !in.ends_with(kCodeAfterHeader)) {
    throw Error(Errc::kParseError, "input_text is not in the training layout");
  }
  in.remove_prefix(kCodeBeforeHeader.size());
  in.remove_suffix(kCodeAfterHeader.size());
  // The instruction header is searched from the right: code may contain it,
  // a one-paragraph instruction normally does not.
  const auto pos = in.rfind(kInstructionHeader);
  if (pos == std::string_view::npos) throw Error(Errc::kParseError, "missing instruction header");
  std::string_view out = pair.output_text;
  if (!out.ends_with('\n')) throw Error(Errc::kParseError, "output_text must end with a newline");
  out.remove_suffix(1);
  return {std::string(in.substr(0, pos)), std::string(in.substr(pos + kInstructionHeader.size())),
          std::string(out)};
}

std::string_view to_string(ExportFormat f) {
  return f == ExportFormat::kTripletRecords ? "triplet_records" : "finetune_records";
}

ExportFormat export_format_from_string(std::string_view s) {
  if (s == "triplet_records" || s == "triplet") return ExportFormat::kTripletRecords;
  if (s == "finetune_records" || s == "finetune") return ExportFormat::kFinetuneRecords;
  throw Error(Errc::kConfigError, "unknown export format '" + std::string(s) + "'");
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json j = extra.is_object() ? extra : nlohmann::json::object();
  j["config"] = config;
  j["seed"] = seed;
  j["counts_by_style"] = counts_by_style;
  j["rejections_by_reason"] = rejections_by_reason;
  j["sha256"] = sha256;
  j["record_count"] = record_count;
  j["format"] = format;
  return j;
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << j.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  if (!out) throw Error(Errc::kIoError, "write failed: " + path.string());
}

Manifest export_dataset(std::span<const EditTriplet> triplets, const std::filesystem::path& path,
                        ExportFormat format, Manifest manifest,
                        std::optional<std::filesystem::path> manifest_path) {
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
    for (const auto& t : triplets) {
      if (format == ExportFormat::kTripletRecords) {
        out << dump_line(to_json(t)) << '\n';
      } else {
        const auto p = to_finetune_pair(t);
        out << dump_line({{"input_text", p.input_text}, {"output_text", p.output_text}}) << '\n';
      }
    }
    if (!out) throw Error(Errc::kIoError, "write failed: " + path.string());
  }
  manifest.counts_by_style = {{"lazy", 0}, {"descriptive", 0}};
  for (const auto& t : triplets) ++manifest.counts_by_style[std::string(to_string(t.style))];
  manifest.record_count = triplets.size();
  manifest.format = std::string(to_string(format));
  manifest.sha256 = sha256_file_hex(path);
  write_json_file(manifest_path.value_or(std::filesystem::path(path.string() + ".manifest.json")),
                  manifest.to_json());
  return manifest;
}

std::vector<EditTriplet> import_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kUnreadable, "cannot read " + path.string());
  std::vector<EditTriplet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(triplet_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kParseError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(Errc::kParseError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace oce::pipeline
