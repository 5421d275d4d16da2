// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/topics.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "oce/error.hpp"

namespace oce::topics {

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kUnreadable, "cannot read stopwords " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    auto e = line.find_last_not_of(" \t\r");
    std::string w = line.substr(b, e - b + 1);
    for (auto& c : w) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    words.insert(std::move(w));
  }
  return words;
}

TokenizerConfig default_tokenizer_config(const std::filesystem::path& asset_dir) {
  TokenizerConfig cfg;
  cfg.nl_stopwords = load_stopwords(asset_dir / "nl_stopwords.txt");
  cfg.code_stopwords = load_stopwords(asset_dir / "code_stopwords.txt");
  return cfg;
}

std::vector<std::string> tokenize(std::string_view doc, const TokenizerConfig& cfg) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    const bool numeric = std::all_of(cur.begin(), cur.end(),
                                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (static_cast<int>(cur.size()) >= cfg.min_token_len && !(cfg.drop_numeric && numeric) &&
        !cfg.nl_stopwords.contains(cur) && !cfg.code_stopwords.contains(cur)) {
      tokens.push_back(cur);
    }
    cur.clear();
  };
  for (char ch : doc) {
    const auto c = static_cast<unsigned char>(ch);
    if (c < 0x80 && std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

void prune_vocabulary(std::vector<std::vector<std::string>>& docs, int min_doc_freq) {
  if (min_doc_freq <= 1) return;
  std::unordered_map<std::string, int> df;
  for (const auto& d : docs) {
    std::unordered_set<std::string_view> seen(d.begin(), d.end());
    for (auto w : seen) ++df[std::string(w)];
  }
  for (auto& d : docs) {
    std::erase_if(d, [&](const std::string& w) { return df[w] < min_doc_freq; });
  }
}

TopicId dominant_topic(const TopicModel& model, std::size_t doc_index) {
  if (doc_index >= model.num_docs()) {
    throw Error(Errc::kInvalidArgument, "doc index out of range");
  }
  const auto& labels = model.doc_assignments[doc_index];
  if (labels.empty()) throw Error(Errc::kEmptyDocument, "document " + std::to_string(doc_index));
  std::map<TopicId, int> counts;
  for (TopicId t : labels) ++counts[t];
  TopicId best = counts.begin()->first;
  int best_count = 0;
  for (const auto& [t, c] : counts) {  // ascending id, strict > keeps the lowest on ties
    if (c > best_count) {
      best = t;
      best_count = c;
    }
  }
  return best;
}

std::int64_t QuotaPlan::total() const {
  std::int64_t s = 0;
  for (const auto& [t, k] : kept) s += k;
  return s;
}

QuotaPlan quota_allocate(const std::map<TopicId, std::int64_t>& counts, std::int64_t target) {
  if (target < 0) throw Error(Errc::kInvalidArgument, "target must be >= 0");
  std::int64_t total = 0;
  for (const auto& [t, c] : counts) {
    if (c < 0) throw Error(Errc::kInvalidArgument, "counts must be non-negative");
    total += c;
  }
  QuotaPlan plan;
  if (target >= total) {
    plan.kept = counts;
    return plan;
  }

  std::int64_t remaining = target;
  std::vector<TopicId> unlocked;
  for (const auto& [t, c] : counts) unlocked.push_back(t);

  // Lock rounds: compare counts[t] <= remaining / |unlocked| exactly, as
  // counts[t] * |unlocked| <= remaining.
  while (!unlocked.empty()) {
    const auto n = static_cast<std::int64_t>(unlocked.size());
    std::vector<TopicId> still;
    std::int64_t locked_sum = 0;
    for (TopicId t : unlocked) {
      const std::int64_t c = counts.at(t);
      if (c * n <= remaining) {
        plan.kept[t] = c;
        locked_sum += c;
      } else {
        still.push_back(t);
      }
    }
    if (still.size() == unlocked.size()) break;
    remaining -= locked_sum;
    unlocked = std::move(still);
  }

  if (!unlocked.empty()) {
    const auto n = static_cast<std::int64_t>(unlocked.size());
    const std::int64_t base = remaining / n;
    std::int64_t extra = remaining % n;
    std::vector<TopicId> order = unlocked;
    std::stable_sort(order.begin(), order.end(), [&](TopicId x, TopicId y) {
      return counts.at(x) > counts.at(y);  // unlocked is ascending by id, so ties keep lowest id first
    });
    for (TopicId t : order) {
      plan.kept[t] = base + (extra > 0 ? 1 : 0);
      if (extra > 0) --extra;
    }
  }
  return plan;
}

std::vector<std::size_t> select_by_quota(const std::map<TopicId, std::vector<std::size_t>>& groups,
                                         const QuotaPlan& plan, Rng& rng) {
  for (const auto& [t, k] : plan.kept) {
    auto it = groups.find(t);
    const std::size_t available = it == groups.end() ? 0 : it->second.size();
    if (k < 0 || static_cast<std::size_t>(k) > available) {
      throw Error(Errc::kPlanMismatch, "topic " + std::to_string(t) + " keeps " + std::to_string(k) +
                                           " of " + std::to_string(available));
    }
  }
  std::vector<std::size_t> kept;
  for (const auto& [t, ids] : groups) {
    auto it = plan.kept.find(t);
    const std::size_t k = it == plan.kept.end() ? 0 : static_cast<std::size_t>(it->second);
    if (k == 0) continue;
    std::vector<std::size_t> pool = ids;
    // Partial Fisher-Yates: the first k slots become the sample.
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + rng.uniform_index(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    kept.insert(kept.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace oce::topics
