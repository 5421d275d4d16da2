// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

// Direct-assignment Gibbs sampler for the hierarchical Dirichlet process.
//
// Per token, with the token's own counts removed:
//   p(z = k)   ~ (n_dk + alpha0 * beta_k) * (n_kw + eta) / (n_k + V * eta)
//   p(z = new) ~ alpha0 * beta_u / V
// A new topic takes a Beta(1, gamma) share of the unassigned mass beta_u.
// After each sweep the table counts m_dk are drawn from their Antoniak
// distribution and beta ~ Dir(m_.1, ..., m_.K, gamma).

#include <algorithm>
#include <random>
#include <unordered_map>

#include "oce/error.hpp"
#include "oce/topics.hpp"

namespace oce::topics {

void HdpConfig::validate() const {
  if (!(gamma > 0) || !(alpha0 > 0) || !(eta > 0)) {
    throw Error(Errc::kConfigError, "hdp gamma, alpha0 and eta must be positive");
  }
  if (iterations < 1) throw Error(Errc::kConfigError, "hdp iterations must be >= 1");
  if (max_topics < 1) throw Error(Errc::kConfigError, "hdp max_topics must be >= 1");
}

namespace {

class Sampler {
 public:
  Sampler(const std::vector<std::vector<int>>& docs, int vocab_size, const HdpConfig& cfg)
      : docs_(docs),
        cfg_(cfg),
        vocab_(vocab_size),
        rng_(cfg.seed),
        slots_(static_cast<std::size_t>(cfg.max_topics)),
        nk_(slots_, 0),
        alive_(slots_, false),
        beta_(slots_, 0.0),
        nkw_(slots_),
        ndk_(docs.size() * slots_, 0),
        z_(docs.size()) {
    for (std::size_t d = 0; d < docs_.size(); ++d) z_[d].assign(docs_[d].size(), -1);
    probs_.reserve(slots_ + 1);
  }

  void run() {
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      for (std::size_t i = 0; i < docs_[d].size(); ++i) assign(d, i, sample_topic(d, docs_[d][i]));
    }
    resample_beta();
    for (int it = 0; it < cfg_.iterations; ++it) {
      for (std::size_t d = 0; d < docs_.size(); ++d) {
        for (std::size_t i = 0; i < docs_[d].size(); ++i) {
          unassign(d, i);
          assign(d, i, sample_topic(d, docs_[d][i]));
        }
      }
      resample_beta();
      if (cfg_.verify_counts) verify();
    }
  }

  TopicModel model(std::vector<std::string> vocabulary) const {
    std::vector<int> relabel(slots_, -1);
    TopicModel m;
    m.vocabulary = std::move(vocabulary);
    int next = 0;
    for (std::size_t k = 0; k < slots_; ++k) {
      if (!alive_[k]) continue;
      relabel[k] = next;
      m.active_topics.insert(next++);
      m.topic_word_counts.push_back(nkw_[k]);
      m.topic_totals.push_back(nk_[k]);
    }
    m.doc_words = docs_;
    m.doc_assignments.resize(docs_.size());
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      for (int k : z_[d]) m.doc_assignments[d].push_back(relabel[static_cast<std::size_t>(k)]);
    }
    return m;
  }

 private:
  int& ndk(std::size_t d, std::size_t k) { return ndk_[d * slots_ + k]; }
  int ndk(std::size_t d, std::size_t k) const { return ndk_[d * slots_ + k]; }

  int sample_topic(std::size_t d, int w) {
    const double veta = vocab_ * cfg_.eta;
    probs_.clear();
    cand_.clear();
    double sum = 0;
    for (std::size_t k = 0; k < slots_; ++k) {
      if (!alive_[k]) continue;
      const double p = (ndk(d, k) + cfg_.alpha0 * beta_[k]) * (nkw_[k][static_cast<std::size_t>(w)] + cfg_.eta) /
                       (nk_[k] + veta);
      sum += p;
      probs_.push_back(sum);
      cand_.push_back(static_cast<int>(k));
    }
    const bool can_spawn = num_alive_ < slots_;
    if (can_spawn) {
      sum += cfg_.alpha0 * beta_u_ / vocab_;
      probs_.push_back(sum);
      cand_.push_back(-1);
    }
    const double u = uniform_(rng_) * sum;
    const auto pos = std::upper_bound(probs_.begin(), probs_.end(), u) - probs_.begin();
    const int pick = cand_[std::min<std::size_t>(static_cast<std::size_t>(pos), cand_.size() - 1)];
    return pick >= 0 ? pick : spawn();
  }

  int spawn() {
    std::size_t k = 0;
    while (alive_[k]) ++k;
    alive_[k] = true;
    ++num_alive_;
    nkw_[k].assign(static_cast<std::size_t>(vocab_), 0);
    nk_[k] = 0;
    const double x = std::gamma_distribution<double>(1.0, 1.0)(rng_);
    const double y = std::gamma_distribution<double>(cfg_.gamma, 1.0)(rng_);
    const double share = x + y > 0 ? x / (x + y) : 0.5;
    beta_[k] = share * beta_u_;
    beta_u_ *= 1.0 - share;
    return static_cast<int>(k);
  }

  void assign(std::size_t d, std::size_t i, int k) {
    const auto ks = static_cast<std::size_t>(k);
    z_[d][i] = k;
    ++ndk(d, ks);
    ++nkw_[ks][static_cast<std::size_t>(docs_[d][i])];
    ++nk_[ks];
  }

  void unassign(std::size_t d, std::size_t i) {
    const auto ks = static_cast<std::size_t>(z_[d][i]);
    --ndk(d, ks);
    --nkw_[ks][static_cast<std::size_t>(docs_[d][i])];
    if (--nk_[ks] == 0) {
      alive_[ks] = false;
      --num_alive_;
      beta_u_ += beta_[ks];
      beta_[ks] = 0;
      nkw_[ks].clear();
    }
    z_[d][i] = -1;
  }

  void resample_beta() {
    std::vector<double> tables(slots_, 0.0);
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      for (std::size_t k = 0; k < slots_; ++k) {
        const int n = ndk(d, k);
        if (n == 0) continue;
        const double ab = cfg_.alpha0 * beta_[k];
        int m = 0;
        for (int j = 0; j < n; ++j) {
          if (uniform_(rng_) * (ab + j) < ab) ++m;
        }
        tables[k] += std::max(m, 1);
      }
    }
    double total = 0;
    for (std::size_t k = 0; k < slots_; ++k) {
      if (!alive_[k]) continue;
      beta_[k] = std::gamma_distribution<double>(tables[k], 1.0)(rng_);
      total += beta_[k];
    }
    beta_u_ = std::gamma_distribution<double>(cfg_.gamma, 1.0)(rng_);
    total += beta_u_;
    for (std::size_t k = 0; k < slots_; ++k) beta_[k] /= total;
    beta_u_ /= total;
  }

  void verify() const {
    std::vector<int> nk(slots_, 0);
    std::vector<std::unordered_map<int, int>> nkw(slots_);
    for (std::size_t d = 0; d < docs_.size(); ++d) {
      std::vector<int> local(slots_, 0);
      for (std::size_t i = 0; i < docs_[d].size(); ++i) {
        const auto k = static_cast<std::size_t>(z_[d][i]);
        if (!alive_[k]) throw Error(Errc::kInvalidArgument, "hdp: token assigned to dead topic");
        ++local[k];
        ++nk[k];
        ++nkw[k][docs_[d][i]];
      }
      for (std::size_t k = 0; k < slots_; ++k) {
        if (local[k] != ndk(d, k)) throw Error(Errc::kInvalidArgument, "hdp: doc-topic count drift");
      }
    }
    for (std::size_t k = 0; k < slots_; ++k) {
      if (nk[k] != nk_[k]) throw Error(Errc::kInvalidArgument, "hdp: topic total drift");
      if (!alive_[k]) continue;
      for (std::size_t w = 0; w < nkw_[k].size(); ++w) {
        auto it = nkw[k].find(static_cast<int>(w));
        if ((it == nkw[k].end() ? 0 : it->second) != nkw_[k][w]) {
          throw Error(Errc::kInvalidArgument, "hdp: topic-word count drift");
        }
      }
    }
  }

  const std::vector<std::vector<int>>& docs_;
  const HdpConfig& cfg_;
  const int vocab_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};

  std::size_t slots_;
  std::size_t num_alive_ = 0;
  std::vector<int> nk_;
  std::vector<bool> alive_;
  std::vector<double> beta_;
  double beta_u_ = 1.0;
  std::vector<std::vector<int>> nkw_;
  std::vector<int> ndk_;
  std::vector<std::vector<int>> z_;

  std::vector<double> probs_;
  std::vector<int> cand_;
};

}  // namespace

TopicModel fit_hdp(const std::vector<std::vector<std::string>>& docs, const HdpConfig& cfg) {
  cfg.validate();
  std::unordered_map<std::string, int> ids;
  std::vector<std::string> vocabulary;
  std::vector<std::vector<int>> word_docs;
  word_docs.reserve(docs.size());
  bool any = false;
  for (const auto& doc : docs) {
    std::vector<int> wd;
    wd.reserve(doc.size());
    for (const auto& tok : doc) {
      auto [it, inserted] = ids.emplace(tok, static_cast<int>(vocabulary.size()));
      if (inserted) vocabulary.push_back(tok);
      wd.push_back(it->second);
    }
    any = any || !wd.empty();
    word_docs.push_back(std::move(wd));
  }
  if (!any) throw Error(Errc::kAllDocumentsEmpty, "no document has tokens");

  Sampler sampler(word_docs, static_cast<int>(vocabulary.size()), cfg);
  sampler.run();
  return sampler.model(std::move(vocabulary));
}

void verify_model(const TopicModel& model) {
  const std::size_t k_count = model.topic_word_counts.size();
  std::vector<std::vector<int>> nkw(k_count, std::vector<int>(model.vocabulary.size(), 0));
  std::vector<int> nk(k_count, 0);
  for (std::size_t d = 0; d < model.num_docs(); ++d) {
    const auto& z = model.doc_assignments[d];
    if (z.size() != model.doc_words[d].size()) {
      throw Error(Errc::kInvalidArgument, "assignment/word length mismatch");
    }
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!model.active_topics.contains(z[i])) {
        throw Error(Errc::kInvalidArgument, "label outside active topics");
      }
      ++nkw[static_cast<std::size_t>(z[i])][static_cast<std::size_t>(model.doc_words[d][i])];
      ++nk[static_cast<std::size_t>(z[i])];
    }
  }
  if (nkw != model.topic_word_counts || nk != model.topic_totals) {
    throw Error(Errc::kInvalidArgument, "count tables disagree with assignments");
  }
}

}  // namespace oce::topics
