// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <array>
#include <bit>
#include <numeric>

#include "oce/config.hpp"
#include "oce/diffeng.hpp"
#include "oce/error.hpp"
#include "oce/stats.hpp"
#include "test_support.hpp"

using namespace oce::stats;
using oce::Style;

namespace {

std::size_t sum(const Histogram& h) { return std::accumulate(h.counts.begin(), h.counts.end(), std::size_t{0}); }

std::vector<oce::EditTriplet> with_instructions(std::initializer_list<const char*> xs) {
  std::vector<oce::EditTriplet> out;
  for (const char* x : xs) out.push_back(support::triplet("a\n", "b\n", Style::kLazy, x));
  return out;
}

const std::unordered_set<std::string>& skip() {
  static const auto s = oce::config::RunConfig().tokenizer().nl_stopwords;
  return s;
}

// Reads "a,b,c\n" rows after the header.
std::vector<std::vector<std::string>> csv_rows(const std::filesystem::path& p) {
  std::istringstream in(support::read_text(p));
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("histogram binning") {
  const std::vector<int> v{0, 4, 5, 9, 10, 23};
  const auto h = make_histogram(v, 5);
  CHECK(h.counts == std::vector<std::size_t>{2, 2, 1, 0, 1});
  CHECK(h.bin_edges == std::vector<double>{0, 5, 10, 15, 20, 25});
  CHECK(h.total == 6);
  const auto empty = make_histogram(std::vector<int>{}, 5);
  CHECK(empty.total == 0);
  CHECK(sum(empty) == 0);
  CHECK_THROWS_AS(make_histogram(v, 0), oce::Error);
}

TEST_CASE("complexity report matches a direct tally") {
  oce::Rng rng(4);
  std::vector<oce::EditTriplet> ds;
  std::map<int, std::size_t> line_tally, hunk_tally;
  for (int i = 0; i < 300; ++i) {
    const auto n = static_cast<int>(rng.uniform_int(1, 40));
    auto pre = oce::corpus::split_lines(support::numbered_lines(n));
    auto post = pre;
    for (auto& l : post) {
      if (rng.uniform01() < 0.3) l += "*";
    }
    std::string a, b;
    for (std::size_t k = 0; k < pre.size(); ++k) {
      a += pre[k] + "\n";
      b += post[k] + "\n";
    }
    const auto m = oce::diff::diff_metrics(a, b);
    ++line_tally[m.modified_lines / 5];
    ++hunk_tally[m.hunks];
    ds.push_back(support::triplet(a, b));
  }
  const auto r = complexity_report(ds);
  CHECK(r.modified_lines.total == 300);
  CHECK(r.hunks.total == 300);
  CHECK(sum(r.modified_lines) == 300);
  CHECK(sum(r.hunks) == 300);
  for (std::size_t bin = 0; bin < r.modified_lines.counts.size(); ++bin) {
    CHECK(r.modified_lines.counts[bin] == line_tally[static_cast<int>(bin)]);
  }
  for (std::size_t bin = 0; bin < r.hunks.counts.size(); ++bin) {
    CHECK(r.hunks.counts[bin] == hunk_tally[static_cast<int>(bin)]);
  }
}

TEST_CASE("complexity of a single small edit") {
  const auto r = complexity_report(std::vector{support::triplet("a\nb\nc\n", "a\nB\nC\nD\n")});
  CHECK(r.modified_lines.counts.front() == 1);
  CHECK(r.hunks.counts == std::vector<std::size_t>{0, 1});
  CHECK(complexity_report({}).modified_lines.total == 0);
}

TEST_CASE("instruction lengths") {
  CHECK(word_count("add logging") == 2);
  CHECK(word_count("  spaced\tout\nwords  ") == 3);
  CHECK(word_count("") == 0);
  auto ds = with_instructions({"add logging", "add logging", "add logging"});
  ds.push_back(support::triplet("a\n", "b\n", Style::kDescriptive, "one two three four five six seven"));
  const auto lazy = instruction_length_hist(ds, Style::kLazy);
  CHECK(lazy.total == 3);
  CHECK(std::count_if(lazy.counts.begin(), lazy.counts.end(), [](auto c) { return c > 0; }) == 1);
  const auto desc = instruction_length_hist(ds, Style::kDescriptive);
  CHECK(desc.total == 1);
  CHECK(desc.counts == std::vector<std::size_t>{0, 1});
}

TEST_CASE("verb and object extraction") {
  const auto t = verb_object_table(with_instructions({"Fix the quote mismatch",
                                                      "Add a render method to the renderer class",
                                                      "add, logging!", "Refactor"}),
                                   skip());
  REQUIRE(t.entries.size() == 3);
  CHECK(t.entries[0].verb == "add");
  CHECK(t.entries[0].count == 2);
  CHECK(t.entries[0].objects == std::vector<std::pair<std::string, std::size_t>>{{"logging", 1}, {"render", 1}});
  CHECK(t.entries[1].verb == "fix");
  CHECK(t.entries[1].objects == std::vector<std::pair<std::string, std::size_t>>{{"quote", 1}});
  CHECK(t.entries[2].verb == "refactor");
  CHECK(t.entries[2].objects.empty());
}

TEST_CASE("a single verb corpus") {
  std::vector<oce::EditTriplet> ds;
  for (int i = 0; i < 25; ++i) ds.push_back(support::triplet("a\n", "b\n", Style::kLazy, "Update field" + std::to_string(i % 12)));
  const auto t = verb_object_table(ds, skip());
  REQUIRE(t.entries.size() == 1);
  CHECK(t.entries[0].verb == "update");
  CHECK(t.entries[0].count == 25);
  CHECK(t.entries[0].objects.size() == 10);  // top ten objects
}

TEST_CASE("verb table is ranked and truncated") {
  oce::Rng rng(2);
  std::vector<oce::EditTriplet> ds;
  for (int i = 0; i < 500; ++i) {
    ds.push_back(support::triplet("a\n", "b\n", Style::kLazy,
                                  "verb" + std::to_string(rng.uniform_int(0, 30)) + " obj" +
                                      std::to_string(rng.uniform_int(0, 15))));
  }
  const auto t = verb_object_table(ds, skip(), 20, 10);
  CHECK(t.entries.size() == 20);
  for (std::size_t i = 1; i < t.entries.size(); ++i) CHECK(t.entries[i - 1].count >= t.entries[i].count);
  for (const auto& e : t.entries) {
    CHECK(e.objects.size() <= 10);
    for (std::size_t i = 1; i < e.objects.size(); ++i) CHECK(e.objects[i - 1].second >= e.objects[i].second);
  }
}

TEST_CASE("topic report") {
  const std::vector<oce::topics::TopicId> dt{2, 2, 0, 2, oce::topics::kNoTopic, 0, 5};
  const auto h = topic_report(dt);
  CHECK(h.labels == std::vector<std::string>{"2", "0", "5", "none"});
  CHECK(h.counts == std::vector<std::size_t>{3, 2, 1, 1});
  CHECK(h.total == dt.size());
  CHECK(topic_report(std::vector<oce::topics::TopicId>(9, 4)).counts == std::vector<std::size_t>{9});
}

TEST_CASE("planted topics give three dominant bars") {
  const auto p = support::planted_corpus(40);
  oce::topics::HdpConfig cfg;
  cfg.seed = 12;
  cfg.iterations = 100;
  const auto m = oce::topics::fit_hdp(p.docs, cfg);
  std::vector<oce::topics::TopicId> dt;
  for (std::size_t d = 0; d < m.num_docs(); ++d) dt.push_back(oce::topics::dominant_topic(m, d));
  const auto h = topic_report(dt);
  REQUIRE(h.counts.size() >= 3);
  CHECK(h.counts[0] + h.counts[1] + h.counts[2] >= 108);  // 90% of 120 documents
  CHECK(h.counts[2] >= 30);
  CHECK(sum(h) == 120);
}

TEST_CASE("pass@1") {
  const bool mixed[] = {true, false, false, true};
  const bool all[] = {true, true, true, true, true, true, true};
  const bool none[] = {false};
  CHECK(pass_at_1(mixed) == 0.5);
  CHECK(pass_at_1(all) == 1.0);
  CHECK(pass_at_1(none) == 0.0);
  try {
    pass_at_1(std::span<const bool>{});
    FAIL("expected EmptyOutcomes");
  } catch (const oce::Error& e) {
    CHECK(e.code() == oce::Errc::kEmptyOutcomes);
  }
}

TEST_CASE("pass@1 equals the indicator mean on every short vector") {
  for (unsigned n = 1; n <= 10; ++n) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::array<bool, 10> v{};
      for (unsigned i = 0; i < n; ++i) v[i] = ((mask >> i) & 1u) != 0;
      const double got = pass_at_1(std::span<const bool>(v.data(), n));
      CHECK(got == static_cast<double>(std::popcount(mask)) / n);
      CHECK(got >= 0.0);
      CHECK(got <= 1.0);
    }
  }
}

TEST_CASE("report directory") {
  support::TempDir dir;
  const auto ds = support::mixed_triplets(60, 5);
  const auto tok = oce::config::RunConfig().tokenizer();
  oce::topics::HdpConfig hdp;
  hdp.iterations = 30;
  hdp.seed = 3;
  const auto r = build_reports(ds, tok, hdp);
  CHECK(r.records == 120);
  for (const auto* h : {&r.complexity.modified_lines, &r.complexity.hunks, &r.topics}) CHECK(sum(*h) == 120);
  CHECK(sum(r.instr_len_lazy) == 60);
  CHECK(sum(r.instr_len_descriptive) == 60);

  emit_report(r, dir / "a");
  emit_report(build_reports(ds, tok, hdp), dir / "b");
  for (const char* f : {"summary.json", "modified_lines.csv", "hunks.csv", "topics.csv", "instr_len_lazy.csv",
                        "instr_len_descriptive.csv", "verb_object.csv"}) {
    CAPTURE(f);
    REQUIRE(std::filesystem::exists(dir / "a" / f));
    CHECK(support::read_text(dir / "a" / f) == support::read_text(dir / "b" / f));
  }
  CHECK(support::read_text(dir / "a/hunks.csv").rfind("bin_start,bin_end,count\n", 0) == 0);
  CHECK(support::read_text(dir / "a/topics.csv").rfind("rank,topic,count\n", 0) == 0);
  CHECK(support::read_text(dir / "a/verb_object.csv").rfind("verb,verb_count,object,object_count\n", 0) == 0);

  // Table rows add up to the record count in summary.json.
  const auto summary = nlohmann::json::parse(support::read_text(dir / "a/summary.json"));
  CHECK(summary["records"] == 120);
  for (const char* f : {"modified_lines.csv", "hunks.csv", "topics.csv"}) {
    std::size_t total = 0;
    for (const auto& row : csv_rows(dir / "a" / f)) total += std::stoul(row.back());
    CHECK(total == summary["records"].get<std::size_t>());
  }
  std::size_t lazy = 0;
  for (const auto& row : csv_rows(dir / "a/instr_len_lazy.csv")) lazy += std::stoul(row.back());
  CHECK(lazy == 60);
}

TEST_CASE("empty dataset reports") {
  support::TempDir dir;
  const auto r = build_reports({}, oce::config::RunConfig().tokenizer(), {});
  CHECK(r.records == 0);
  CHECK(r.topics.total == 0);
  emit_report(r, dir.path());
  const auto summary = nlohmann::json::parse(support::read_text(dir / "summary.json"));
  CHECK(summary["records"] == 0);
  CHECK(summary["hunks"]["total"] == 0);
}
