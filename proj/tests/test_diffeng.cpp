// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oce/corpus.hpp"
#include "oce/diffeng.hpp"
#include "oce/error.hpp"
#include "oce/rng.hpp"
#include "oracles/unified_diff_oracle.hpp"

using namespace oce::diff;
using Lines = std::vector<std::string>;

namespace {

Lines L(std::initializer_list<const char*> xs) { return Lines(xs.begin(), xs.end()); }

Lines random_lines(oce::Rng& rng, std::size_t n, int alphabet) {
  Lines out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("l" + std::to_string(rng.uniform_int(0, alphabet - 1)));
  return out;
}

OpKind kind_from(const std::string& s) {
  if (s == "equal") return OpKind::kEqual;
  if (s == "insert") return OpKind::kInsert;
  if (s == "delete") return OpKind::kDelete;
  return OpKind::kReplace;
}

}  // namespace

TEST_CASE("longest match prefers earliest a then earliest b") {
  const auto a = L({"x", "y", "q", "x", "y"});
  const auto b = L({"p", "x", "y", "x", "y"});
  const auto m = find_longest_match(a, b, 0, a.size(), 0, b.size());
  CHECK(m == MatchingBlock{0, 1, 2});
}

TEST_CASE("longest match honours window bounds") {
  const auto a = L({"a", "b", "c", "d"});
  const auto b = L({"a", "b", "c", "d"});
  CHECK(find_longest_match(a, b, 1, 3, 0, 4) == MatchingBlock{1, 1, 2});
  CHECK(find_longest_match(a, b, 2, 2, 0, 4).size == 0);
}

TEST_CASE("matching blocks end with the sentinel") {
  const auto a = L({"a", "b", "c"});
  const auto b = L({"a", "x", "c"});
  const auto blocks = matching_blocks(a, b);
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0] == MatchingBlock{0, 0, 1});
  CHECK(blocks[1] == MatchingBlock{2, 2, 1});
  CHECK(blocks[2] == MatchingBlock{3, 3, 0});
  CHECK(matching_blocks(Lines{}, Lines{}) == std::vector<MatchingBlock>{{0, 0, 0}});
}

TEST_CASE("opcodes for a single replacement") {
  const auto ops = align(L({"a", "b", "c"}), L({"a", "B", "c"}));
  REQUIRE(ops.size() == 3);
  CHECK(ops[1].kind == OpKind::kReplace);
  CHECK(ops[1].a == LineRange{1, 2});
  CHECK(ops[1].b == LineRange{1, 2});
  CHECK(modified_lines(ops) == 1);
  CHECK(count_hunks(ops) == 1);
}

TEST_CASE("identical inputs have no changes") {
  const auto a = L({"a", "b", "c"});
  const auto ops = align(a, a);
  REQUIRE(ops.size() == 1);
  CHECK(ops[0].kind == OpKind::kEqual);
  CHECK(modified_lines(ops) == 0);
  CHECK(count_hunks(ops) == 0);
  CHECK(diff_metrics("", "") == DiffMetrics{0, 0});
  CHECK(align(Lines{}, Lines{}).empty());
}

TEST_CASE("pure insertion and deletion") {
  CHECK(diff_metrics("", "a\nb\nc\n") == DiffMetrics{3, 1});
  CHECK(diff_metrics("a\nb\nc\n", "") == DiffMetrics{3, 1});
  // Replacement counts the larger side.
  CHECK(diff_metrics("a\nb\n", "x\ny\nz\n") == DiffMetrics{3, 1});
}

TEST_CASE("changes separated by more than twice the context form separate hunks") {
  Lines a;
  for (int i = 0; i < 20; ++i) a.push_back("l" + std::to_string(i));
  auto b = a;
  b[2] = "X";
  b[9] = "Y";  // 6 equal lines between: one hunk at context 3
  CHECK(count_hunks(align(a, b)) == 1);
  b = a;
  b[2] = "X";
  b[10] = "Y";  // 7 equal lines between: two hunks
  CHECK(count_hunks(align(a, b)) == 2);
  DiffConfig wide{4};
  CHECK(count_hunks(align(a, b), wide) == 1);
}

TEST_CASE("negative context is rejected") {
  const auto ops = align(L({"a"}), L({"b"}));
  CHECK_THROWS_AS(count_hunks(ops, DiffConfig{-1}), oce::Error);
}

TEST_CASE("line terminators do not change the metrics") {
  CHECK(diff_metrics("a\r\nb\r\nc\r\n", "a\nb\nc") == DiffMetrics{0, 0});
}

TEST_CASE("agrees with Python difflib on frozen cases") {
  std::ifstream in(OCE_TEST_FIXTURE_DIR "/difflib_cases.jsonl");
  REQUIRE(in.good());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    const auto c = nlohmann::json::parse(line);
    const auto a = c["a"].get<Lines>();
    const auto b = c["b"].get<Lines>();
    CAPTURE(n);
    std::vector<MatchingBlock> want_blocks;
    for (const auto& m : c["blocks"]) want_blocks.push_back({m[0], m[1], m[2]});
    CHECK(matching_blocks(a, b) == want_blocks);

    std::vector<Opcode> want_ops;
    for (const auto& o : c["opcodes"]) {
      want_ops.push_back({kind_from(o[0]), {o[1], o[2]}, {o[3], o[4]}});
    }
    const auto ops = align(a, b);
    CHECK(ops == want_ops);
    CHECK(modified_lines(ops) == c["modified_lines"].get<int>());
    CHECK(count_hunks(ops) == c["hunks"].get<int>());
    ++n;
  }
  CHECK(n == 400);
}

TEST_CASE("agrees with the brute-force oracle") {
  oce::Rng rng(11);
  for (int k = 0; k < 300; ++k) {
    const auto a = random_lines(rng, rng.uniform_index(30), 6);
    const auto b = random_lines(rng, rng.uniform_index(30), 6);
    const auto ops = align(a, b);
    const auto want = oracle::reference(a, b, 3);
    CAPTURE(k);
    CHECK(modified_lines(ops) == want.modified);
    CHECK(count_hunks(ops) == want.hunks);
    const auto blocks = matching_blocks(a, b);
    const auto ob = oracle::blocks(a, b);
    REQUIRE(blocks.size() == ob.size());
    for (std::size_t i = 0; i < ob.size(); ++i) {
      CHECK(blocks[i] == MatchingBlock{ob[i].i, ob[i].j, ob[i].n});
    }
  }
}

TEST_CASE("opcodes tile both sequences and reproduce b") {
  oce::Rng rng(5);
  for (int k = 0; k < 500; ++k) {
    const auto a = random_lines(rng, rng.uniform_index(25), 4);
    const auto b = random_lines(rng, rng.uniform_index(25), 4);
    const auto ops = align(a, b);
    std::size_t ai = 0, bj = 0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const auto& op = ops[i];
      CHECK(op.a.begin == ai);
      CHECK(op.b.begin == bj);
      ai = op.a.end;
      bj = op.b.end;
      if (i > 0) CHECK_FALSE((op.kind == OpKind::kEqual && ops[i - 1].kind == OpKind::kEqual));
      if (op.kind == OpKind::kEqual) {
        for (std::size_t t = 0; t < op.a.size(); ++t) CHECK(a[op.a.begin + t] == b[op.b.begin + t]);
      }
    }
    CHECK(ai == a.size());
    CHECK(bj == b.size());
    CHECK(apply_opcodes(a, b, ops) == b);
    CHECK(modified_lines(ops) <= static_cast<int>(a.size() + b.size()));
    CHECK(modified_lines(ops) >= std::abs(static_cast<int>(a.size()) - static_cast<int>(b.size())));
  }
}
