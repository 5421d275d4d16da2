// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/diffeng.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

#include "oce/corpus.hpp"
#include "oce/error.hpp"

namespace oce::diff {
namespace {

/// Interns lines so the matcher compares integers. Ids are shared by a and b.
struct Interned {
  std::vector<int> a;
  std::vector<int> b;
  // b2j[id] = ascending positions of that line in b
  std::vector<std::vector<std::size_t>> b2j;
};

Interned intern(std::span<const std::string> a, std::span<const std::string> b) {
  Interned out;
  std::unordered_map<std::string_view, int> ids;
  auto id_of = [&](const std::string& s) {
    auto [it, inserted] = ids.emplace(s, static_cast<int>(ids.size()));
    return it->second;
  };
  out.b.reserve(b.size());
  for (const auto& s : b) out.b.push_back(id_of(s));
  out.a.reserve(a.size());
  for (const auto& s : a) out.a.push_back(id_of(s));
  out.b2j.resize(ids.size());
  for (std::size_t j = 0; j < out.b.size(); ++j) out.b2j[out.b[j]].push_back(j);
  return out;
}

// Dynamic-programming scan over a, keyed by positions in b: j2len[j] is the
// length of the match ending at a[i-1] and b[j].
MatchingBlock longest_match(const Interned& s, std::size_t alo, std::size_t ahi, std::size_t blo,
                            std::size_t bhi) {
  std::size_t besti = alo, bestj = blo, bestsize = 0;
  std::unordered_map<std::size_t, std::size_t> j2len;
  std::unordered_map<std::size_t, std::size_t> newj2len;
  for (std::size_t i = alo; i < ahi; ++i) {
    newj2len.clear();
    for (std::size_t j : s.b2j[s.a[i]]) {
      if (j < blo) continue;
      if (j >= bhi) break;
      std::size_t k = 1;
      if (j > 0) {
        auto it = j2len.find(j - 1);
        if (it != j2len.end()) k = it->second + 1;
      }
      newj2len[j] = k;
      if (k > bestsize) {
        besti = i + 1 - k;
        bestj = j + 1 - k;
        bestsize = k;
      }
    }
    std::swap(j2len, newj2len);
  }
  return {besti, bestj, bestsize};
}

std::vector<MatchingBlock> blocks_of(const Interned& s) {
  const std::size_t la = s.a.size(), lb = s.b.size();
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> queue{{0, la, 0, lb}};
  std::vector<MatchingBlock> found;
  while (!queue.empty()) {
    auto [alo, ahi, blo, bhi] = queue.back();
    queue.pop_back();
    MatchingBlock m = longest_match(s, alo, ahi, blo, bhi);
    if (m.size == 0) continue;
    found.push_back(m);
    if (alo < m.a && blo < m.b) queue.emplace_back(alo, m.a, blo, m.b);
    if (m.a + m.size < ahi && m.b + m.size < bhi) {
      queue.emplace_back(m.a + m.size, ahi, m.b + m.size, bhi);
    }
  }
  std::sort(found.begin(), found.end(),
            [](const MatchingBlock& x, const MatchingBlock& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });

  std::vector<MatchingBlock> merged;
  for (const auto& m : found) {
    if (!merged.empty() && merged.back().a + merged.back().size == m.a &&
        merged.back().b + merged.back().size == m.b) {
      merged.back().size += m.size;
    } else {
      merged.push_back(m);
    }
  }
  merged.push_back({la, lb, 0});
  return merged;
}

}  // namespace

MatchingBlock find_longest_match(std::span<const std::string> a, std::span<const std::string> b,
                                 std::size_t alo, std::size_t ahi, std::size_t blo,
                                 std::size_t bhi) {
  if (alo > ahi || ahi > a.size() || blo > bhi || bhi > b.size()) {
    throw Error(Errc::kInvalidArgument, "find_longest_match: range out of bounds");
  }
  return longest_match(intern(a, b), alo, ahi, blo, bhi);
}

std::vector<MatchingBlock> matching_blocks(std::span<const std::string> a,
                                           std::span<const std::string> b) {
  return blocks_of(intern(a, b));
}

std::vector<Opcode> align(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<Opcode> ops;
  std::size_t i = 0, j = 0;
  for (const auto& m : matching_blocks(a, b)) {
    if (i < m.a && j < m.b) {
      ops.push_back({OpKind::kReplace, {i, m.a}, {j, m.b}});
    } else if (i < m.a) {
      ops.push_back({OpKind::kDelete, {i, m.a}, {j, m.b}});
    } else if (j < m.b) {
      ops.push_back({OpKind::kInsert, {i, m.a}, {j, m.b}});
    }
    i = m.a + m.size;
    j = m.b + m.size;
    if (m.size) ops.push_back({OpKind::kEqual, {m.a, i}, {m.b, j}});
  }
  return ops;
}

int modified_lines(std::span<const Opcode> opcodes) {
  std::size_t total = 0;
  for (const auto& op : opcodes) {
    switch (op.kind) {
      case OpKind::kEqual: break;
      case OpKind::kInsert: total += op.b.size(); break;
      case OpKind::kDelete: total += op.a.size(); break;
      case OpKind::kReplace: total += std::max(op.a.size(), op.b.size()); break;
    }
  }
  return static_cast<int>(total);
}

int count_hunks(std::span<const Opcode> opcodes, const DiffConfig& cfg) {
  if (cfg.context_lines < 0) throw Error(Errc::kInvalidArgument, "context_lines must be >= 0");
  const std::size_t max_gap = 2 * static_cast<std::size_t>(cfg.context_lines);
  int hunks = 0;
  bool open = false;  // a change has been seen and not yet separated
  for (const auto& op : opcodes) {
    if (op.kind == OpKind::kEqual) {
      if (op.a.size() > max_gap) open = false;
    } else if (!open) {
      ++hunks;
      open = true;
    }
  }
  return hunks;
}

std::vector<std::string> apply_opcodes(std::span<const std::string> a,
                                       std::span<const std::string> b,
                                       std::span<const Opcode> opcodes) {
  std::vector<std::string> out;
  for (const auto& op : opcodes) {
    if (op.kind == OpKind::kEqual) {
      out.insert(out.end(), a.begin() + op.a.begin, a.begin() + op.a.end);
    } else {
      out.insert(out.end(), b.begin() + op.b.begin, b.begin() + op.b.end);
    }
  }
  return out;
}

DiffMetrics diff_metrics(std::string_view pre, std::string_view post, const DiffConfig& cfg) {
  const auto a = corpus::split_lines(pre);
  const auto b = corpus::split_lines(post);
  const auto ops = align(a, b);
  return {modified_lines(ops), count_hunks(ops, cfg)};
}

std::string_view to_string(OpKind kind) {
  switch (kind) {
    case OpKind::kEqual: return "equal";
    case OpKind::kInsert: return "insert";
    case OpKind::kDelete: return "delete";
    case OpKind::kReplace: return "replace";
  }
  return "?";
}

}  // namespace oce::diff
