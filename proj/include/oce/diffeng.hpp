// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace oce::diff {

enum class OpKind { kEqual, kInsert, kDelete, kReplace };

/// Half-open line interval.
struct LineRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const LineRange&) const = default;
};

struct Opcode {
  OpKind kind = OpKind::kEqual;
  LineRange a;  // lines of the pre-edit side
  LineRange b;  // lines of the post-edit side

  bool operator==(const Opcode&) const = default;
};

struct MatchingBlock {
  std::size_t a = 0;
  std::size_t b = 0;
  std::size_t size = 0;

  bool operator==(const MatchingBlock&) const = default;
};

struct DiffConfig {
  int context_lines = 3;
};

struct DiffMetrics {
  int modified_lines = 0;
  int hunks = 0;

  bool operator==(const DiffMetrics&) const = default;
};

/// Longest run of identical consecutive lines with a in [alo, ahi) and b in
/// [blo, bhi). Ties resolve to the earliest start in a, then in b. Size 0 when
/// nothing matches.
MatchingBlock find_longest_match(std::span<const std::string> a, std::span<const std::string> b,
                                 std::size_t alo, std::size_t ahi, std::size_t blo,
                                 std::size_t bhi);

/// Recursive longest-block decomposition; adjacent blocks are merged and the
/// list ends with the sentinel {len(a), len(b), 0}.
std::vector<MatchingBlock> matching_blocks(std::span<const std::string> a,
                                           std::span<const std::string> b);

/// Opcodes tiling both sequences in order.
std::vector<Opcode> align(std::span<const std::string> a, std::span<const std::string> b);

/// insert counts |b|, delete counts |a|, replace counts max(|a|, |b|).
int modified_lines(std::span<const Opcode> opcodes);

/// Change blocks separated by more than 2 * context_lines unchanged lines
/// fall into separate hunks.
int count_hunks(std::span<const Opcode> opcodes, const DiffConfig& cfg = {});

/// Applies the opcodes to a, copying inserted/replacement lines from b.
std::vector<std::string> apply_opcodes(std::span<const std::string> a,
                                       std::span<const std::string> b,
                                       std::span<const Opcode> opcodes);

DiffMetrics diff_metrics(std::string_view pre, std::string_view post, const DiffConfig& cfg = {});

std::string_view to_string(OpKind kind);

}  // namespace oce::diff
