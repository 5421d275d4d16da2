// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

namespace oce {

enum class Style { kLazy, kDescriptive };
enum class Flag { kUnreasonable, kParseFailed };

struct Provenance {
  std::string source_id;
  int start_line = 0;

  bool operator==(const Provenance&) const = default;
};

/// Round-1 output: the pre-edit code and both phrasings of the same edit.
struct EditTask {
  std::string pre_edit;
  std::string instruction_lazy;
  std::string instruction_descriptive;

  /// Throws MalformedTask unless all fields are non-empty and pre_edit has a
  /// non-blank line.
  void validate() const;
};

/// One (pre-edit code, instruction, post-edit code) record.
struct EditTriplet {
  std::string pre_edit;
  std::string instruction;
  std::string post_edit;
  Style style = Style::kLazy;
  std::string generator_id;
  std::array<Provenance, 2> pair_provenance;
  int shot_id = 0;
  std::set<Flag> flags;

  bool flagged() const { return !flags.empty(); }
  bool operator==(const EditTriplet&) const = default;
};

std::string_view to_string(Style style);
Style style_from_string(std::string_view s);
std::string_view to_string(Flag flag);
Flag flag_from_string(std::string_view s);

nlohmann::json to_json(const EditTriplet& t);
/// Throws ParseError on missing or mistyped fields.
EditTriplet triplet_from_json(const nlohmann::json& j);

/// Compact single-line JSON; invalid UTF-8 is replaced rather than rejected.
std::string dump_line(const nlohmann::json& j);

}  // namespace oce
