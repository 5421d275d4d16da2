// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/triplet.hpp"

#include <algorithm>

#include "oce/error.hpp"

namespace oce {

void EditTask::validate() const {
  if (pre_edit.empty() || instruction_lazy.empty() || instruction_descriptive.empty()) {
    throw Error(Errc::kMalformedTask, "edit task has an empty field");
  }
  if (std::all_of(pre_edit.begin(), pre_edit.end(),
                  [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; })) {
    throw Error(Errc::kMalformedTask, "pre-edit code is blank");
  }
}

std::string_view to_string(Style style) { return style == Style::kLazy ? "lazy" : "descriptive"; }

Style style_from_string(std::string_view s) {
  if (s == "lazy") return Style::kLazy;
  if (s == "descriptive") return Style::kDescriptive;
  throw Error(Errc::kParseError, "unknown style '" + std::string(s) + "'");
}

std::string_view to_string(Flag flag) {
  return flag == Flag::kUnreasonable ? "unreasonable" : "parse_failed";
}

Flag flag_from_string(std::string_view s) {
  if (s == "unreasonable") return Flag::kUnreasonable;
  if (s == "parse_failed") return Flag::kParseFailed;
  throw Error(Errc::kParseError, "unknown flag '" + std::string(s) + "'");
}

nlohmann::json to_json(const EditTriplet& t) {
  nlohmann::json prov = nlohmann::json::array();
  for (const auto& p : t.pair_provenance) {
    prov.push_back({{"source_id", p.source_id}, {"start_line", p.start_line}});
  }
  nlohmann::json flags = nlohmann::json::array();
  for (Flag f : t.flags) flags.push_back(to_string(f));
  return {
      {"pre_edit", t.pre_edit},
      {"instruction", t.instruction},
      {"post_edit", t.post_edit},
      {"style", to_string(t.style)},
      {"generator_id", t.generator_id},
      {"pair_provenance", std::move(prov)},
      {"shot_id", t.shot_id},
      {"flags", std::move(flags)},
  };
}

EditTriplet triplet_from_json(const nlohmann::json& j) {
  try {
    EditTriplet t;
    t.pre_edit = j.at("pre_edit").get<std::string>();
    t.instruction = j.at("instruction").get<std::string>();
    t.post_edit = j.at("post_edit").get<std::string>();
    t.style = style_from_string(j.at("style").get<std::string>());
    t.generator_id = j.value("generator_id", std::string{});
    t.shot_id = j.value("shot_id", 0);
    if (auto it = j.find("pair_provenance"); it != j.end()) {
      if (!it->is_array() || it->size() != 2) {
        throw Error(Errc::kParseError, "pair_provenance must have two entries");
      }
      for (std::size_t i = 0; i < 2; ++i) {
        t.pair_provenance[i].source_id = (*it)[i].at("source_id").get<std::string>();
        t.pair_provenance[i].start_line = (*it)[i].at("start_line").get<int>();
      }
    }
    if (auto it = j.find("flags"); it != j.end()) {
      for (const auto& f : *it) t.flags.insert(flag_from_string(f.get<std::string>()));
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::kParseError, e.what());
  }
}

std::string dump_line(const nlohmann::json& j) {
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace oce
