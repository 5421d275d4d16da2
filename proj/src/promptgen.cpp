// Copyright 2026 The oce-synth Authors
// SPDX-License-Identifier: Apache-2.0

#include "oce/promptgen.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "oce/digest.hpp"
#include "oce/error.hpp"

namespace oce::prompt {
namespace {

constexpr std::string_view kShotSlot = "{{SHOT}}";
constexpr std::string_view kSnippet1Slot = "{{SNIPPET_1}}";
constexpr std::string_view kSnippet2Slot = "{{SNIPPET_2}}";

constexpr std::string_view kDefaultRound1 = R"(You are helping to build a dataset of realistic code editing tasks.

Below are two code snippets taken from two different source files. Use them only as inspiration. Write a new, self-contained piece of code (the pre-edit code) that draws on ideas from both snippets, then invent one editing task for it. Do not copy the snippets verbatim, and do not include secrets, credentials or personal data.

State the editing task twice:
- a lazy instruction: one short, high-level request, the way a developer would type it;
- a descriptive instruction: a detailed, context-aware specification that fully states what has to change.

Do not write the edited code yet.

Answer with exactly these three sections, in this order:
[PRE-EDIT]
```
<the pre-edit code>
```
[LAZY]
<the lazy instruction>
[DESCRIPTIVE]
<the descriptive instruction>

Here is an example.

{{SHOT}}

Now do the same for the following snippets.

### Snippet 1
```
{{SNIPPET_1}}
```

### Snippet 2
```
{{SNIPPET_2}}
```

### Response
)";

constexpr std::string_view kRound2Head = R"(Here is a code editing task.

### Pre-edit code
```
)";

constexpr std::string_view kRound2Mid = R"(
```

### Instruction
)";

constexpr std::string_view kRound2Tail = R"(

First check whether this is a reasonable editing task: the instruction must apply to the pre-edit code and be specific enough to carry out. If it is not, reply with exactly <UNREASONABLE> and nothing else.

Otherwise, apply the instruction and reply with the complete post-edit code in a single fenced code block. Change only what the instruction asks for.
)";

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

void check_template(std::string_view text) {
  for (auto slot : {kShotSlot, kSnippet1Slot, kSnippet2Slot}) {
    if (count_occurrences(text, slot) != 1) {
      throw Error(Errc::kConfigError,
                  "round-1 template must contain " + std::string(slot) + " exactly once");
    }
  }
}

}  // namespace

ShotPool load_shot_pool(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kUnreadable, "cannot read shot pool " + path.string());
  ShotPool pool;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto rec = nlohmann::json::parse(line);
      ShotExample shot;
      shot.shot_id = rec.at("shot_id").get<int>();
      shot.rendered_text = rec.at("text").get<std::string>();
      if (shot.rendered_text.empty()) {
        throw Error(Errc::kParseError, "empty shot text");
      }
      pool.shots.push_back(std::move(shot));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::kParseError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (pool.shots.empty()) throw Error(Errc::kEmptyShotPool, path.string());
  if (pool.shots.size() < kDefaultPoolSize) {
    pool.warnings.push_back("shot pool " + path.string() + " has " +
                            std::to_string(pool.shots.size()) + " examples (default is " +
                            std::to_string(kDefaultPoolSize) + ")");
  }
  return pool;
}

Round1Template default_round1_template() {
  return {std::string(kDefaultRound1), "round1-v1"};
}

Round1Template load_round1_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kUnreadable, "cannot read template " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  Round1Template t{ss.str(), {}};
  check_template(t.text);
  t.version = "custom-" + sha256_hex(t.text).substr(0, 12);
  return t;
}

PromptBundle build_round1_prompt(const corpus::SnippetPair& pair, std::span<const ShotExample> pool,
                                 Rng& rng, const Round1Template& tmpl) {
  if (pool.empty()) throw Error(Errc::kEmptyShotPool, "cannot build a prompt without shots");
  check_template(tmpl.text);
  const ShotExample& shot = pool[rng.uniform_index(pool.size())];

  // Single left-to-right pass, so placeholder-like text inside snippets or
  // shots is never expanded.
  std::string out;
  std::string_view rest = tmpl.text;
  while (!rest.empty()) {
    const auto open = rest.find("{{");
    if (open == std::string_view::npos) {
      out += rest;
      break;
    }
    out += rest.substr(0, open);
    rest.remove_prefix(open);
    if (rest.starts_with(kShotSlot)) {
      out += shot.rendered_text;
      rest.remove_prefix(kShotSlot.size());
    } else if (rest.starts_with(kSnippet1Slot)) {
      out += pair.first.text();
      rest.remove_prefix(kSnippet1Slot.size());
    } else if (rest.starts_with(kSnippet2Slot)) {
      out += pair.second.text();
      rest.remove_prefix(kSnippet2Slot.size());
    } else {
      out += "{{";
      rest.remove_prefix(2);
    }
  }
  return {std::move(out), pair, shot.shot_id, tmpl.version};
}

std::string build_round2_prompt(const EditTask& task) {
  task.validate();
  std::string out;
  out.reserve(kRound2Head.size() + task.pre_edit.size() + kRound2Mid.size() +
              task.instruction_descriptive.size() + kRound2Tail.size());
  out += kRound2Head;
  out += task.pre_edit;
  out += kRound2Mid;
  out += task.instruction_descriptive;
  out += kRound2Tail;
  return out;
}

}  // namespace oce::prompt
