// Copyright 2026 The Trilingua Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trilingua/corpus.hpp"

namespace trilingua {

// Token limits per stage, in approximate tokens.
struct StageBudget {
  std::size_t translation_input_max = 2048;
  std::size_t translation_output_max = 2048;
  std::size_t generation_output_max = 3000;

  void validate() const;
  bool operator==(const StageBudget&) const = default;
};

// Rendered dialogue: one "Speaker: utterance" line per turn. Offsets are byte
// spans into `text`; span i covers line i plus its trailing newline, so the
// spans partition the text.
struct RenderedDialogue {
  std::string text;
  std::vector<std::pair<std::size_t, std::size_t>> turn_offsets;
  std::size_t approx_tokens = 0;

  std::size_t turn_count() const { return turn_offsets.size(); }
  std::string_view turn_text(std::size_t i) const;
  bool operator==(const RenderedDialogue&) const = default;
};

// NFC composition, CR/LF -> LF, removal of control and zero-width characters
// (ZWJ/ZWNJ are kept: they select conjunct forms in Indic scripts), tabs and
// Unicode space separators folded into single spaces, and per-line trimming.
// Idempotent. Invalid UTF-8 sequences become U+FFFD.
std::string normalize_text(std::string_view raw);

RenderedDialogue render_dialogue(const DialogueRecord& record);

// Builds a RenderedDialogue from already rendered lines.
RenderedDialogue assemble_lines(const std::vector<std::string>& lines);

// Counts maximal non-whitespace runs; a run of n > 4 code points counts as
// ceil(n / 4).
std::size_t approx_token_count(std::string_view text);

enum class TruncateKeep { head, tail };

struct TruncateOutcome {
  RenderedDialogue dialogue;
  bool truncated = false;
  std::optional<Diagnostic> diagnostic;  // set for "turn_split"
};

// Keeps whole turns within `budget` tokens. If not even one turn fits, the
// first kept turn is cut at the last whitespace that keeps it within budget.
TruncateOutcome truncate_to_budget(const RenderedDialogue& rendered, std::size_t budget,
                                   TruncateKeep keep = TruncateKeep::head);

// Longest whitespace-bounded prefix of `text` within `budget` tokens. Falls
// back to a code-point cut when the first run alone is over budget.
std::string cut_to_budget(std::string_view text, std::size_t budget);

enum class TagStyle { angle, prefix_code };

// Language tag convention for translation inputs. `codes` overrides the
// backend code per target language; unmapped languages use their two-letter
// code.
struct TagMap {
  TagStyle style = TagStyle::angle;
  std::map<Lang, std::string> codes;

  std::string code_for(Lang lang) const;
  std::string tag_for(Lang target) const;
};

// "<2{tgt}> " + text for the angle style, "{code} " + text for prefix_code.
// src == tgt throws std::invalid_argument: same-language stages are bypassed.
std::string apply_language_tag(std::string_view text, Lang src, Lang tgt, const TagMap& tags = {});

}  // namespace trilingua
