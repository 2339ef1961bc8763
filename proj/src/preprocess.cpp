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

#include "trilingua/preprocess.hpp"

#include <stdexcept>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "text_util.hpp"

namespace trilingua {

namespace {

bool is_zero_width(UChar32 c) {
  return c == 0x200B || c == 0x2060 || c == 0xFEFF || c == 0x180E;
}

// Folds line endings, tabs and space separators; drops control and zero-width
// characters.
icu::UnicodeString fold_characters(const icu::UnicodeString& in) {
  icu::UnicodeString out;
  const int32_t n = in.length();
  for (int32_t i = 0; i < n;) {
    UChar32 c = in.char32At(i);
    i += U16_LENGTH(c);
    if (c == '\r') {
      if (i < n && in.charAt(i) == '\n') {
        ++i;
      }
      out.append(static_cast<UChar>('\n'));
    } else if (c == '\n') {
      out.append(static_cast<UChar>('\n'));
    } else if (c == '\t' || u_charType(c) == U_SPACE_SEPARATOR) {
      out.append(static_cast<UChar>(' '));
    } else if (u_charType(c) == U_CONTROL_CHAR || is_zero_width(c)) {
      continue;
    } else {
      out.append(c);
    }
  }
  return out;
}

// Operates on ASCII space/LF only, so byte-wise processing is UTF-8 safe.
std::string collapse_and_trim(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t pos = 0;
  while (true) {
    auto nl = s.find('\n', pos);
    std::string_view line = s.substr(pos, nl == std::string_view::npos ? s.npos : nl - pos);
    bool pending_space = false;
    bool started = false;
    for (char ch : line) {
      if (ch == ' ') {
        pending_space = started;
        continue;
      }
      if (pending_space) {
        out.push_back(' ');
        pending_space = false;
      }
      out.push_back(ch);
      started = true;
    }
    if (nl == std::string_view::npos) {
      break;
    }
    out.push_back('\n');
    pos = nl + 1;
  }
  return out;
}

std::string render_line(const Turn& turn) {
  auto utterance = normalize_text(turn.utterance);
  for (auto& ch : utterance) {
    if (ch == '\n') {
      ch = ' ';
    }
  }
  utterance = collapse_and_trim(utterance);
  if (utterance.empty()) {
    return turn.speaker + ":";
  }
  return turn.speaker + ": " + utterance;
}

}  // namespace

void StageBudget::validate() const {
  if (translation_input_max == 0 || translation_output_max == 0 || generation_output_max == 0) {
    throw std::invalid_argument("stage budgets must be positive");
  }
}

std::string_view RenderedDialogue::turn_text(std::size_t i) const {
  auto [start, end] = turn_offsets.at(i);
  std::string_view line(text.data() + start, end - start);
  if (!line.empty() && line.back() == '\n') {
    line.remove_suffix(1);
  }
  return line;
}

std::string normalize_text(std::string_view raw) {
  auto folded = fold_characters(
      icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size()))));
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  icu::UnicodeString composed = nfc->normalize(folded, status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU normalization failed");
  }
  std::string utf8;
  composed.toUTF8String(utf8);
  return collapse_and_trim(utf8);
}

RenderedDialogue assemble_lines(const std::vector<std::string>& lines) {
  RenderedDialogue out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto start = out.text.size();
    out.text += lines[i];
    if (i + 1 < lines.size()) {
      out.text.push_back('\n');
    }
    out.turn_offsets.emplace_back(start, out.text.size());
  }
  out.approx_tokens = approx_token_count(out.text);
  return out;
}

RenderedDialogue render_dialogue(const DialogueRecord& record) {
  std::vector<std::string> lines;
  lines.reserve(record.turns.size());
  for (const auto& turn : record.turns) {
    lines.push_back(render_line(turn));
  }
  return assemble_lines(lines);
}

std::size_t approx_token_count(std::string_view text) {
  std::size_t total = 0;
  std::size_t run = 0;
  auto flush = [&] {
    if (run > 0) {
      total += (run + 3) / 4;
      run = 0;
    }
  };
  for (char ch : text) {
    if (detail::is_ascii_space(ch)) {
      flush();
    } else if (!detail::is_utf8_continuation(ch)) {
      ++run;
    }
  }
  flush();
  return total;
}

std::string cut_to_budget(std::string_view text, std::size_t budget) {
  std::size_t used = 0;
  std::size_t keep_end = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && detail::is_ascii_space(text[i])) {
      ++i;
    }
    if (i == text.size()) {
      break;
    }
    const std::size_t run_start = i;
    std::size_t code_points = 0;
    while (i < text.size() && !detail::is_ascii_space(text[i])) {
      if (!detail::is_utf8_continuation(text[i])) {
        ++code_points;
      }
      ++i;
    }
    const std::size_t cost = (code_points + 3) / 4;
    if (used + cost > budget) {
      if (keep_end == 0) {
        // Single over-long run: keep the first 4 * budget code points.
        std::size_t cps = 0;
        std::size_t j = run_start;
        while (j < i) {
          if (!detail::is_utf8_continuation(text[j])) {
            if (cps == 4 * budget) {
              break;
            }
            ++cps;
          }
          ++j;
        }
        return std::string(text.substr(0, j));
      }
      break;
    }
    used += cost;
    keep_end = i;
  }
  return std::string(text.substr(0, keep_end));
}

TruncateOutcome truncate_to_budget(const RenderedDialogue& rendered, std::size_t budget,
                                   TruncateKeep keep) {
  if (budget == 0) {
    throw std::invalid_argument("truncation budget must be positive");
  }
  if (rendered.approx_tokens <= budget) {
    return {rendered, false, std::nullopt};
  }
  const std::size_t n = rendered.turn_count();
  std::vector<std::size_t> cost(n);
  for (std::size_t i = 0; i < n; ++i) {
    cost[i] = approx_token_count(rendered.turn_text(i));
  }

  std::vector<std::string> kept;
  std::size_t used = 0;
  if (keep == TruncateKeep::head) {
    for (std::size_t i = 0; i < n && used + cost[i] <= budget; ++i) {
      used += cost[i];
      kept.emplace_back(rendered.turn_text(i));
    }
  } else {
    std::size_t first = n;
    while (first > 0 && used + cost[first - 1] <= budget) {
      used += cost[--first];
    }
    for (std::size_t i = first; i < n; ++i) {
      kept.emplace_back(rendered.turn_text(i));
    }
  }

  TruncateOutcome out;
  out.truncated = true;
  if (kept.empty()) {
    const std::size_t turn = keep == TruncateKeep::head ? 0 : n - 1;
    kept.push_back(cut_to_budget(rendered.turn_text(turn), budget));
    out.diagnostic = Diagnostic{
        std::string(to_string(Stage::forward_translate)), "turn_split",
        "turn " + std::to_string(turn + 1) + " alone exceeds " + std::to_string(budget) +
            " tokens (" + std::to_string(cost[turn]) + "); cut mid-turn"};
  }
  out.dialogue = assemble_lines(kept);
  return out;
}

std::string TagMap::code_for(Lang lang) const {
  if (auto it = codes.find(lang); it != codes.end()) {
    return it->second;
  }
  return std::string(to_string(lang));
}

std::string TagMap::tag_for(Lang target) const {
  if (style == TagStyle::angle) {
    return "<2" + code_for(target) + ">";
  }
  return code_for(target);
}

std::string apply_language_tag(std::string_view text, Lang src, Lang tgt, const TagMap& tags) {
  if (src == tgt) {
    throw std::invalid_argument("language tag requested for same-language pair '" +
                                std::string(to_string(src)) + "'");
  }
  std::string out = tags.tag_for(tgt);
  out.push_back(' ');
  out.append(text);
  return out;
}

}  // namespace trilingua
