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

#include "trilingua/postprocess.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "text_util.hpp"

namespace trilingua {

namespace {

constexpr std::string_view kDanda = "\xE0\xA5\xA4";  // U+0964

constexpr std::array<std::string_view, 13> kAbbreviations = {
    "dr.", "mr.", "mrs.", "ms.", "prof.", "sr.", "jr.", "st.", "vs.", "e.g.", "i.e.", "approx.", "no."};

enum class LineState { none, in_pair, after_blank };

std::string strip_markers(std::string_view text, const ArtifactRules& rules) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& marker : rules.strip_prefixes) {
      if (marker.empty() || !detail::iequals_prefix(text, marker)) {
        continue;
      }
      // A marker ending in a letter or digit must end on a word boundary.
      if (detail::ascii_alnum(marker.back()) && text.size() > marker.size() &&
          detail::ascii_alnum(text[marker.size()])) {
        continue;
      }
      text.remove_prefix(marker.size());
      while (!text.empty() && detail::is_ascii_space(text.front())) {
        text.remove_prefix(1);
      }
      changed = true;
    }
  }
  return std::string(text);
}

std::string to_danda(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch != '.') {
      out.push_back(ch);
      continue;
    }
    const bool at_end = i + 1 == text.size() || detail::is_ascii_space(text[i + 1]);
    const bool after_word = i > 0 && !detail::is_ascii_space(text[i - 1]) && text[i - 1] != '.';
    if (!at_end || !after_word) {
      out.push_back(ch);
      continue;
    }
    std::size_t start = i;
    while (start > 0 && !detail::is_ascii_space(text[start - 1])) {
      --start;
    }
    if (is_abbreviation(text.substr(start, i + 1 - start))) {
      out.push_back(ch);
    } else {
      out.append(kDanda);
    }
  }
  return out;
}

}  // namespace

void KnVDoc::add(std::string key, std::string value) {
  if (key.empty()) {
    throw std::invalid_argument("KnV key must not be empty");
  }
  if (key.find_first_of(":\n") != std::string::npos) {
    throw std::invalid_argument("KnV key must not contain ':' or a newline: '" + key + "'");
  }
  if (value.find('\n') != std::string::npos) {
    throw std::invalid_argument("KnV value must not contain a newline");
  }
  pairs.push_back({std::move(key), std::move(value), 0, {}});
}

KnVDoc parse_knv(std::string_view text) {
  KnVDoc doc;
  if (text.empty()) {
    return doc;
  }
  LineState state = LineState::none;
  std::size_t line_no = 0;
  std::set<std::string, std::less<>> seen;
  for (auto raw : detail::split_lines(text)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') {
      raw.remove_suffix(1);
    }
    auto line = detail::trim(raw);
    if (line.empty()) {
      if (state == LineState::in_pair) {
        state = LineState::after_blank;
      }
      continue;
    }
    auto colon = line.find(':');
    if (colon != std::string_view::npos) {
      auto key = detail::trim(line.substr(0, colon));
      if (key.empty()) {
        doc.diagnostics.push_back({line_no, "empty_key", std::string(raw)});
        state = doc.pairs.empty() ? LineState::none : LineState::after_blank;
        continue;
      }
      if (!seen.emplace(key).second) {
        doc.diagnostics.push_back({line_no, "dup_key", std::string(raw)});
      }
      doc.pairs.push_back(
          {std::string(key), std::string(detail::trim(line.substr(colon + 1))), line_no, {}});
      state = LineState::in_pair;
      continue;
    }
    switch (state) {
      case LineState::in_pair: {
        auto& pair = doc.pairs.back();
        if (!pair.value.empty()) {
          pair.value.push_back(' ');
        }
        pair.value.append(line);
        pair.continuation_lines.push_back(line_no);
        break;
      }
      case LineState::none:
        doc.diagnostics.push_back(
            {line_no, doc.pairs.empty() ? "preamble" : "orphan_line", std::string(raw)});
        break;
      case LineState::after_blank:
        doc.diagnostics.push_back({line_no, "orphan_line", std::string(raw)});
        break;
    }
  }
  return doc;
}

std::string serialize_knv(const KnVDoc& doc) {
  std::string out;
  for (const auto& pair : doc.pairs) {
    if (pair.key.empty() || pair.key.find_first_of(":\n") != std::string::npos) {
      throw std::invalid_argument("KnV key must be non-empty and free of ':' and newlines");
    }
    if (!out.empty()) {
      out.push_back('\n');
    }
    out += pair.key;
    out.push_back(':');
    if (!pair.value.empty()) {
      out.push_back(' ');
      out += pair.value;
    }
  }
  return out;
}

bool is_abbreviation(std::string_view token) {
  while (!token.empty() && (token.front() == '(' || token.front() == '[' || token.front() == '"' ||
                            token.front() == '\'')) {
    token.remove_prefix(1);
  }
  if (token.empty()) {
    return false;
  }
  return std::any_of(kAbbreviations.begin(), kAbbreviations.end(), [&](std::string_view abbr) {
    return abbr.size() == token.size() && detail::iequals_prefix(token, abbr);
  });
}

std::string clean_artifacts(std::string_view text, Lang target, const ArtifactRules& rules) {
  auto out = strip_markers(text, rules);
  if (rules.danda_languages.contains(target)) {
    out = to_danda(out);
  }
  return out;
}

}  // namespace trilingua
