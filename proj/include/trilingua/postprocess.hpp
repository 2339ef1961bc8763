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
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "trilingua/corpus.hpp"

namespace trilingua {

struct KnVPair {
  std::string key;
  std::string value;
  std::size_t line_no = 0;                      // 1-based line of "key: value"
  std::vector<std::size_t> continuation_lines;  // lines folded into `value`

  // Pairs compare by content only.
  bool operator==(const KnVPair& other) const { return key == other.key && value == other.value; }
};

struct KnVDiagnostic {
  std::size_t line_no = 0;
  std::string code;  // preamble | orphan_line | dup_key | empty_key
  std::string raw_line;

  bool operator==(const KnVDiagnostic&) const = default;
};

struct KnVDoc {
  std::vector<KnVPair> pairs;
  std::vector<KnVDiagnostic> diagnostics;

  // Appends a pair; throws std::invalid_argument when the key is empty or
  // holds ':' or a newline, or the value holds a newline.
  void add(std::string key, std::string value);
};

// Total parser for "Key: Value" documents.
//  - a line with a colon is a pair; the key is the text before the first
//    colon, trimmed, and the value the trimmed remainder
//  - a colon-free line directly after a pair line or continuation extends
//    that pair's value (joined with one space)
//  - a colon-free line before any pair is "preamble"; after a blank line it
//    is "orphan_line"
//  - repeated keys are kept and flagged "dup_key"; ": value" is "empty_key"
// Diagnostics carry the raw line, so nothing is dropped silently.
KnVDoc parse_knv(std::string_view text);

// One "key: value" line per pair ("key:" for an empty value).
std::string serialize_knv(const KnVDoc& doc);

struct ArtifactRules {
  std::vector<std::string> strip_prefixes = {"Sure,", "Here is", "Answer:"};
  std::set<Lang> danda_languages = {Lang::hi, Lang::mr, Lang::bn, Lang::as};
};

// Strips leading discourse markers (ASCII case-insensitive, repeatedly, at the
// start of the text only) and, for danda languages, turns sentence-final '.'
// into '।'. Idempotent.
std::string clean_artifacts(std::string_view text, Lang target, const ArtifactRules& rules = {});

// True for tokens such as "Dr." or "e.g." that end in '.' without ending a
// sentence. Case-insensitive; leading brackets and quotes are ignored.
bool is_abbreviation(std::string_view token);

}  // namespace trilingua
