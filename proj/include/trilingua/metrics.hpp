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
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trilingua/corpus.hpp"

namespace trilingua {

// Lowercases, splits on whitespace and strips leading/trailing punctuation
// from each piece; empty pieces are dropped. With `english`, the articles
// "a", "an" and "the" are dropped too.
std::vector<std::string> metric_tokenize(std::string_view text, bool english);

// Bag-of-tokens F1. Both empty -> 1.0; exactly one empty -> 0.0.
double token_f1(std::span<const std::string> pred, std::span<const std::string> gold);

using Embedding = std::vector<double>;

struct EmbedScore {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

// Greedy cosine matching between candidate and reference token vectors:
// precision averages each candidate token's best match, recall each reference
// token's best match. Zero-norm vectors have similarity 0 with everything.
// F is the harmonic mean, or 0 when precision and recall are not both
// positive or both negative. Throws std::invalid_argument on an empty side or
// mixed dimensions.
EmbedScore greedy_embed_f1(std::span<const Embedding> candidate, std::span<const Embedding> reference);

// Percentage in tenths of a percent, rounded half up.
struct WinRate {
  std::int64_t tenths = 0;

  double percent() const { return static_cast<double>(tenths) / 10.0; }
  std::string str() const;  // "86.7%"
  auto operator<=>(const WinRate&) const = default;
};

// 100 * wins / total rounded half up to one decimal. Throws
// std::invalid_argument when total == 0 or wins > total.
WinRate win_rate(std::size_t wins, std::size_t total);

enum class Outcome { win, loss, tie };

struct Judgment {
  std::string record_id;
  Lang language = Lang::en;
  TaskKind task = TaskKind::qna;
  Outcome outcome = Outcome::loss;

  bool operator==(const Judgment&) const = default;
};

// JSONL {"record_id", "language", "task", "outcome"}. (record_id, language,
// task) must be unique; violations throw CorpusError with the line number.
std::vector<Judgment> load_judgments(const std::filesystem::path& path);
Judgment judgment_from_json_line(std::string_view line);

// Ties stay in the denominator unless excluded.
enum class TieRule { count_as_loss, exclude };

struct WinTally {
  std::size_t wins = 0;
  std::size_t total = 0;
};

using CellKey = std::pair<Lang, TaskKind>;

std::map<CellKey, WinTally> tally_judgments(std::span<const Judgment> judgments,
                                            TieRule ties = TieRule::count_as_loss);

struct ScoreRow {
  Lang language = Lang::en;
  TaskKind task = TaskKind::qna;
  double f1 = 0.0;
  std::optional<double> bert_f;

  bool operator==(const ScoreRow&) const = default;
};

// JSONL {"language", "task", "f1", "bert_f"?}; ranges are checked.
std::vector<ScoreRow> load_scores(const std::filesystem::path& path);
void write_scores(const std::filesystem::path& path, std::span<const ScoreRow> rows);
std::string score_to_json_line(const ScoreRow& row);

enum class ReportFormat { markdown, plain };

struct ReportOptions {
  ReportFormat format = ReportFormat::markdown;
  TieRule ties = TieRule::count_as_loss;
};

// Two tables: win rates per language and task, then F1 / BERT cells. Rows are
// ordered by the QnA column descending with alphabetical fallback; missing
// cells print as U+2014. The plain format separates cells with " & ".
std::string render_report(std::span<const Judgment> judgments, std::span<const ScoreRow> scores,
                          const ReportOptions& options = {});

}  // namespace trilingua
