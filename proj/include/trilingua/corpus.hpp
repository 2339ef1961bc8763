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

#include <array>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace trilingua {

// Source languages handled by the pipeline. English is the pivot.
enum class Lang { en, hi, mr, kn, gu, te, ta, bn, as };

inline constexpr std::array<Lang, 9> kAllLangs = {Lang::en, Lang::hi, Lang::mr, Lang::kn, Lang::gu,
                                                  Lang::te, Lang::ta, Lang::bn, Lang::as};

std::string_view to_string(Lang lang);
std::string_view display_name(Lang lang);
std::optional<Lang> parse_lang(std::string_view code);

enum class TaskKind { qna, summary_text, summary_knv };

inline constexpr std::array<TaskKind, 3> kAllTasks = {TaskKind::qna, TaskKind::summary_text,
                                                      TaskKind::summary_knv};

std::string_view to_string(TaskKind task);
std::string_view display_name(TaskKind task);
std::optional<TaskKind> parse_task(std::string_view name);

struct Turn {
  std::string speaker;
  std::string utterance;

  bool operator==(const Turn&) const = default;
};

struct DialogueRecord {
  std::string id;
  Lang lang = Lang::en;
  std::vector<Turn> turns;
  std::vector<TaskKind> tasks;
  std::vector<std::string> questions;

  bool requests(TaskKind task) const;
  bool operator==(const DialogueRecord&) const = default;
};

struct Diagnostic {
  std::string stage;
  std::string code;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

enum class Stage { forward_translate, generate, reverse_translate };

std::string_view to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

// Per-stage bookkeeping. `duration` is informational and never persisted, so
// it takes no part in equality.
struct StageTrace {
  Stage stage = Stage::forward_translate;
  std::optional<TaskKind> task;
  std::size_t items = 0;
  std::size_t input_chars = 0;
  std::size_t output_chars = 0;
  bool truncated = false;
  bool bypass = false;
  std::chrono::microseconds duration{0};

  bool operator==(const StageTrace& other) const {
    return stage == other.stage && task == other.task && items == other.items &&
           input_chars == other.input_chars && output_chars == other.output_chars &&
           truncated == other.truncated && bypass == other.bypass;
  }
};

// One generated output. QnA records produce one entry per question.
struct TaskOutput {
  TaskKind task = TaskKind::qna;
  std::optional<std::size_t> question_index;
  std::optional<std::string> english_intermediate;
  std::optional<std::string> final_text;

  bool operator==(const TaskOutput&) const = default;
};

struct PipelineResult {
  std::string id;
  Lang lang = Lang::en;
  std::vector<TaskOutput> outputs;
  std::vector<Diagnostic> diagnostics;
  std::vector<StageTrace> traces;
  bool truncated = false;

  // True when every output carries both its English and final text.
  bool complete() const;
  bool operator==(const PipelineResult&) const = default;
};

// Ingestion failure. The message always names the offending line.
class CorpusError : public std::runtime_error {
 public:
  CorpusError(std::size_t line, const std::string& what, const std::string& detail = {})
      : std::runtime_error(what + " at line " + std::to_string(line) +
                           (detail.empty() ? "" : " (" + detail + ")")),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public std::runtime_error {
 public:
  IoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what), path_(path) {}

  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

// Checks the record invariants; throws std::invalid_argument naming the
// violated rule. Empty utterances are allowed (the pipeline flags them).
void validate_record(const DialogueRecord& record);

DialogueRecord record_from_json_line(std::string_view line);
std::string record_to_json_line(const DialogueRecord& record);

// Fail-fast JSONL ingestion. Blank lines are ignored; any invalid line throws
// CorpusError carrying its 1-based line number.
std::vector<DialogueRecord> load_corpus(const std::filesystem::path& path);
void write_corpus(const std::filesystem::path& path, std::span<const DialogueRecord> records);

std::string result_to_json_line(const PipelineResult& result);
PipelineResult result_from_json_line(std::string_view line);

// Truncates/creates `path` and writes one JSON object per line.
void write_results(const std::filesystem::path& path, std::span<const PipelineResult> results);

// Reads a results file. With `tolerate_torn_tail`, an unparseable final line
// without a trailing newline (an interrupted append) is ignored.
std::vector<PipelineResult> load_results(const std::filesystem::path& path,
                                         bool tolerate_torn_tail = false);

// Append-only results writer shared by concurrent workers. Each append writes
// a full line and flushes before returning.
class ResultAppender {
 public:
  explicit ResultAppender(const std::filesystem::path& path);

  void append(const PipelineResult& result);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::mutex mu_;
};

}  // namespace trilingua
