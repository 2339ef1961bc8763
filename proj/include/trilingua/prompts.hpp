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
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "trilingua/corpus.hpp"

namespace trilingua {

// A task template. `body` holds the instruction, the output contract and the
// {dialogue} slot; the QnA body also holds a {question} slot.
struct PromptTemplate {
  TaskKind task = TaskKind::summary_text;
  std::string body;
};

// Question supplied to a task that takes none, or missing for QnA.
class PromptError : public std::invalid_argument {
 public:
  PromptError(TaskKind task, std::string record_id, const std::string& what)
      : std::invalid_argument(record_id.empty() ? what : what + " (record '" + record_id + "')"),
        task_(task),
        record_id_(std::move(record_id)) {}

  TaskKind task() const noexcept { return task_; }
  const std::string& record_id() const noexcept { return record_id_; }

 private:
  TaskKind task_;
  std::string record_id_;
};

// Template set for the three tasks, parsed from text with "[task:<kind>]"
// section headers. Lines before the first header must be blank or start with
// '#'. Immutable once built.
class PromptSet {
 public:
  // The templates shipped in data/prompts.txt.
  static PromptSet defaults();
  static PromptSet parse(std::string_view text);
  static PromptSet load(const std::filesystem::path& path);

  const PromptTemplate& get(TaskKind task) const;

  // Single-pass slot substitution; text inserted into a slot is never
  // re-scanned.
  std::string build(TaskKind task, std::string_view english_dialogue,
                    std::optional<std::string_view> question,
                    std::string_view record_id = {}) const;

 private:
  std::array<PromptTemplate, 3> templates_;
};

inline constexpr std::string_view kDialogueSlot = "{dialogue}";
inline constexpr std::string_view kQuestionSlot = "{question}";

std::string build_prompt(TaskKind task, std::string_view english_dialogue,
                         std::optional<std::string_view> question);

}  // namespace trilingua
