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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trilingua/backend_client.hpp"
#include "trilingua/corpus.hpp"
#include "trilingua/metrics.hpp"

namespace trilingua {

// Reference output. JSONL {"id", "task", "question_index"?, "reference"}.
struct GoldItem {
  std::string id;
  TaskKind task = TaskKind::qna;
  std::optional<std::size_t> question_index;
  std::string reference;
};

std::vector<GoldItem> load_gold(const std::filesystem::path& path);

struct EvalItem {
  std::string id;
  Lang language = Lang::en;
  TaskKind task = TaskKind::qna;
  std::optional<std::size_t> question_index;
  double f1 = 0.0;
  std::optional<EmbedScore> bert;
};

struct EvalReport {
  std::vector<EvalItem> items;
  std::vector<ScoreRow> rows;  // per (language, task) means
  std::size_t missing = 0;     // gold items without a final prediction
};

// Scores final outputs against references. A missing prediction scores as an
// empty string; gold items whose record is absent from `predictions` are
// counted in `missing` and skipped. Without an embedder no BERT scores are
// produced.
EvalReport evaluate(std::span<const PipelineResult> predictions, std::span<const GoldItem> gold,
                    const BackendClient* embedder);

std::string eval_item_to_json_line(const EvalItem& item);

}  // namespace trilingua
