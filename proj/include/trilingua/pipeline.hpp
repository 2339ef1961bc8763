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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "trilingua/backend_client.hpp"
#include "trilingua/config.hpp"
#include "trilingua/corpus.hpp"
#include "trilingua/prompts.hpp"

namespace trilingua {

// Splits after '.', '!' or '?' followed by whitespace, and at every newline;
// terminal punctuation stays with its sentence. Abbreviations ("Dr.", "e.g.")
// never end a sentence. Sentences are trimmed and empty ones dropped.
std::vector<std::string> sentence_split(std::string_view english_text);

struct RunSummary {
  std::size_t processed = 0;  // records run by this invocation
  std::size_t skipped = 0;    // records already completed in the checkpoint
  std::size_t failed = 0;     // processed records with at least one missing output

  bool operator==(const RunSummary&) const = default;
};

struct RunOptions {
  // Stop claiming new records after this many; simulates an interrupted run.
  std::optional<std::size_t> stop_after;
};

// Translate -> generate -> translate back, per record. Holds one client per
// backend role; safe to share across worker threads.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  const PipelineConfig& config() const noexcept { return config_; }

  // Never throws for backend failures: affected outputs are left absent and a
  // diagnostic explains why.
  PipelineResult run_record(const DialogueRecord& record) const;

  // Runs every record without a complete result in the checkpoint, with at
  // most `parallelism` records in flight, appending each result to the checkpoint as it
  // completes, then writes `out` with all results in corpus order. Corpus
  // errors throw before any record is processed.
  RunSummary run_corpus(const std::filesystem::path& corpus, const std::filesystem::path& out,
                        const RunOptions& options = {}) const;

  // Checkpoint used for `out`: the configured path, else "<out>.checkpoint".
  std::filesystem::path checkpoint_for(const std::filesystem::path& out) const;

 private:
  PipelineConfig config_;
  PromptSet prompts_;
  BackendClient translate_fwd_;
  BackendClient translate_rev_;
  BackendClient generate_;
};

PipelineResult run_record(const DialogueRecord& record, const PipelineConfig& config);
RunSummary run_corpus(const std::filesystem::path& corpus, const std::filesystem::path& out,
                      const PipelineConfig& config);

}  // namespace trilingua
