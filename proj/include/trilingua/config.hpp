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
#include <map>
#include <optional>
#include <string_view>

#include "trilingua/backend_client.hpp"
#include "trilingua/mockserve.hpp"
#include "trilingua/postprocess.hpp"
#include "trilingua/preprocess.hpp"

namespace trilingua {

struct PipelineConfig {
  std::map<BackendRole, BackendEndpoint> endpoints;
  StageBudget budgets;
  TagMap tags;
  std::optional<std::filesystem::path> template_path;
  std::size_t parallelism = 1;
  std::filesystem::path checkpoint_path;
  TruncateKeep truncate_keep = TruncateKeep::head;
  ArtifactRules artifacts;
  RetryPolicy retry;
  std::optional<MockBehavior> mock;

  // The three pipeline roles must be configured; embed only when
  // `need_embed`.
  void validate(bool need_embed = false) const;

  // Points every role at `base_url`, keeping per-role settings.
  void point_all_endpoints_at(const std::string& base_url);
};

// JSON config:
// {
//   "endpoints": {"translate_fwd": {"base_url": str, "timeout": s, "max_retries": n,
//                                   "batch_size": n}, "translate_rev": ..., "generate": ...,
//                 "embed": ...},
//   "budgets": {"translation_input_max": n, "translation_output_max": n,
//               "generation_output_max": n},
//   "parallelism": n, "checkpoint_path": str, "template_path": str,
//   "tag_style": "angle" | "prefix_code", "codes": {lang: backend_code},
//   "truncate_keep": "head" | "tail",
//   "artifacts": {"strip_prefixes": [str], "danda_languages": [lang]},
//   "retry": {"base_ms": n, "factor": x, "cap_ms": n, "jitter": bool},
//   "mock": {...mock behavior...}
// }
// Every key is optional; unknown keys are rejected. Relative paths resolve
// against `base_dir`.
PipelineConfig config_from_json(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

}  // namespace trilingua
