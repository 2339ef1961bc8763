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

#include "trilingua/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace trilingua {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) {
      throw std::invalid_argument("unknown config key '" + where + key + "'");
    }
  }
}

const json& object_at(const json& j, const char* key) {
  const auto& v = j.at(key);
  if (!v.is_object()) {
    throw std::invalid_argument(std::string("config key '") + key + "' must be an object");
  }
  return v;
}

std::size_t positive(const json& j, const char* key, const std::string& where) {
  const auto v = j.at(key).get<std::int64_t>();
  if (v <= 0) {
    throw std::invalid_argument("config key '" + where + key + "' must be positive");
  }
  return static_cast<std::size_t>(v);
}

Lang lang_value(const std::string& code) {
  auto lang = parse_lang(code);
  if (!lang) {
    throw std::invalid_argument("unknown language code '" + code + "' in config");
  }
  return *lang;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

}  // namespace

void PipelineConfig::validate(bool need_embed) const {
  for (auto role : {BackendRole::translate_fwd, BackendRole::translate_rev, BackendRole::generate}) {
    auto it = endpoints.find(role);
    if (it == endpoints.end()) {
      throw std::invalid_argument("endpoint '" + std::string(to_string(role)) + "' is not configured");
    }
    it->second.validate();
  }
  if (need_embed) {
    auto it = endpoints.find(BackendRole::embed);
    if (it == endpoints.end()) {
      throw std::invalid_argument("endpoint 'embed' is not configured");
    }
    it->second.validate();
  }
  if (parallelism == 0) {
    throw std::invalid_argument("parallelism must be at least 1");
  }
  budgets.validate();
}

void PipelineConfig::point_all_endpoints_at(const std::string& base_url) {
  for (auto role : {BackendRole::translate_fwd, BackendRole::translate_rev, BackendRole::generate,
                    BackendRole::embed}) {
    auto& ep = endpoints[role];
    ep.role = role;
    ep.base_url = base_url;
  }
}

PipelineConfig config_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw std::invalid_argument("config must be a JSON object");
  }
  reject_unknown(j,
                 {"endpoints", "budgets", "parallelism", "checkpoint_path", "template_path", "tag_style",
                  "codes", "truncate_keep", "artifacts", "retry", "mock"},
                 "");

  PipelineConfig cfg;
  try {
    if (j.contains("endpoints")) {
      for (const auto& [name, ej] : object_at(j, "endpoints").items()) {
        auto role = parse_role(name);
        if (!role) {
          throw std::invalid_argument("unknown endpoint role '" + name + "'");
        }
        if (!ej.is_object()) {
          throw std::invalid_argument("endpoint '" + name + "' must be an object");
        }
        const std::string where = "endpoints." + name + ".";
        reject_unknown(ej, {"base_url", "timeout", "max_retries", "batch_size"}, where);
        BackendEndpoint ep;
        ep.role = *role;
        ep.base_url = ej.at("base_url").get<std::string>();
        if (ej.contains("timeout")) {
          ep.timeout_seconds = ej["timeout"].get<double>();
        }
        if (ej.contains("max_retries")) {
          const auto r = ej["max_retries"].get<std::int64_t>();
          if (r < 0) {
            throw std::invalid_argument("config key '" + where + "max_retries' must be >= 0");
          }
          ep.max_retries = static_cast<std::size_t>(r);
        }
        if (ej.contains("batch_size")) {
          ep.batch_size = positive(ej, "batch_size", where);
        }
        ep.validate();
        cfg.endpoints[*role] = ep;
      }
    }
    if (j.contains("budgets")) {
      const auto& bj = object_at(j, "budgets");
      reject_unknown(bj, {"translation_input_max", "translation_output_max", "generation_output_max"},
                     "budgets.");
      if (bj.contains("translation_input_max")) {
        cfg.budgets.translation_input_max = positive(bj, "translation_input_max", "budgets.");
      }
      if (bj.contains("translation_output_max")) {
        cfg.budgets.translation_output_max = positive(bj, "translation_output_max", "budgets.");
      }
      if (bj.contains("generation_output_max")) {
        cfg.budgets.generation_output_max = positive(bj, "generation_output_max", "budgets.");
      }
    }
    if (j.contains("parallelism")) {
      cfg.parallelism = positive(j, "parallelism", "");
    }
    if (j.contains("checkpoint_path")) {
      cfg.checkpoint_path = resolve(base_dir, j["checkpoint_path"].get<std::string>());
    }
    if (j.contains("template_path")) {
      cfg.template_path = resolve(base_dir, j["template_path"].get<std::string>());
    }
    if (j.contains("tag_style")) {
      const auto style = j["tag_style"].get<std::string>();
      if (style == "angle") {
        cfg.tags.style = TagStyle::angle;
      } else if (style == "prefix_code") {
        cfg.tags.style = TagStyle::prefix_code;
      } else {
        throw std::invalid_argument("tag_style must be \"angle\" or \"prefix_code\"");
      }
    }
    if (j.contains("codes")) {
      for (const auto& [code, backend] : object_at(j, "codes").items()) {
        cfg.tags.codes[lang_value(code)] = backend.get<std::string>();
      }
    }
    if (j.contains("truncate_keep")) {
      const auto keep = j["truncate_keep"].get<std::string>();
      if (keep == "head") {
        cfg.truncate_keep = TruncateKeep::head;
      } else if (keep == "tail") {
        cfg.truncate_keep = TruncateKeep::tail;
      } else {
        throw std::invalid_argument("truncate_keep must be \"head\" or \"tail\"");
      }
    }
    if (j.contains("artifacts")) {
      const auto& aj = object_at(j, "artifacts");
      reject_unknown(aj, {"strip_prefixes", "danda_languages"}, "artifacts.");
      if (aj.contains("strip_prefixes")) {
        cfg.artifacts.strip_prefixes = aj["strip_prefixes"].get<std::vector<std::string>>();
      }
      if (aj.contains("danda_languages")) {
        cfg.artifacts.danda_languages.clear();
        for (const auto& code : aj["danda_languages"].get<std::vector<std::string>>()) {
          cfg.artifacts.danda_languages.insert(lang_value(code));
        }
      }
    }
    if (j.contains("retry")) {
      const auto& rj = object_at(j, "retry");
      reject_unknown(rj, {"base_ms", "factor", "cap_ms", "jitter"}, "retry.");
      if (rj.contains("base_ms")) {
        cfg.retry.base = std::chrono::milliseconds(rj["base_ms"].get<std::int64_t>());
      }
      if (rj.contains("factor")) {
        cfg.retry.factor = rj["factor"].get<double>();
      }
      if (rj.contains("cap_ms")) {
        cfg.retry.cap = std::chrono::milliseconds(rj["cap_ms"].get<std::int64_t>());
      }
      if (rj.contains("jitter")) {
        cfg.retry.jitter = rj["jitter"].get<bool>();
      }
    }
    if (j.contains("mock")) {
      cfg.mock = behavior_from_json(object_at(j, "mock").dump());
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(path, "cannot open config");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return config_from_json(buf.str(), path.parent_path());
  } catch (const std::invalid_argument& e) {
    throw IoError(path, e.what());
  }
}

}  // namespace trilingua
