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

#include "trilingua/eval.hpp"

#include <fstream>
#include <map>
#include <tuple>

#include "json.hpp"

namespace trilingua {

using nlohmann::ordered_json;

namespace {

EmbedScore embed_score(const BackendClient& embedder, const std::vector<std::string>& cand,
                       const std::vector<std::string>& ref) {
  if (cand.empty() && ref.empty()) {
    return {1.0, 1.0, 1.0};
  }
  if (cand.empty() || ref.empty()) {
    return {0.0, 0.0, 0.0};
  }
  const auto cv = embedder.embed(cand);
  const auto rv = embedder.embed(ref);
  return greedy_embed_f1(cv, rv);
}

}  // namespace

std::vector<GoldItem> load_gold(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(path, "cannot open gold file");
  }
  std::vector<GoldItem> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    auto j = ordered_json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw CorpusError(line_no, "invalid JSON");
    }
    try {
      GoldItem g;
      g.id = j.at("id").get<std::string>();
      auto task = parse_task(j.at("task").get<std::string>());
      if (!task) {
        throw CorpusError(line_no, "unknown task");
      }
      g.task = *task;
      if (j.contains("question_index") && !j["question_index"].is_null()) {
        g.question_index = j["question_index"].get<std::size_t>();
      }
      g.reference = j.at("reference").get<std::string>();
      out.push_back(std::move(g));
    } catch (const nlohmann::json::exception&) {
      throw CorpusError(line_no, "missing or malformed field");
    }
  }
  return out;
}

EvalReport evaluate(std::span<const PipelineResult> predictions, std::span<const GoldItem> gold,
                    const BackendClient* embedder) {
  std::map<std::string, const PipelineResult*> by_id;
  for (const auto& p : predictions) {
    by_id[p.id] = &p;
  }

  EvalReport report;
  struct Sum {
    double f1 = 0.0;
    double bert = 0.0;
    std::size_t n = 0;
  };
  std::map<CellKey, Sum> sums;

  for (const auto& g : gold) {
    auto rec = by_id.find(g.id);
    if (rec == by_id.end()) {
      ++report.missing;
      continue;
    }
    const auto& result = *rec->second;
    std::string prediction;
    bool found = false;
    for (const auto& out : result.outputs) {
      if (out.task == g.task && out.question_index == g.question_index && out.final_text) {
        prediction = *out.final_text;
        found = true;
        break;
      }
    }
    if (!found) {
      ++report.missing;
    }
    const bool english = result.lang == Lang::en;
    const auto pred_tokens = metric_tokenize(prediction, english);
    const auto gold_tokens = metric_tokenize(g.reference, english);

    EvalItem item{g.id, result.lang, g.task, g.question_index, token_f1(pred_tokens, gold_tokens), std::nullopt};
    if (embedder) {
      item.bert = embed_score(*embedder, pred_tokens, gold_tokens);
    }
    auto& s = sums[{item.language, item.task}];
    s.f1 += item.f1;
    s.bert += item.bert ? item.bert->f : 0.0;
    ++s.n;
    report.items.push_back(std::move(item));
  }

  for (const auto& [key, s] : sums) {
    ScoreRow row{key.first, key.second, s.f1 / static_cast<double>(s.n), std::nullopt};
    if (embedder) {
      row.bert_f = s.bert / static_cast<double>(s.n);
    }
    report.rows.push_back(row);
  }
  return report;
}

std::string eval_item_to_json_line(const EvalItem& item) {
  ordered_json j;
  j["id"] = item.id;
  j["language"] = to_string(item.language);
  j["task"] = to_string(item.task);
  if (item.question_index) {
    j["question_index"] = *item.question_index;
  }
  j["f1"] = item.f1;
  if (item.bert) {
    j["bert_p"] = item.bert->precision;
    j["bert_r"] = item.bert->recall;
    j["bert_f"] = item.bert->f;
  }
  return j.dump();
}

}  // namespace trilingua
