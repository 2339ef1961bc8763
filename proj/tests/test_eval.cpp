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

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "trilingua/eval.hpp"

namespace trilingua {
namespace {

PipelineResult prediction(std::string id, Lang lang, TaskKind task, std::optional<std::size_t> q,
                          std::optional<std::string> final_text) {
  PipelineResult r;
  r.id = std::move(id);
  r.lang = lang;
  r.outputs.push_back({task, q, final_text ? std::optional<std::string>("en") : std::nullopt, final_text});
  return r;
}

TEST(Eval, TokenF1PerItemAndAggregate) {
  std::vector<PipelineResult> preds = {
      prediction("a", Lang::en, TaskKind::qna, 0, "The patient has fever"),
      prediction("b", Lang::en, TaskKind::qna, 0, "rash"),
      prediction("c", Lang::hi, TaskKind::summary_text, std::nullopt, "बुखार है"),
  };
  std::vector<GoldItem> gold = {
      {"a", TaskKind::qna, 0, "patient has fever rash"},
      {"b", TaskKind::qna, 0, "fever"},
      {"c", TaskKind::summary_text, std::nullopt, "बुखार है"},
  };
  const auto report = evaluate(preds, gold, nullptr);
  ASSERT_EQ(report.items.size(), 3u);
  EXPECT_NEAR(report.items[0].f1, 6.0 / 7.0, 1e-12);
  EXPECT_DOUBLE_EQ(report.items[1].f1, 0.0);
  EXPECT_DOUBLE_EQ(report.items[2].f1, 1.0);
  EXPECT_FALSE(report.items[0].bert);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].language, Lang::en);
  EXPECT_NEAR(report.rows[0].f1, 3.0 / 7.0, 1e-12);
  EXPECT_FALSE(report.rows[0].bert_f);
  EXPECT_EQ(report.missing, 0u);
}

TEST(Eval, MissingPredictionsScoreZeroAndAreCounted) {
  std::vector<PipelineResult> preds = {prediction("a", Lang::ta, TaskKind::qna, 0, std::nullopt)};
  std::vector<GoldItem> gold = {{"a", TaskKind::qna, 0, "x"}, {"zzz", TaskKind::qna, 0, "y"}};
  const auto report = evaluate(preds, gold, nullptr);
  EXPECT_EQ(report.missing, 2u);
  ASSERT_EQ(report.items.size(), 1u);
  EXPECT_DOUBLE_EQ(report.items[0].f1, 0.0);
}

TEST(Eval, EmbeddingScoresViaEmbedBackend) {
  MockServer server(MockBehavior{});
  BackendEndpoint ep;
  ep.role = BackendRole::embed;
  ep.base_url = server.base_url();
  BackendClient embedder(ep, testing::fast_retry());
  std::vector<PipelineResult> preds = {prediction("a", Lang::en, TaskKind::qna, 0, "fever rash"),
                                       prediction("b", Lang::en, TaskKind::summary_knv, std::nullopt, "")};
  std::vector<GoldItem> gold = {{"a", TaskKind::qna, 0, "rash fever"},
                                {"b", TaskKind::summary_knv, std::nullopt, "Fever: yes"}};
  const auto report = evaluate(preds, gold, &embedder);
  ASSERT_TRUE(report.items[0].bert);
  EXPECT_NEAR(report.items[0].bert->f, 1.0, 1e-9);
  ASSERT_TRUE(report.items[1].bert);
  EXPECT_DOUBLE_EQ(report.items[1].bert->f, 0.0);
  ASSERT_TRUE(report.rows[0].bert_f);
  EXPECT_EQ(server.count("/v1/embed"), 2u);  // the empty prediction never reaches the backend
}

TEST(Eval, GoldFileParsing) {
  testing::TempDir dir;
  testing::write_file(dir / "g.jsonl",
                      R"({"id":"a","task":"qna","question_index":1,"reference":"x"})"
                      "\n\n"
                      R"({"id":"b","task":"summary_text","reference":"y"})"
                      "\n");
  const auto gold = load_gold(dir / "g.jsonl");
  ASSERT_EQ(gold.size(), 2u);
  EXPECT_EQ(gold[0].question_index, 1u);
  EXPECT_FALSE(gold[1].question_index);
  testing::write_file(dir / "bad.jsonl", R"({"id":"a","task":"poem","reference":"x"})");
  EXPECT_THROW(load_gold(dir / "bad.jsonl"), CorpusError);
}

}  // namespace
}  // namespace trilingua
