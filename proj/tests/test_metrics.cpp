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

#include <cmath>
#include <random>

#include "table_fixture.hpp"
#include "test_util.hpp"
#include "trilingua/metrics.hpp"

namespace trilingua {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, EnglishDropsArticlesAndPunctuation) {
  EXPECT_EQ(metric_tokenize("The patient has Fever.", true), (Tokens{"patient", "has", "fever"}));
  EXPECT_TRUE(metric_tokenize("", true).empty());
  EXPECT_EQ(metric_tokenize("3 days", true), (Tokens{"3", "days"}));
  EXPECT_EQ(metric_tokenize("An apple, a day!", true), (Tokens{"apple", "day"}));
}

TEST(Tokenize, IndicKeepsEverythingButPunctuation) {
  EXPECT_EQ(metric_tokenize("मरीज़ को बुखार है।", false), (Tokens{"मरीज़", "को", "बुखार", "है"}));
  EXPECT_EQ(metric_tokenize("The a an", false), (Tokens{"the", "a", "an"}));
  EXPECT_EQ(metric_tokenize("10:30 \"quoted\"", false), (Tokens{"10:30", "quoted"}));
}

TEST(TokenF1, Examples) {
  EXPECT_DOUBLE_EQ(token_f1(Tokens{"a", "b"}, Tokens{"a", "b"}), 1.0);
  EXPECT_NEAR(token_f1(Tokens{"patient", "has", "fever"}, Tokens{"patient", "has", "fever", "rash"}), 6.0 / 7.0,
              1e-12);
  EXPECT_NEAR(token_f1(Tokens{"patient", "has", "fever"}, Tokens{"patient", "has", "fever", "rash"}), 0.8571, 1e-4);
  EXPECT_DOUBLE_EQ(token_f1(Tokens{}, Tokens{"x"}), 0.0);
  EXPECT_DOUBLE_EQ(token_f1(Tokens{"x"}, Tokens{}), 0.0);
  EXPECT_DOUBLE_EQ(token_f1(Tokens{}, Tokens{}), 1.0);
  EXPECT_DOUBLE_EQ(token_f1(Tokens{"a"}, Tokens{"b"}), 0.0);
}

TEST(TokenF1, BagSemanticsCountRepeatsOnce) {
  // pred has "a" twice, gold once: overlap 1, P = 1/2, R = 1.
  EXPECT_NEAR(token_f1(Tokens{"a", "a"}, Tokens{"a"}), 2.0 / 3.0, 1e-12);
}

TEST(TokenF1Property, Symmetric) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    Tokens a(rng() % 6);
    Tokens b(rng() % 6);
    for (auto& t : a) t = std::string(1, static_cast<char>('a' + rng() % 4));
    for (auto& t : b) t = std::string(1, static_cast<char>('a' + rng() % 4));
    EXPECT_DOUBLE_EQ(token_f1(a, b), token_f1(b, a));
  }
}

TEST(EmbedF1, SelfMatch) {
  std::vector<Embedding> v = {{1, 0}, {0.6, 0.8}};
  const auto s = greedy_embed_f1(v, v);
  EXPECT_NEAR(s.precision, 1.0, 1e-9);
  EXPECT_NEAR(s.recall, 1.0, 1e-9);
  EXPECT_NEAR(s.f, 1.0, 1e-9);
}

TEST(EmbedF1, Orthogonal) {
  const auto s = greedy_embed_f1(std::vector<Embedding>{{1, 0}}, std::vector<Embedding>{{0, 1}});
  EXPECT_NEAR(s.precision, 0.0, 1e-9);
  EXPECT_NEAR(s.recall, 0.0, 1e-9);
  EXPECT_NEAR(s.f, 0.0, 1e-9);
}

TEST(EmbedF1, TwoByOneExample) {
  const auto s = greedy_embed_f1(std::vector<Embedding>{{1, 0}, {0, 1}}, std::vector<Embedding>{{1, 0}});
  EXPECT_NEAR(s.precision, 0.5, 1e-12);
  EXPECT_NEAR(s.recall, 1.0, 1e-12);
  EXPECT_NEAR(s.f, 2.0 / 3.0, 1e-9);
}

TEST(EmbedF1, ZeroVectorScoresZero) {
  const auto s = greedy_embed_f1(std::vector<Embedding>{{0, 0}}, std::vector<Embedding>{{1, 0}});
  EXPECT_DOUBLE_EQ(s.f, 0.0);
}

TEST(EmbedF1, OppositeSignsGiveZeroF) {
  // Candidate vectors all point away from the reference: P < 0 and R < 0.
  const auto s = greedy_embed_f1(std::vector<Embedding>{{-1, 0}}, std::vector<Embedding>{{1, 0}});
  EXPECT_NEAR(s.precision, -1.0, 1e-12);
  EXPECT_NEAR(s.f, -1.0, 1e-12);
  const auto mixed = greedy_embed_f1(std::vector<Embedding>{{1, 0}, {-1, 0}}, std::vector<Embedding>{{-1, 0.01}});
  EXPECT_GE(mixed.f, -1.0);
  EXPECT_LE(mixed.f, 1.0);
}

TEST(EmbedF1, RejectsBadShapes) {
  EXPECT_THROW(greedy_embed_f1(std::vector<Embedding>{}, std::vector<Embedding>{{1}}), std::invalid_argument);
  EXPECT_THROW(greedy_embed_f1(std::vector<Embedding>{{1, 0}}, std::vector<Embedding>{{1}}), std::invalid_argument);
}

TEST(WinRateTest, ReferenceCells) {
  const std::vector<std::tuple<std::size_t, std::string>> cells = {
      {13, "86.7%"}, {12, "80.0%"}, {11, "73.3%"}, {10, "66.7%"}, {9, "60.0%"},
      {8, "53.3%"},  {7, "46.7%"},  {2, "13.3%"},  {0, "0.0%"},   {15, "100.0%"}};
  for (const auto& [w, text] : cells) {
    EXPECT_EQ(win_rate(w, 15).str(), text) << w;
  }
  EXPECT_DOUBLE_EQ(win_rate(13, 15).percent(), 86.7);
}

TEST(WinRateTest, RoundsHalfUp) {
  EXPECT_EQ(win_rate(1, 8).str(), "12.5%");
  EXPECT_EQ(win_rate(1, 16).str(), "6.3%");  // 6.25 -> 6.3
  EXPECT_EQ(win_rate(1, 3).str(), "33.3%");
  EXPECT_EQ(win_rate(2, 3).str(), "66.7%");
}

TEST(WinRateTest, Preconditions) {
  EXPECT_THROW(win_rate(1, 0), std::invalid_argument);
  EXPECT_THROW(win_rate(4, 3), std::invalid_argument);
}

TEST(WinRateProperty, ComplementsSumToHundred) {
  for (std::size_t t = 1; t <= 60; ++t) {
    for (std::size_t w = 0; w <= t; ++w) {
      const double sum = win_rate(w, t).percent() + win_rate(t - w, t).percent();
      EXPECT_GE(sum, 99.9);
      EXPECT_LE(sum, 100.1);
    }
  }
}

TEST(Report, MarathiRowInPlainFormat) {
  const auto judgments = testing::table1_judgments();
  ReportOptions opts;
  opts.format = ReportFormat::plain;
  const auto report = render_report(judgments, {}, opts);
  EXPECT_NE(report.find("Marathi & 86.7% & 60.0% & 60.0%\n"), std::string::npos) << report;
}

TEST(Report, ReproducesReferenceTableOrder) {
  ReportOptions opts;
  opts.format = ReportFormat::plain;
  const auto report = render_report(testing::table1_judgments(), {}, opts);
  std::string expected = "Win rates\n\nLanguage & QnA & Summary (Text) & Summary (KnV)\n";
  for (const auto& row : testing::table1_rows()) {
    expected += row + "\n";
  }
  EXPECT_EQ(report.substr(0, expected.size()), expected);
}

TEST(Report, TiesCountAsLossesUnlessExcluded) {
  std::vector<Judgment> j = {{"a", Lang::hi, TaskKind::qna, Outcome::win},
                             {"b", Lang::hi, TaskKind::qna, Outcome::tie}};
  auto tally = tally_judgments(j);
  EXPECT_EQ(tally[CellKey(Lang::hi, TaskKind::qna)].total, 2u);
  tally = tally_judgments(j, TieRule::exclude);
  EXPECT_EQ(tally[CellKey(Lang::hi, TaskKind::qna)].total, 1u);
  EXPECT_EQ(tally[CellKey(Lang::hi, TaskKind::qna)].wins, 1u);
}

TEST(Report, EmptyInputsGiveHeadersOnly) {
  const auto md = render_report({}, {});
  EXPECT_EQ(md,
            "## Win rates\n\n| Language | QnA | Summary (Text) | Summary (KnV) |\n|---|---|---|---|\n\n"
            "## Automatic metrics (F1 / BERT)\n\n| Language | QnA | Summary (Text) | Summary (KnV) |\n"
            "|---|---|---|---|\n");
}

TEST(Report, MetricCellAndMissingCells) {
  std::vector<ScoreRow> scores = {{Lang::en, TaskKind::qna, 0.668, 0.850}};
  const auto md = render_report({}, scores);
  EXPECT_NE(md.find("| English | 0.668 / 0.850 | — | — |"), std::string::npos) << md;
}

TEST(Judgments, LoadAndRejectDuplicates) {
  testing::TempDir dir;
  testing::write_file(dir / "j.jsonl",
                      R"({"record_id":"r1","language":"mr","task":"qna","outcome":"win"})"
                      "\n"
                      R"({"record_id":"r2","language":"mr","task":"qna","outcome":"tie"})"
                      "\n");
  const auto j = load_judgments(dir / "j.jsonl");
  ASSERT_EQ(j.size(), 2u);
  EXPECT_EQ(j[1].outcome, Outcome::tie);
  testing::write_file(dir / "d.jsonl",
                      R"({"record_id":"r1","language":"mr","task":"qna","outcome":"win"})"
                      "\n"
                      R"({"record_id":"r1","language":"mr","task":"qna","outcome":"loss"})"
                      "\n");
  EXPECT_THROW(load_judgments(dir / "d.jsonl"), CorpusError);
  testing::write_file(dir / "b.jsonl", R"({"record_id":"r1","language":"mr","task":"qna","outcome":"draw"})");
  EXPECT_THROW(load_judgments(dir / "b.jsonl"), CorpusError);
}

TEST(Scores, RoundTripAndRangeCheck) {
  testing::TempDir dir;
  std::vector<ScoreRow> rows = {{Lang::en, TaskKind::qna, 0.668, 0.85}, {Lang::hi, TaskKind::summary_knv, 0.4, std::nullopt}};
  write_scores(dir / "s.jsonl", rows);
  EXPECT_EQ(load_scores(dir / "s.jsonl"), rows);
  testing::write_file(dir / "bad.jsonl", R"({"language":"en","task":"qna","f1":1.5})");
  EXPECT_THROW(load_scores(dir / "bad.jsonl"), CorpusError);
}

}  // namespace
}  // namespace trilingua
