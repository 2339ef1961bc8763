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

#include <random>

#include "test_util.hpp"
#include "trilingua/preprocess.hpp"

namespace trilingua {
namespace {

using testing::make_record;

TEST(Normalize, CollapsesWhitespace) { EXPECT_EQ(normalize_text("a  b\t c"), "a b c"); }

TEST(Normalize, LeavesNormalizedTextAlone) {
  const std::string text = "Doctor: How are you?\nमरीज़: ठीक हूँ।";
  EXPECT_EQ(normalize_text(text), text);
}

// Expected bytes were produced by Python's unicodedata.normalize("NFC", ...).
TEST(Normalize, ComposesToNfcLikeReferenceOracle) {
  EXPECT_EQ(normalize_text("e\xCC\x81"), "\xC3\xA9");
  EXPECT_EQ(normalize_text("A\xCC\x8A"), "\xC3\x85");
  // U+0958 is a composition exclusion: NFC keeps KA + NUKTA decomposed.
  EXPECT_EQ(normalize_text("\xE0\xA5\x98"), "\xE0\xA4\x95\xE0\xA4\xBC");
  // Canonical reordering of combining marks before composition.
  EXPECT_EQ(normalize_text("a\xCC\x87\xCC\xA3"), "\xE1\xBA\xA1\xCC\x87");
}

TEST(Normalize, FoldsLineEndingsAndDropsInvisibles) {
  EXPECT_EQ(normalize_text("a\r\nb\rc"), "a\nb\nc");
  EXPECT_EQ(normalize_text("a\xE2\x80\x8B" "b\xEF\xBB\xBF"), "ab");  // ZWSP, BOM
  EXPECT_EQ(normalize_text("  x \x07 y  "), "x y");
  EXPECT_EQ(normalize_text("a\xC2\xA0" "b"), "a b");  // NBSP
}

TEST(Normalize, KeepsJoinersUsedByIndicScripts) {
  const std::string zwj = "\xE0\xA4\x95\xE0\xA5\x8D\xE2\x80\x8D\xE0\xA4\xB7";  // क्‍ष
  EXPECT_EQ(normalize_text(zwj), zwj);
}

TEST(NormalizeProperty, Idempotent) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> pieces = {"a", " ", "\t", "\n", "\r\n", "e\xCC\x81", "\xE0\xA5\x98",
                                           "\xE2\x80\x8B", "\xC2\xA0", "ताप", "\x01", "  ", "\xE2\x80\x8D"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string s;
    const auto n = rng() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      s += pieces[rng() % pieces.size()];
    }
    const auto once = normalize_text(s);
    EXPECT_EQ(normalize_text(once), once);
  }
}

TEST(Render, TwoTurns) {
  auto rec = make_record("r", Lang::en, {{"Doctor", "How are you?"}, {"Patient", "Fine."}},
                         {TaskKind::summary_text});
  const auto r = render_dialogue(rec);
  EXPECT_EQ(r.text, "Doctor: How are you?\nPatient: Fine.");
  ASSERT_EQ(r.turn_count(), 2u);
  EXPECT_EQ(r.turn_text(1), "Patient: Fine.");
}

TEST(Render, SingleTurnSpanCoversWholeText) {
  auto rec = make_record("r", Lang::en, {{"Doctor", "Hello there"}}, {TaskKind::summary_text});
  const auto r = render_dialogue(rec);
  ASSERT_EQ(r.turn_count(), 1u);
  EXPECT_EQ(r.turn_offsets[0].first, 0u);
  EXPECT_EQ(r.turn_offsets[0].second, r.text.size());
}

TEST(Render, EmptyUtteranceKeepsSpeaker) {
  auto rec = make_record("r", Lang::en, {{"Doctor", ""}, {"Patient", "ok"}}, {TaskKind::summary_text});
  EXPECT_EQ(render_dialogue(rec).text, "Doctor:\nPatient: ok");
}

TEST(RenderProperty, OffsetsPartitionText) {
  std::mt19937_64 rng(3);
  DialogueRecord rec = make_record("r", Lang::hi, {}, {TaskKind::summary_text});
  for (int i = 0; i < 50; ++i) {
    rec.turns.push_back({i % 2 ? "मरीज़" : "डॉक्टर", "वाक्य " + std::to_string(rng() % 1000) + " line\nbreak"});
  }
  const auto r = render_dialogue(rec);
  ASSERT_EQ(r.turn_count(), 50u);
  std::size_t pos = 0;
  std::size_t newline_count = 0;
  for (std::size_t i = 0; i < r.turn_count(); ++i) {
    EXPECT_EQ(r.turn_offsets[i].first, pos);
    EXPECT_EQ(r.turn_text(i).find('\n'), std::string_view::npos);
    pos = r.turn_offsets[i].second;
  }
  EXPECT_EQ(pos, r.text.size());
  for (char c : r.text) {
    newline_count += c == '\n';
  }
  EXPECT_EQ(newline_count, 49u);
}

TEST(ApproxTokens, Examples) {
  EXPECT_EQ(approx_token_count(""), 0u);
  EXPECT_EQ(approx_token_count("a b c"), 3u);
  EXPECT_EQ(approx_token_count("internationalization"), 5u);
  EXPECT_EQ(approx_token_count("  \n\t "), 0u);
  EXPECT_EQ(approx_token_count("नमस्ते"), 2u);  // 6 code points
}

// Builds a dialogue of `turns` lines, each exactly `tokens_per_turn` approximate tokens.
RenderedDialogue uniform_dialogue(std::size_t turns, std::size_t tokens_per_turn) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < turns; ++i) {
    std::string line = "T" + std::to_string(i) + ":";
    for (std::size_t k = 1; k < tokens_per_turn; ++k) {
      line += " ab";
    }
    lines.push_back(line);
  }
  return assemble_lines(lines);
}

TEST(Truncate, UnderBudgetUnchanged) {
  const auto d = uniform_dialogue(4, 25);
  ASSERT_EQ(d.approx_tokens, 100u);
  const auto out = truncate_to_budget(d, 2048);
  EXPECT_FALSE(out.truncated);
  EXPECT_EQ(out.dialogue, d);
  EXPECT_FALSE(out.diagnostic);
}

TEST(Truncate, KeepsSixOfTenTurns) {
  const auto d = uniform_dialogue(10, 300);
  ASSERT_EQ(d.approx_tokens, 3000u);
  const auto out = truncate_to_budget(d, 2048);
  EXPECT_TRUE(out.truncated);
  ASSERT_EQ(out.dialogue.turn_count(), 6u);
  EXPECT_EQ(out.dialogue.approx_tokens, 1800u);
  EXPECT_EQ(out.dialogue.turn_text(5), d.turn_text(5));
  EXPECT_FALSE(out.diagnostic);
}

TEST(Truncate, TailModeKeepsLastTurns) {
  const auto d = uniform_dialogue(10, 300);
  const auto out = truncate_to_budget(d, 2048, TruncateKeep::tail);
  ASSERT_EQ(out.dialogue.turn_count(), 6u);
  EXPECT_EQ(out.dialogue.turn_text(0), d.turn_text(4));
  EXPECT_EQ(out.dialogue.turn_text(5), d.turn_text(9));
}

TEST(Truncate, SingleHugeTurnIsSplitWithDiagnostic) {
  const auto d = uniform_dialogue(1, 3000);
  const auto out = truncate_to_budget(d, 2048);
  EXPECT_TRUE(out.truncated);
  ASSERT_TRUE(out.diagnostic);
  EXPECT_EQ(out.diagnostic->code, "turn_split");
  EXPECT_LE(approx_token_count(out.dialogue.text), 2048u);
  EXPECT_GT(approx_token_count(out.dialogue.text), 2000u);
  EXPECT_EQ(d.text.substr(0, out.dialogue.text.size()), out.dialogue.text);
}

TEST(TruncateProperty, OverBudgetFixturesLandOnTurnBoundaries) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::size_t> sizes(1 + rng() % 15);
    for (auto& s : sizes) {
      s = 1 + rng() % 700;
    }
    std::vector<std::string> lines;
    for (auto s : sizes) {
      lines.push_back(uniform_dialogue(1, s).text);
    }
    const auto d = assemble_lines(lines);
    const std::size_t budget = 2048;
    const auto out = truncate_to_budget(d, budget);
    EXPECT_LE(out.dialogue.approx_tokens, budget);
    if (d.approx_tokens <= budget) {
      EXPECT_FALSE(out.truncated);
      EXPECT_EQ(out.dialogue, d);
      continue;
    }
    EXPECT_TRUE(out.truncated);
    if (out.diagnostic) {
      EXPECT_EQ(out.diagnostic->code, "turn_split");
      continue;
    }
    // Head mode: the kept text is a whole-turn prefix of the original.
    const auto k = out.dialogue.turn_count();
    ASSERT_GE(k, 1u);
    for (std::size_t i = 0; i < k; ++i) {
      EXPECT_EQ(out.dialogue.turn_text(i), d.turn_text(i));
    }
    // The next turn would not have fit.
    ASSERT_LT(k, d.turn_count());
    EXPECT_GT(out.dialogue.approx_tokens + approx_token_count(d.turn_text(k)), budget);
  }
}

TEST(CutToBudget, FallsBackToCodePointsForOneLongRun) {
  const std::string run(40, 'x');
  EXPECT_EQ(cut_to_budget(run, 3), std::string(12, 'x'));
  EXPECT_EQ(cut_to_budget("ab cd ef", 2), "ab cd");
}

TEST(LanguageTag, AngleStyle) {
  EXPECT_EQ(apply_language_tag("नमस्ते", Lang::hi, Lang::en), "<2en> नमस्ते");
  EXPECT_EQ(apply_language_tag("Hello", Lang::en, Lang::hi), "<2hi> Hello");
}

TEST(LanguageTag, PrefixCodeFromMap) {
  TagMap tags;
  tags.style = TagStyle::prefix_code;
  tags.codes[Lang::en] = "eng_Latn";
  EXPECT_EQ(apply_language_tag("Hello", Lang::hi, Lang::en, tags), "eng_Latn Hello");
  EXPECT_EQ(apply_language_tag("x", Lang::en, Lang::ta, tags), "ta x");
}

TEST(LanguageTag, SameLanguageIsRejected) {
  EXPECT_THROW(apply_language_tag("x", Lang::en, Lang::en), std::invalid_argument);
}

TEST(StageBudgetTest, DefaultsAndValidation) {
  StageBudget b;
  EXPECT_EQ(b.translation_input_max, 2048u);
  EXPECT_EQ(b.translation_output_max, 2048u);
  EXPECT_EQ(b.generation_output_max, 3000u);
  EXPECT_NO_THROW(b.validate());
  b.generation_output_max = 0;
  EXPECT_THROW(b.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace trilingua
