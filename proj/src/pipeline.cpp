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

#include "trilingua/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <thread>

#include "text_util.hpp"
#include "trilingua/postprocess.hpp"
#include "trilingua/preprocess.hpp"

namespace trilingua {

namespace {

using Clock = std::chrono::steady_clock;

std::size_t char_count(std::string_view s) {
  std::size_t n = 0;
  for (char ch : s) {
    if (!detail::is_utf8_continuation(ch)) {
      ++n;
    }
  }
  return n;
}

std::chrono::microseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start);
}

bool is_terminal(char ch) { return ch == '.' || ch == '!' || ch == '?'; }
bool is_closer(char ch) { return ch == '"' || ch == '\'' || ch == ')' || ch == ']'; }

std::string single_line(std::string text) {
  for (auto& ch : text) {
    if (ch == '\n') {
      ch = ' ';
    }
  }
  return normalize_text(text);
}

// Reverse translation works on a layout: literal text interleaved with
// references to translatable items. Filling the items back in reproduces the
// document with translated content.
struct Piece {
  std::string literal;
  std::optional<std::size_t> item;
};

struct Layout {
  std::vector<Piece> pieces;

  void literal(std::string_view s) { pieces.push_back({std::string(s), std::nullopt}); }
  void item(std::vector<std::string>& items, std::string_view s) {
    pieces.push_back({{}, items.size()});
    items.emplace_back(s);
  }

  std::string fill(const std::vector<std::string>& translated) const {
    std::string out;
    for (const auto& p : pieces) {
      out += p.item ? translated.at(*p.item) : p.literal;
    }
    return out;
  }
};

void layout_sentences(Layout& layout, std::vector<std::string>& items, std::string_view line) {
  bool first = true;
  for (const auto& sentence : sentence_split(line)) {
    if (!first) {
      layout.literal(" ");
    }
    layout.item(items, sentence);
    first = false;
  }
}

Layout layout_text(std::string_view text, std::vector<std::string>& items) {
  Layout layout;
  bool first = true;
  for (auto line : detail::split_lines(text)) {
    if (!first) {
      layout.literal("\n");
    }
    first = false;
    layout_sentences(layout, items, line);
  }
  return layout;
}

// KnV documents translate keys and values as separate items so the
// "Key: Value" shape survives translation. Lines that are not pair lines are
// translated sentence by sentence in place.
Layout layout_knv(std::string_view text, std::vector<std::string>& items, const KnVDoc& doc,
                  std::vector<std::size_t>& key_items) {
  std::map<std::size_t, const KnVPair*> pair_lines;
  for (const auto& p : doc.pairs) {
    pair_lines[p.line_no] = &p;
  }
  Layout layout;
  std::size_t line_no = 0;
  for (auto line : detail::split_lines(text)) {
    if (line_no > 0) {
      layout.literal("\n");
    }
    ++line_no;
    auto it = pair_lines.find(line_no);
    if (it == pair_lines.end()) {
      layout_sentences(layout, items, line);
      continue;
    }
    const auto trimmed = detail::trim(line);
    const auto value = detail::trim(trimmed.substr(trimmed.find(':') + 1));
    key_items.push_back(items.size());
    layout.item(items, it->second->key);
    if (value.empty()) {
      layout.literal(":");
    } else {
      layout.literal(": ");
      layout.item(items, value);
    }
  }
  return layout;
}

}  // namespace

std::vector<std::string> sentence_split(std::string_view english_text) {
  std::vector<std::string> out;
  for (auto line : detail::split_lines(english_text)) {
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < line.size()) {
      if (!is_terminal(line[i])) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < line.size() && (is_terminal(line[j]) || is_closer(line[j]))) {
        ++j;
      }
      if (j < line.size() && !detail::is_ascii_space(line[j])) {
        i = j;
        continue;
      }
      if (line[i] == '.' && j == i + 1) {
        std::size_t token_start = i;
        while (token_start > start && !detail::is_ascii_space(line[token_start - 1])) {
          --token_start;
        }
        if (is_abbreviation(line.substr(token_start, i + 1 - token_start))) {
          i = j;
          continue;
        }
      }
      auto sentence = detail::trim(line.substr(start, j - start));
      if (!sentence.empty()) {
        out.emplace_back(sentence);
      }
      start = j;
      i = j;
    }
    auto rest = detail::trim(line.substr(start));
    if (!rest.empty()) {
      out.emplace_back(rest);
    }
  }
  return out;
}

Pipeline::Pipeline(PipelineConfig config)
    : config_((config.validate(), std::move(config))),
      prompts_(config_.template_path ? PromptSet::load(*config_.template_path) : PromptSet::defaults()),
      translate_fwd_(config_.endpoints.at(BackendRole::translate_fwd), config_.retry,
                     config_.budgets.translation_output_max),
      translate_rev_(config_.endpoints.at(BackendRole::translate_rev), config_.retry,
                     config_.budgets.translation_output_max),
      generate_(config_.endpoints.at(BackendRole::generate), config_.retry,
                config_.budgets.generation_output_max) {}

std::filesystem::path Pipeline::checkpoint_for(const std::filesystem::path& out) const {
  if (!config_.checkpoint_path.empty()) {
    return config_.checkpoint_path;
  }
  auto p = out;
  p += ".checkpoint";
  return p;
}

PipelineResult Pipeline::run_record(const DialogueRecord& record) const {
  const auto& budgets = config_.budgets;
  const bool english = record.lang == Lang::en;
  const std::string fwd_stage(to_string(Stage::forward_translate));
  const std::string gen_stage(to_string(Stage::generate));
  const std::string rev_stage(to_string(Stage::reverse_translate));

  PipelineResult result;
  result.id = record.id;
  result.lang = record.lang;

  for (std::size_t i = 0; i < record.turns.size(); ++i) {
    if (normalize_text(record.turns[i].utterance).empty()) {
      result.diagnostics.push_back({"ingest", "empty_utterance",
                                    "turn " + std::to_string(i + 1) + " (" + record.turns[i].speaker +
                                        ") has an empty utterance"});
    }
  }

  // One output slot per task, and per question for QnA.
  for (auto task : record.tasks) {
    if (task == TaskKind::qna) {
      for (std::size_t q = 0; q < record.questions.size(); ++q) {
        result.outputs.push_back({task, q, std::nullopt, std::nullopt});
      }
    } else {
      result.outputs.push_back({task, std::nullopt, std::nullopt, std::nullopt});
    }
  }

  // Stage 1: render, truncate, translate dialogue and questions to English.
  auto start = Clock::now();
  const auto rendered = render_dialogue(record);
  auto cut = truncate_to_budget(rendered, budgets.translation_input_max, config_.truncate_keep);
  result.truncated = cut.truncated;
  if (cut.truncated) {
    result.diagnostics.push_back(
        {fwd_stage, "truncated",
         "dialogue cut from " + std::to_string(rendered.approx_tokens) + " to " +
             std::to_string(cut.dialogue.approx_tokens) + " approx tokens; kept " +
             std::to_string(cut.dialogue.turn_count()) + " of " + std::to_string(rendered.turn_count()) +
             " turns"});
  }
  if (cut.diagnostic) {
    result.diagnostics.push_back(*cut.diagnostic);
  }

  std::vector<std::string> sources = {cut.dialogue.text};
  for (std::size_t q = 0; q < record.questions.size(); ++q) {
    auto question = single_line(record.questions[q]);
    if (approx_token_count(question) > budgets.translation_input_max) {
      question = cut_to_budget(question, budgets.translation_input_max);
      result.truncated = true;
      result.diagnostics.push_back({fwd_stage, "truncated", "question " + std::to_string(q + 1) + " cut to budget"});
    }
    sources.push_back(std::move(question));
  }

  StageTrace fwd{Stage::forward_translate, std::nullopt, sources.size()};
  for (const auto& s : sources) {
    fwd.input_chars += char_count(s);
  }
  fwd.truncated = result.truncated;
  fwd.bypass = english;

  std::vector<std::string> english_sources;
  if (english) {
    english_sources = sources;
  } else {
    std::vector<std::string> tagged;
    tagged.reserve(sources.size());
    for (const auto& s : sources) {
      tagged.push_back(apply_language_tag(s, record.lang, Lang::en, config_.tags));
    }
    try {
      english_sources = translate_fwd_.translate(tagged, record.lang, Lang::en,
                                                 DecodingPolicy{budgets.translation_output_max});
    } catch (const std::exception& e) {
      result.diagnostics.push_back({fwd_stage, "backend_error", e.what()});
      fwd.duration = since(start);
      result.traces.push_back(fwd);
      return result;
    }
    for (auto& s : english_sources) {
      s = normalize_text(s);
    }
  }
  for (const auto& s : english_sources) {
    fwd.output_chars += char_count(s);
  }
  fwd.duration = since(start);
  result.traces.push_back(fwd);

  const std::string& english_dialogue = english_sources.front();
  auto english_question = [&](std::size_t q) -> std::string {
    return single_line(english_sources.at(q + 1));
  };

  // Stage 2: one generation per output slot, traced per task.
  for (auto task : record.tasks) {
    start = Clock::now();
    StageTrace gen{Stage::generate, task};
    for (auto& out : result.outputs) {
      if (out.task != task) {
        continue;
      }
      std::string prompt;
      if (out.question_index) {
        prompt = prompts_.build(task, english_dialogue, english_question(*out.question_index), record.id);
      } else {
        prompt = prompts_.build(task, english_dialogue, std::nullopt, record.id);
      }
      ++gen.items;
      gen.input_chars += char_count(prompt);
      try {
        auto completion = generate_.generate(prompt, DecodingPolicy{budgets.generation_output_max});
        if (detail::trim(completion).empty()) {
          result.diagnostics.push_back({gen_stage, "empty_generation",
                                        std::string(to_string(task)) + ": backend returned an empty completion"});
        }
        gen.output_chars += char_count(completion);
        out.english_intermediate = std::move(completion);
      } catch (const std::exception& e) {
        result.diagnostics.push_back({gen_stage, "backend_error", std::string(to_string(task)) + ": " + e.what()});
      }
    }
    gen.duration = since(start);
    result.traces.push_back(gen);
  }

  // Stage 3: clean, split and translate back in one batch.
  start = Clock::now();
  StageTrace rev;
  rev.stage = Stage::reverse_translate;
  rev.bypass = english;

  if (english) {
    for (auto& out : result.outputs) {
      if (out.english_intermediate) {
        out.final_text = clean_artifacts(*out.english_intermediate, Lang::en, config_.artifacts);
        ++rev.items;
        rev.input_chars += char_count(*out.english_intermediate);
        rev.output_chars += char_count(*out.final_text);
      }
    }
    rev.duration = since(start);
    result.traces.push_back(rev);
    return result;
  }

  std::vector<std::string> items;
  std::vector<std::pair<TaskOutput*, Layout>> layouts;
  std::vector<std::size_t> key_items;
  for (auto& out : result.outputs) {
    if (!out.english_intermediate) {
      continue;
    }
    const auto cleaned = clean_artifacts(*out.english_intermediate, Lang::en, config_.artifacts);
    if (out.task == TaskKind::summary_knv) {
      const auto doc = parse_knv(cleaned);
      for (const auto& d : doc.diagnostics) {
        result.diagnostics.push_back({rev_stage, d.code, "line " + std::to_string(d.line_no) + ": " + d.raw_line});
      }
      layouts.emplace_back(&out, layout_knv(cleaned, items, doc, key_items));
    } else {
      layouts.emplace_back(&out, layout_text(cleaned, items));
    }
  }
  rev.items = items.size();

  std::vector<std::string> tagged;
  tagged.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    rev.input_chars += char_count(items[i]);
    if (approx_token_count(items[i]) > budgets.translation_input_max) {
      items[i] = cut_to_budget(items[i], budgets.translation_input_max);
      result.diagnostics.push_back({rev_stage, "item_truncated", "item " + std::to_string(i + 1) + " cut to budget"});
      rev.truncated = true;
    }
    tagged.push_back(apply_language_tag(items[i], Lang::en, record.lang, config_.tags));
  }

  std::vector<std::string> translated;
  if (!tagged.empty()) {
    try {
      translated = translate_rev_.translate(tagged, Lang::en, record.lang,
                                            DecodingPolicy{budgets.translation_output_max});
    } catch (const std::exception& e) {
      result.diagnostics.push_back({rev_stage, "backend_error", e.what()});
      rev.duration = since(start);
      result.traces.push_back(rev);
      return result;
    }
  }
  for (auto& t : translated) {
    t = single_line(std::move(t));
  }
  // Translated keys must stay colon-free to keep the KnV shape.
  for (auto k : key_items) {
    auto& key = translated[k];
    if (key.find(':') == std::string::npos && !key.empty()) {
      continue;
    }
    std::string fixed;
    for (char ch : key) {
      if (ch != ':') {
        fixed.push_back(ch);
      }
    }
    fixed = std::string(detail::trim(fixed));
    key = fixed.empty() ? items[k] : fixed;
    result.diagnostics.push_back({rev_stage, "key_colon", "translated key repaired: " + key});
  }
  for (const auto& t : translated) {
    rev.output_chars += char_count(t);
  }
  for (auto& [out, layout] : layouts) {
    out->final_text = clean_artifacts(layout.fill(translated), record.lang, config_.artifacts);
  }
  rev.duration = since(start);
  result.traces.push_back(rev);
  return result;
}

RunSummary Pipeline::run_corpus(const std::filesystem::path& corpus, const std::filesystem::path& out,
                                const RunOptions& options) const {
  const auto records = load_corpus(corpus);
  const auto checkpoint = checkpoint_for(out);

  std::map<std::string, PipelineResult> done;
  std::error_code ec;
  if (std::filesystem::exists(checkpoint, ec)) {
    // Later lines win; failed records are run again.
    for (auto& r : load_results(checkpoint, /*tolerate_torn_tail=*/true)) {
      auto id = r.id;
      if (r.complete() && !r.outputs.empty()) {
        done.insert_or_assign(std::move(id), std::move(r));
      } else {
        done.erase(id);
      }
    }
  }

  RunSummary summary;
  std::vector<std::optional<PipelineResult>> slots(records.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (auto it = done.find(records[i].id); it != done.end()) {
      slots[i] = it->second;
      ++summary.skipped;
    } else {
      pending.push_back(i);
    }
  }

  ResultAppender appender(checkpoint);
  const std::size_t limit = std::min(pending.size(), options.stop_after.value_or(pending.size()));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed{0};
  std::atomic<std::size_t> processed{0};
  std::exception_ptr io_failure;
  std::mutex io_mu;

  auto worker = [&] {
    while (true) {
      const std::size_t claim = next.fetch_add(1);
      if (claim >= limit) {
        return;
      }
      const auto& record = records[pending[claim]];
      PipelineResult result;
      try {
        result = run_record(record);
      } catch (const std::exception& e) {
        result = PipelineResult{record.id, record.lang, {}, {{"pipeline", "internal_error", e.what()}}, {}, false};
      }
      if (!result.complete() || result.outputs.empty()) {
        failed.fetch_add(1);
      }
      try {
        appender.append(result);
      } catch (...) {
        std::lock_guard lock(io_mu);
        if (!io_failure) {
          io_failure = std::current_exception();
        }
        return;
      }
      slots[pending[claim]] = std::move(result);
      processed.fetch_add(1);
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(config_.parallelism, limit));
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  if (io_failure) {
    std::rethrow_exception(io_failure);
  }

  std::vector<PipelineResult> ordered;
  for (auto& slot : slots) {
    if (slot) {
      ordered.push_back(std::move(*slot));
    }
  }
  summary.processed = processed.load();
  summary.failed = failed.load();
  write_results(out, ordered);
  return summary;
}

PipelineResult run_record(const DialogueRecord& record, const PipelineConfig& config) {
  return Pipeline(config).run_record(record);
}

RunSummary run_corpus(const std::filesystem::path& corpus, const std::filesystem::path& out,
                      const PipelineConfig& config) {
  return Pipeline(config).run_corpus(corpus, out);
}

}  // namespace trilingua
