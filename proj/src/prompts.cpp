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

#include "trilingua/prompts.hpp"

#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace trilingua {

namespace {

// Keep in sync with data/prompts.txt (checked by the prompts tests).
constexpr std::string_view kDefaultTemplates = R"TPL(# Prompt templates, one section per task.
# Slots: {dialogue} (all tasks), {question} (qna only).

[task:qna]
You will read a conversation between a clinician and a patient, followed by a question about it. Answer the question in English using only information stated in the conversation.
Output rules: reply with the answer only, in one or two sentences. If the conversation does not contain the answer, say that it is not mentioned.

{dialogue}

Question: {question}

[task:summary_text]
You will read a conversation between a clinician and a patient. Write a concise narrative summary of the conversation in English.
Output rules: plain prose in one or two paragraphs covering symptoms, history, findings and the agreed plan. Do not add anything that is not in the conversation.

{dialogue}

[task:summary_knv]
You will read a conversation between a clinician and a patient. Produce a structured summary in English as key-value pairs.
Output rules: write exactly one pair per line in the form "Key: Value". Start directly with the first pair, with no introduction and no closing remarks. Keys never contain colons. Leave out keys the conversation gives no information about.

{dialogue}
)TPL";

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + needle.size())) {
    ++n;
  }
  return n;
}

void check_slots(const PromptTemplate& t) {
  const auto name = std::string(to_string(t.task));
  if (count_occurrences(t.body, kDialogueSlot) != 1) {
    throw std::invalid_argument("template '" + name + "' must contain {dialogue} exactly once");
  }
  const auto questions = count_occurrences(t.body, kQuestionSlot);
  if (t.task == TaskKind::qna && questions != 1) {
    throw std::invalid_argument("template 'qna' must contain {question} exactly once");
  }
  if (t.task != TaskKind::qna && questions != 0) {
    throw std::invalid_argument("template '" + name + "' must not contain {question}");
  }
}

std::string finish_body(std::vector<std::string_view>& lines) {
  while (!lines.empty() && detail::trim(lines.back()).empty()) {
    lines.pop_back();
  }
  std::size_t first = 0;
  while (first < lines.size() && detail::trim(lines[first]).empty()) {
    ++first;
  }
  std::string body;
  for (std::size_t i = first; i < lines.size(); ++i) {
    if (i > first) {
      body.push_back('\n');
    }
    body.append(lines[i]);
  }
  lines.clear();
  return body;
}

}  // namespace

PromptSet PromptSet::defaults() {
  static const PromptSet set = parse(kDefaultTemplates);
  return set;
}

PromptSet PromptSet::parse(std::string_view text) {
  std::array<std::optional<PromptTemplate>, 3> found;
  std::optional<TaskKind> current;
  std::vector<std::string_view> body;
  std::size_t line_no = 0;

  auto close_section = [&] {
    if (current) {
      found[static_cast<std::size_t>(*current)] = PromptTemplate{*current, finish_body(body)};
    }
  };

  for (auto raw : detail::split_lines(text)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') {
      raw.remove_suffix(1);
    }
    auto trimmed = detail::trim(raw);
    if (trimmed.starts_with("[task:") && trimmed.ends_with("]")) {
      close_section();
      auto name = trimmed.substr(6, trimmed.size() - 7);
      auto task = parse_task(name);
      if (!task) {
        throw std::invalid_argument("unknown task '" + std::string(name) + "' in template header at line " +
                                    std::to_string(line_no));
      }
      if (found[static_cast<std::size_t>(*task)]) {
        throw std::invalid_argument("duplicate template for '" + std::string(name) + "'");
      }
      current = task;
      continue;
    }
    if (!current) {
      if (!trimmed.empty() && !trimmed.starts_with('#')) {
        throw std::invalid_argument("text before the first [task:...] header at line " +
                                    std::to_string(line_no));
      }
      continue;
    }
    body.push_back(raw);
  }
  close_section();

  PromptSet set;
  for (auto task : kAllTasks) {
    auto& slot = found[static_cast<std::size_t>(task)];
    if (!slot) {
      throw std::invalid_argument("missing template for '" + std::string(to_string(task)) + "'");
    }
    check_slots(*slot);
    set.templates_[static_cast<std::size_t>(task)] = std::move(*slot);
  }
  return set;
}

PromptSet PromptSet::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(path, "cannot open template file");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const std::invalid_argument& e) {
    throw IoError(path, e.what());
  }
}

const PromptTemplate& PromptSet::get(TaskKind task) const {
  return templates_[static_cast<std::size_t>(task)];
}

std::string PromptSet::build(TaskKind task, std::string_view english_dialogue,
                             std::optional<std::string_view> question,
                             std::string_view record_id) const {
  if (task == TaskKind::qna && !question) {
    throw PromptError(task, std::string(record_id), "question required for qna");
  }
  if (task != TaskKind::qna && question) {
    throw PromptError(task, std::string(record_id),
                      "question not allowed for " + std::string(to_string(task)));
  }
  const std::string_view body = get(task).body;
  std::string out;
  out.reserve(body.size() + english_dialogue.size() + (question ? question->size() : 0));
  std::size_t pos = 0;
  while (pos < body.size()) {
    auto brace = body.find('{', pos);
    if (brace == std::string_view::npos) {
      out.append(body.substr(pos));
      break;
    }
    out.append(body.substr(pos, brace - pos));
    auto rest = body.substr(brace);
    if (rest.starts_with(kDialogueSlot)) {
      out.append(english_dialogue);
      pos = brace + kDialogueSlot.size();
    } else if (question && rest.starts_with(kQuestionSlot)) {
      out.append(*question);
      pos = brace + kQuestionSlot.size();
    } else {
      out.push_back('{');
      pos = brace + 1;
    }
  }
  return out;
}

std::string build_prompt(TaskKind task, std::string_view english_dialogue,
                         std::optional<std::string_view> question) {
  return PromptSet::defaults().build(task, english_dialogue, question);
}

}  // namespace trilingua
