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

#include "trilingua/corpus.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "json.hpp"

namespace trilingua {

using nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 9> kLangCodes = {"en", "hi", "mr", "kn", "gu",
                                                        "te", "ta", "bn", "as"};
constexpr std::array<std::string_view, 9> kLangNames = {
    "English", "Hindi", "Marathi", "Kannada", "Gujarati", "Telugu", "Tamil", "Bangla", "Assamese"};
constexpr std::array<std::string_view, 3> kTaskNames = {"qna", "summary_text", "summary_knv"};
constexpr std::array<std::string_view, 3> kTaskDisplay = {"QnA", "Summary (Text)", "Summary (KnV)"};
constexpr std::array<std::string_view, 3> kStageNames = {"forward_translate", "generate",
                                                         "reverse_translate"};

const ordered_json& require(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw std::invalid_argument(std::string("missing field '") + key + "'");
  }
  return *it;
}

std::string require_string(const ordered_json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_string()) {
    throw std::invalid_argument(std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

const ordered_json& require_array(const ordered_json& obj, const char* key) {
  const auto& v = require(obj, key);
  if (!v.is_array()) {
    throw std::invalid_argument(std::string("field '") + key + "' must be an array");
  }
  return v;
}

// Enum violation; the offending value is kept apart so messages read
// "unknown language code at line N ('xx')".
struct UnknownValue : std::invalid_argument {
  UnknownValue(const std::string& what, std::string value)
      : std::invalid_argument(what), value(std::move(value)) {}
  std::string value;
};

Lang lang_field(const ordered_json& obj, const char* key) {
  auto code = require_string(obj, key);
  auto lang = parse_lang(code);
  if (!lang) {
    throw UnknownValue("unknown language code", "'" + code + "'");
  }
  return *lang;
}

ordered_json trace_to_json(const StageTrace& t) {
  ordered_json j;
  j["stage"] = to_string(t.stage);
  if (t.task) {
    j["task"] = to_string(*t.task);
  }
  j["items"] = t.items;
  j["input_chars"] = t.input_chars;
  j["output_chars"] = t.output_chars;
  j["truncated"] = t.truncated;
  j["bypass"] = t.bypass;
  return j;
}

StageTrace trace_from_json(const ordered_json& j) {
  StageTrace t;
  auto stage = parse_stage(require_string(j, "stage"));
  if (!stage) {
    throw std::invalid_argument("unknown stage");
  }
  t.stage = *stage;
  if (j.contains("task")) {
    auto task = parse_task(require_string(j, "task"));
    if (!task) {
      throw std::invalid_argument("unknown task");
    }
    t.task = task;
  }
  t.items = require(j, "items").get<std::size_t>();
  t.input_chars = require(j, "input_chars").get<std::size_t>();
  t.output_chars = require(j, "output_chars").get<std::size_t>();
  t.truncated = require(j, "truncated").get<bool>();
  t.bypass = require(j, "bypass").get<bool>();
  return t;
}

ordered_json optional_text(const std::optional<std::string>& s) {
  return s ? ordered_json(*s) : ordered_json(nullptr);
}

std::optional<std::string> optional_text(const ordered_json& j, const char* key) {
  const auto& v = require(j, key);
  if (v.is_null()) {
    return std::nullopt;
  }
  return v.get<std::string>();
}

std::ofstream open_for_write(const std::filesystem::path& path, std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) {
    throw IoError(path, "cannot open for writing");
  }
  return out;
}

}  // namespace

std::string_view to_string(Lang lang) { return kLangCodes[static_cast<std::size_t>(lang)]; }

std::string_view display_name(Lang lang) { return kLangNames[static_cast<std::size_t>(lang)]; }

std::optional<Lang> parse_lang(std::string_view code) {
  for (std::size_t i = 0; i < kLangCodes.size(); ++i) {
    if (kLangCodes[i] == code) {
      return kAllLangs[i];
    }
  }
  return std::nullopt;
}

std::string_view to_string(TaskKind task) { return kTaskNames[static_cast<std::size_t>(task)]; }

std::string_view display_name(TaskKind task) {
  return kTaskDisplay[static_cast<std::size_t>(task)];
}

std::optional<TaskKind> parse_task(std::string_view name) {
  for (std::size_t i = 0; i < kTaskNames.size(); ++i) {
    if (kTaskNames[i] == name) {
      return kAllTasks[i];
    }
  }
  return std::nullopt;
}

std::string_view to_string(Stage stage) { return kStageNames[static_cast<std::size_t>(stage)]; }

std::optional<Stage> parse_stage(std::string_view name) {
  for (std::size_t i = 0; i < kStageNames.size(); ++i) {
    if (kStageNames[i] == name) {
      return static_cast<Stage>(i);
    }
  }
  return std::nullopt;
}

bool DialogueRecord::requests(TaskKind task) const {
  return std::find(tasks.begin(), tasks.end(), task) != tasks.end();
}

bool PipelineResult::complete() const {
  return std::all_of(outputs.begin(), outputs.end(), [](const TaskOutput& o) {
    return o.english_intermediate.has_value() && o.final_text.has_value();
  });
}

void validate_record(const DialogueRecord& record) {
  if (record.id.empty()) {
    throw std::invalid_argument("empty id");
  }
  if (record.turns.empty()) {
    throw std::invalid_argument("no turns");
  }
  for (const auto& turn : record.turns) {
    if (turn.speaker.empty()) {
      throw std::invalid_argument("empty speaker label");
    }
    if (turn.speaker.find_first_of("\r\n") != std::string::npos) {
      throw std::invalid_argument("speaker label contains a newline");
    }
  }
  if (record.tasks.empty()) {
    throw std::invalid_argument("no tasks");
  }
  std::set<TaskKind> seen;
  for (auto task : record.tasks) {
    if (!seen.insert(task).second) {
      throw std::invalid_argument("duplicate task '" + std::string(to_string(task)) + "'");
    }
  }
  const bool qna = record.requests(TaskKind::qna);
  if (qna && record.questions.empty()) {
    throw std::invalid_argument("qna without questions");
  }
  if (!qna && !record.questions.empty()) {
    throw std::invalid_argument("questions without qna");
  }
}

DialogueRecord record_from_json_line(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw std::invalid_argument("invalid JSON");
  }
  if (!j.is_object()) {
    throw std::invalid_argument("line is not a JSON object");
  }
  DialogueRecord rec;
  rec.id = require_string(j, "id");
  rec.lang = lang_field(j, "lang");
  for (const auto& t : require_array(j, "turns")) {
    if (!t.is_object()) {
      throw std::invalid_argument("turn is not an object");
    }
    rec.turns.push_back({require_string(t, "speaker"), require_string(t, "utterance")});
  }
  for (const auto& t : require_array(j, "tasks")) {
    if (!t.is_string()) {
      throw std::invalid_argument("task must be a string");
    }
    auto task = parse_task(t.get<std::string>());
    if (!task) {
      throw UnknownValue("unknown task", "'" + t.get<std::string>() + "'");
    }
    rec.tasks.push_back(*task);
  }
  if (auto it = j.find("questions"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) {
      throw std::invalid_argument("field 'questions' must be an array");
    }
    for (const auto& q : *it) {
      if (!q.is_string()) {
        throw std::invalid_argument("question must be a string");
      }
      rec.questions.push_back(q.get<std::string>());
    }
  }
  validate_record(rec);
  return rec;
}

std::string record_to_json_line(const DialogueRecord& record) {
  ordered_json j;
  j["id"] = record.id;
  j["lang"] = to_string(record.lang);
  j["turns"] = ordered_json::array();
  for (const auto& t : record.turns) {
    j["turns"].push_back({{"speaker", t.speaker}, {"utterance", t.utterance}});
  }
  j["tasks"] = ordered_json::array();
  for (auto t : record.tasks) {
    j["tasks"].push_back(to_string(t));
  }
  if (!record.questions.empty()) {
    j["questions"] = record.questions;
  }
  return j.dump();
}

std::vector<DialogueRecord> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(path, "cannot open corpus");
  }
  std::vector<DialogueRecord> records;
  std::set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    DialogueRecord rec;
    try {
      rec = record_from_json_line(line);
    } catch (const UnknownValue& e) {
      throw CorpusError(line_no, e.what(), e.value);
    } catch (const std::invalid_argument& e) {
      throw CorpusError(line_no, e.what());
    }
    if (!ids.insert(rec.id).second) {
      throw CorpusError(line_no, "duplicate id", "'" + rec.id + "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

void write_corpus(const std::filesystem::path& path, std::span<const DialogueRecord> records) {
  auto out = open_for_write(path, std::ios::trunc);
  for (const auto& rec : records) {
    out << record_to_json_line(rec) << '\n';
  }
  if (!out.flush()) {
    throw IoError(path, "write failed");
  }
}

std::string result_to_json_line(const PipelineResult& result) {
  ordered_json j;
  j["id"] = result.id;
  j["lang"] = to_string(result.lang);
  j["truncated"] = result.truncated;
  j["outputs"] = ordered_json::array();
  for (const auto& o : result.outputs) {
    ordered_json oj;
    oj["task"] = to_string(o.task);
    if (o.question_index) {
      oj["question_index"] = *o.question_index;
    }
    oj["english_intermediate"] = optional_text(o.english_intermediate);
    oj["final"] = optional_text(o.final_text);
    j["outputs"].push_back(std::move(oj));
  }
  j["diagnostics"] = ordered_json::array();
  for (const auto& d : result.diagnostics) {
    j["diagnostics"].push_back({{"stage", d.stage}, {"code", d.code}, {"message", d.message}});
  }
  j["traces"] = ordered_json::array();
  for (const auto& t : result.traces) {
    j["traces"].push_back(trace_to_json(t));
  }
  // Backend text is not guaranteed to be valid UTF-8; never fail a write on it.
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

PipelineResult result_from_json_line(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw std::invalid_argument("invalid JSON");
  }
  if (!j.is_object()) {
    throw std::invalid_argument("line is not a JSON object");
  }
  PipelineResult r;
  r.id = require_string(j, "id");
  r.lang = lang_field(j, "lang");
  r.truncated = require(j, "truncated").get<bool>();
  for (const auto& oj : require_array(j, "outputs")) {
    TaskOutput o;
    auto task = parse_task(require_string(oj, "task"));
    if (!task) {
      throw std::invalid_argument("unknown task");
    }
    o.task = *task;
    if (oj.contains("question_index")) {
      o.question_index = oj["question_index"].get<std::size_t>();
    }
    o.english_intermediate = optional_text(oj, "english_intermediate");
    o.final_text = optional_text(oj, "final");
    r.outputs.push_back(std::move(o));
  }
  for (const auto& dj : require_array(j, "diagnostics")) {
    r.diagnostics.push_back(
        {require_string(dj, "stage"), require_string(dj, "code"), require_string(dj, "message")});
  }
  for (const auto& tj : require_array(j, "traces")) {
    r.traces.push_back(trace_from_json(tj));
  }
  return r;
}

void write_results(const std::filesystem::path& path, std::span<const PipelineResult> results) {
  auto out = open_for_write(path, std::ios::trunc);
  for (const auto& r : results) {
    out << result_to_json_line(r) << '\n';
  }
  if (!out.flush()) {
    throw IoError(path, "write failed");
  }
}

std::vector<PipelineResult> load_results(const std::filesystem::path& path,
                                         bool tolerate_torn_tail) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError(path, "cannot open results");
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string content = buf.str();

  std::vector<PipelineResult> results;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < content.size()) {
    ++line_no;
    auto nl = content.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    std::string_view line(content.data() + pos, (terminated ? nl : content.size()) - pos);
    pos = terminated ? nl + 1 : content.size();
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
      continue;
    }
    try {
      results.push_back(result_from_json_line(line));
    } catch (const std::exception& e) {
      if (tolerate_torn_tail && !terminated) {
        break;
      }
      throw IoError(path, std::string(e.what()) + " at line " + std::to_string(line_no));
    }
  }
  return results;
}

ResultAppender::ResultAppender(const std::filesystem::path& path) : path_(path) {
  // Drop a torn final line left by an interrupted append so new lines start
  // on a fresh boundary.
  std::error_code ec;
  if (std::filesystem::exists(path_, ec)) {
    std::ifstream in(path_, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string content = buf.str();
    if (!content.empty() && content.back() != '\n') {
      auto last_nl = content.rfind('\n');
      std::filesystem::resize_file(path_, last_nl == std::string::npos ? 0 : last_nl + 1);
    }
  }
  out_ = open_for_write(path_, std::ios::app | std::ios::binary);
}

void ResultAppender::append(const PipelineResult& result) {
  auto line = result_to_json_line(result);
  line.push_back('\n');
  std::lock_guard lock(mu_);
  out_.write(line.data(), static_cast<std::streamsize>(line.size()));
  out_.flush();
  if (!out_) {
    throw IoError(path_, "append failed");
  }
}

}  // namespace trilingua
