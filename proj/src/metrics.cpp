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

#include "trilingua/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "json.hpp"

namespace trilingua {

using nlohmann::ordered_json;

namespace {

constexpr std::string_view kMissingCell = "\xE2\x80\x94";  // U+2014

bool is_article(std::string_view token) { return token == "a" || token == "an" || token == "the"; }

std::string strip_punct(const icu::UnicodeString& piece) {
  int32_t start = 0;
  int32_t end = piece.length();
  while (start < end) {
    UChar32 c = piece.char32At(start);
    if (!u_ispunct(c)) {
      break;
    }
    start += U16_LENGTH(c);
  }
  while (end > start) {
    UChar32 c = piece.char32At(end - 1);
    if (!u_ispunct(c)) {
      break;
    }
    end -= U16_LENGTH(c);
  }
  std::string out;
  piece.tempSubStringBetween(start, end).toUTF8String(out);
  return out;
}

double cosine(const Embedding& a, double norm_a, const Embedding& b, double norm_b) {
  if (norm_a == 0.0 || norm_b == 0.0) {
    return 0.0;
  }
  double dot = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
  }
  return std::clamp(dot / (norm_a * norm_b), -1.0, 1.0);
}

double norm(const Embedding& v) {
  double s = 0.0;
  for (double x : v) {
    s += x * x;
  }
  return std::sqrt(s);
}

template <typename T, typename Parse>
std::vector<T> load_jsonl(const std::filesystem::path& path, Parse parse) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(path, "cannot open");
  }
  std::vector<T> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      out.push_back(parse(line));
    } catch (const std::invalid_argument& e) {
      throw CorpusError(line_no, e.what());
    } catch (const nlohmann::json::exception& e) {
      throw CorpusError(line_no, "malformed field");
    }
  }
  return out;
}

ordered_json parse_object(std::string_view line) {
  ordered_json j;
  try {
    j = ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw std::invalid_argument("invalid JSON");
  }
  if (!j.is_object()) {
    throw std::invalid_argument("line is not a JSON object");
  }
  return j;
}

std::string string_field(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw std::invalid_argument(std::string("missing string field '") + key + "'");
  }
  return it->get<std::string>();
}

Lang lang_field(const ordered_json& j, const char* key) {
  auto lang = parse_lang(string_field(j, key));
  if (!lang) {
    throw std::invalid_argument("unknown language code");
  }
  return *lang;
}

TaskKind task_field(const ordered_json& j) {
  auto task = parse_task(string_field(j, "task"));
  if (!task) {
    throw std::invalid_argument("unknown task");
  }
  return *task;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

struct TableRow {
  Lang lang;
  std::optional<double> sort_key;  // QnA column
  std::array<std::string, 3> cells;
};

void order_rows(std::vector<TableRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const TableRow& a, const TableRow& b) {
    if (a.sort_key.has_value() != b.sort_key.has_value()) {
      return a.sort_key.has_value();
    }
    if (a.sort_key && *a.sort_key != *b.sort_key) {
      return *a.sort_key > *b.sort_key;
    }
    return display_name(a.lang) < display_name(b.lang);
  });
}

void emit_table(std::string& out, std::string_view title, const std::vector<TableRow>& rows,
                ReportFormat format) {
  std::vector<std::string> header = {"Language"};
  for (auto task : kAllTasks) {
    header.emplace_back(display_name(task));
  }
  auto emit_row = [&](const std::vector<std::string>& cells) {
    if (format == ReportFormat::markdown) {
      out += "|";
      for (const auto& c : cells) {
        out += " " + c + " |";
      }
    } else {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        out += (i ? " & " : "") + cells[i];
      }
    }
    out += "\n";
  };

  out += format == ReportFormat::markdown ? "## " : "";
  out += title;
  out += "\n\n";
  emit_row(header);
  if (format == ReportFormat::markdown) {
    out += "|---|---|---|---|\n";
  }
  for (const auto& row : rows) {
    std::vector<std::string> cells = {std::string(display_name(row.lang))};
    cells.insert(cells.end(), row.cells.begin(), row.cells.end());
    emit_row(cells);
  }
}

}  // namespace

std::vector<std::string> metric_tokenize(std::string_view text, bool english) {
  icu::UnicodeString u =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  u.toLower(icu::Locale::getRoot());
  std::vector<std::string> tokens;
  const int32_t n = u.length();
  int32_t i = 0;
  while (i < n) {
    while (i < n && u_isUWhiteSpace(u.char32At(i))) {
      i += U16_LENGTH(u.char32At(i));
    }
    const int32_t start = i;
    while (i < n && !u_isUWhiteSpace(u.char32At(i))) {
      i += U16_LENGTH(u.char32At(i));
    }
    if (start == i) {
      break;
    }
    auto token = strip_punct(u.tempSubStringBetween(start, i));
    if (token.empty() || (english && is_article(token))) {
      continue;
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

double token_f1(std::span<const std::string> pred, std::span<const std::string> gold) {
  if (pred.empty() && gold.empty()) {
    return 1.0;
  }
  if (pred.empty() || gold.empty()) {
    return 0.0;
  }
  std::map<std::string_view, std::size_t> gold_counts;
  for (const auto& t : gold) {
    ++gold_counts[t];
  }
  std::size_t overlap = 0;
  for (const auto& t : pred) {
    auto it = gold_counts.find(t);
    if (it != gold_counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) {
    return 0.0;
  }
  const double precision = static_cast<double>(overlap) / static_cast<double>(pred.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(gold.size());
  return 2.0 * precision * recall / (precision + recall);
}

EmbedScore greedy_embed_f1(std::span<const Embedding> candidate, std::span<const Embedding> reference) {
  if (candidate.empty() || reference.empty()) {
    throw std::invalid_argument("greedy_embed_f1 needs at least one vector on each side");
  }
  const std::size_t dim = candidate.front().size();
  auto check_dim = [dim](const Embedding& v) {
    if (v.size() != dim) {
      throw std::invalid_argument("embedding dimension mismatch: " + std::to_string(v.size()) +
                                  " vs " + std::to_string(dim));
    }
  };
  std::for_each(candidate.begin(), candidate.end(), check_dim);
  std::for_each(reference.begin(), reference.end(), check_dim);

  std::vector<double> cand_norm(candidate.size());
  std::vector<double> ref_norm(reference.size());
  std::transform(candidate.begin(), candidate.end(), cand_norm.begin(), norm);
  std::transform(reference.begin(), reference.end(), ref_norm.begin(), norm);

  std::vector<double> best_for_cand(candidate.size(), -2.0);
  std::vector<double> best_for_ref(reference.size(), -2.0);
  for (std::size_t i = 0; i < candidate.size(); ++i) {
    for (std::size_t j = 0; j < reference.size(); ++j) {
      const double s = cosine(candidate[i], cand_norm[i], reference[j], ref_norm[j]);
      best_for_cand[i] = std::max(best_for_cand[i], s);
      best_for_ref[j] = std::max(best_for_ref[j], s);
    }
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
      s += x;
    }
    return s / static_cast<double>(v.size());
  };
  EmbedScore out;
  out.precision = mean(best_for_cand);
  out.recall = mean(best_for_ref);
  const double pr = out.precision * out.recall;
  out.f = pr > 0.0 ? 2.0 * pr / (out.precision + out.recall) : 0.0;
  return out;
}

std::string WinRate::str() const {
  return std::to_string(tenths / 10) + "." + std::to_string(tenths % 10) + "%";
}

WinRate win_rate(std::size_t wins, std::size_t total) {
  if (total == 0) {
    throw std::invalid_argument("win_rate: total must be positive");
  }
  if (wins > total) {
    throw std::invalid_argument("win_rate: wins exceed total");
  }
  // floor(1000 * wins / total + 1/2) in exact integer arithmetic.
  const auto w = static_cast<std::int64_t>(wins);
  const auto t = static_cast<std::int64_t>(total);
  return WinRate{(2000 * w + t) / (2 * t)};
}

Judgment judgment_from_json_line(std::string_view line) {
  auto j = parse_object(line);
  Judgment out;
  out.record_id = string_field(j, "record_id");
  out.language = lang_field(j, "language");
  out.task = task_field(j);
  const auto outcome = string_field(j, "outcome");
  if (outcome == "win") {
    out.outcome = Outcome::win;
  } else if (outcome == "loss") {
    out.outcome = Outcome::loss;
  } else if (outcome == "tie") {
    out.outcome = Outcome::tie;
  } else {
    throw std::invalid_argument("unknown outcome '" + outcome + "'");
  }
  return out;
}

std::vector<Judgment> load_judgments(const std::filesystem::path& path) {
  std::set<std::tuple<std::string, Lang, TaskKind>> seen;
  std::size_t line_no = 0;
  auto parse = [&](const std::string& line) {
    auto j = judgment_from_json_line(line);
    ++line_no;
    if (!seen.emplace(j.record_id, j.language, j.task).second) {
      throw std::invalid_argument("duplicate judgment for record '" + j.record_id + "'");
    }
    return j;
  };
  return load_jsonl<Judgment>(path, parse);
}

std::map<CellKey, WinTally> tally_judgments(std::span<const Judgment> judgments, TieRule ties) {
  std::map<CellKey, WinTally> cells;
  for (const auto& j : judgments) {
    if (j.outcome == Outcome::tie && ties == TieRule::exclude) {
      continue;
    }
    auto& cell = cells[{j.language, j.task}];
    ++cell.total;
    if (j.outcome == Outcome::win) {
      ++cell.wins;
    }
  }
  return cells;
}

std::string score_to_json_line(const ScoreRow& row) {
  ordered_json j;
  j["language"] = to_string(row.language);
  j["task"] = to_string(row.task);
  j["f1"] = row.f1;
  if (row.bert_f) {
    j["bert_f"] = *row.bert_f;
  }
  return j.dump();
}

std::vector<ScoreRow> load_scores(const std::filesystem::path& path) {
  std::set<CellKey> seen;
  auto parse = [&](const std::string& line) {
    auto j = parse_object(line);
    ScoreRow row;
    row.language = lang_field(j, "language");
    row.task = task_field(j);
    auto f1 = j.find("f1");
    if (f1 == j.end() || !f1->is_number()) {
      throw std::invalid_argument("missing number field 'f1'");
    }
    row.f1 = f1->get<double>();
    if (row.f1 < 0.0 || row.f1 > 1.0) {
      throw std::invalid_argument("f1 outside [0, 1]");
    }
    if (auto b = j.find("bert_f"); b != j.end() && !b->is_null()) {
      if (!b->is_number()) {
        throw std::invalid_argument("field 'bert_f' must be a number");
      }
      row.bert_f = b->get<double>();
      if (*row.bert_f < -1.0 || *row.bert_f > 1.0) {
        throw std::invalid_argument("bert_f outside [-1, 1]");
      }
    }
    if (!seen.emplace(row.language, row.task).second) {
      throw std::invalid_argument("duplicate score row");
    }
    return row;
  };
  return load_jsonl<ScoreRow>(path, parse);
}

void write_scores(const std::filesystem::path& path, std::span<const ScoreRow> rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError(path, "cannot open for writing");
  }
  for (const auto& row : rows) {
    out << score_to_json_line(row) << '\n';
  }
  if (!out.flush()) {
    throw IoError(path, "write failed");
  }
}

std::string render_report(std::span<const Judgment> judgments, std::span<const ScoreRow> scores,
                          const ReportOptions& options) {
  const auto cells = tally_judgments(judgments, options.ties);

  std::map<Lang, TableRow> wins;
  for (const auto& [key, tally] : cells) {
    auto [lang, task] = key;
    auto& row = wins.try_emplace(lang, TableRow{lang, std::nullopt, {}}).first->second;
    if (tally.total == 0) {
      continue;
    }
    const auto rate = win_rate(tally.wins, tally.total);
    row.cells[static_cast<std::size_t>(task)] = rate.str();
    if (task == TaskKind::qna) {
      row.sort_key = static_cast<double>(rate.tenths);
    }
  }

  std::map<Lang, TableRow> metrics;
  for (const auto& s : scores) {
    auto& row = metrics.try_emplace(s.language, TableRow{s.language, std::nullopt, {}}).first->second;
    row.cells[static_cast<std::size_t>(s.task)] =
        fixed3(s.f1) + " / " + (s.bert_f ? fixed3(*s.bert_f) : std::string(kMissingCell));
    if (s.task == TaskKind::qna) {
      row.sort_key = s.f1;
    }
  }

  auto finish = [](std::map<Lang, TableRow>& by_lang) {
    std::vector<TableRow> rows;
    for (auto& [_, row] : by_lang) {
      for (auto& c : row.cells) {
        if (c.empty()) {
          c = kMissingCell;
        }
      }
      rows.push_back(std::move(row));
    }
    order_rows(rows);
    return rows;
  };

  std::string out;
  emit_table(out, "Win rates", finish(wins), options.format);
  out += "\n";
  emit_table(out, "Automatic metrics (F1 / BERT)", finish(metrics), options.format);
  return out;
}

}  // namespace trilingua
