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

#include <array>
#include <string>
#include <vector>

#include "trilingua/metrics.hpp"

namespace trilingua::testing {

// Win counts out of 15 comparisons per cell, chosen so that every percentage
// matches the reference win-rate table.
struct WinCounts {
  Lang lang;
  std::array<std::size_t, 3> wins;  // qna, summary_text, summary_knv
};

inline const std::vector<WinCounts>& table1_counts() {
  static const std::vector<WinCounts> counts = {
      {Lang::mr, {13, 9, 9}},  {Lang::ta, {13, 9, 9}}, {Lang::hi, {12, 10, 8}},
      {Lang::as, {11, 6, 9}},  {Lang::bn, {10, 6, 6}}, {Lang::gu, {9, 11, 8}},
      {Lang::kn, {9, 10, 8}},  {Lang::en, {7, 7, 8}},  {Lang::te, {2, 8, 10}},
  };
  return counts;
}

inline constexpr std::size_t kComparisonsPerCell = 15;

// Expands counts into judgments: `wins` wins, then losses and one tie when
// `with_ties` (ties count as losses under the default rule).
inline std::vector<Judgment> table1_judgments(bool with_ties = false) {
  std::vector<Judgment> out;
  const std::array<TaskKind, 3> tasks = {TaskKind::qna, TaskKind::summary_text, TaskKind::summary_knv};
  for (const auto& row : table1_counts()) {
    for (std::size_t t = 0; t < 3; ++t) {
      for (std::size_t i = 0; i < kComparisonsPerCell; ++i) {
        Outcome o = i < row.wins[t] ? Outcome::win : Outcome::loss;
        if (with_ties && i == kComparisonsPerCell - 1 && o == Outcome::loss) {
          o = Outcome::tie;
        }
        out.push_back({std::string(to_string(row.lang)) + "-" + std::string(to_string(tasks[t])) + "-" +
                           std::to_string(i),
                       row.lang, tasks[t], o});
      }
    }
  }
  return out;
}

// The reference win-rate table, in its row order.
inline const std::vector<std::string>& table1_rows() {
  static const std::vector<std::string> rows = {
      "Marathi & 86.7% & 60.0% & 60.0%",  "Tamil & 86.7% & 60.0% & 60.0%",
      "Hindi & 80.0% & 66.7% & 53.3%",    "Assamese & 73.3% & 40.0% & 60.0%",
      "Bangla & 66.7% & 40.0% & 40.0%",   "Gujarati & 60.0% & 73.3% & 53.3%",
      "Kannada & 60.0% & 66.7% & 53.3%",  "English & 46.7% & 46.7% & 53.3%",
      "Telugu & 13.3% & 53.3% & 66.7%",
  };
  return rows;
}

}  // namespace trilingua::testing
