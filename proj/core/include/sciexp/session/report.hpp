// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sciexp/session/session.hpp"

namespace sciexp::session {

struct TaskScores {
  std::string task;
  std::string family;
  std::vector<double> scores;  // one per attempt; unsubmitted attempts count as 0
  std::size_t submitted = 0;
};

std::vector<TaskScores> collect_scores(const std::vector<Conversation>& logs, const catalog::Catalog& catalog);

std::string score_table_markdown(const std::vector<TaskScores>& rows);
std::string score_table_csv(const std::vector<TaskScores>& rows);
/// Strip plot of per-attempt scores per task on a [0, 1] axis.
std::string score_plot_svg(const std::vector<TaskScores>& rows, const std::string& title);

/// Reads every *.jsonl log under `dir` and writes scores.md, scores.csv and
/// one scores_<family>.svg per family. Returns the written paths.
std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const catalog::Catalog& catalog);

}  // namespace sciexp::session
