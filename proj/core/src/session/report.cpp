// SPDX-License-Identifier: Apache-2.0
#include "sciexp/session/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>

#include "sciexp/error.hpp"

namespace sciexp::session {

namespace {

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + p.string());
  out << text;
}

}  // namespace

std::vector<TaskScores> collect_scores(const std::vector<Conversation>& logs, const catalog::Catalog& catalog) {
  std::map<std::string, TaskScores> by_task;
  for (const auto& c : logs) {
    auto& row = by_task[c.task];
    row.task = c.task;
    if (const auto* s = catalog.find(c.task)) row.family = std::string(catalog::to_string(s->family));
    row.scores.push_back(c.score ? c.score->score : 0.0);
    if (c.status == Status::submitted) ++row.submitted;
  }
  std::vector<TaskScores> rows;
  for (auto& [k, v] : by_task) rows.push_back(std::move(v));
  return rows;
}

std::string score_table_markdown(const std::vector<TaskScores>& rows) {
  std::string out = "| task | attempts | submitted | mean score | best score |\n|---|---:|---:|---:|---:|\n";
  for (const auto& r : rows) {
    const double best = r.scores.empty() ? 0.0 : *std::max_element(r.scores.begin(), r.scores.end());
    out += "| " + r.task + " | " + std::to_string(r.scores.size()) + " | " + std::to_string(r.submitted) + " | " +
           fmt(mean(r.scores)) + " | " + fmt(best) + " |\n";
  }
  return out;
}

std::string score_table_csv(const std::vector<TaskScores>& rows) {
  std::string out = "task,family,attempt,score\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.scores.size(); ++i)
      out += r.task + "," + r.family + "," + std::to_string(i) + "," + fmt(r.scores[i], "%.17g") + "\n";
  }
  return out;
}

std::string score_plot_svg(const std::vector<TaskScores>& rows, const std::string& title) {
  const int label_w = 420, plot_w = 420, row_h = 22, top = 40, bottom = 40;
  const int width = label_w + plot_w + 30;
  const int height = top + bottom + row_h * static_cast<int>(std::max<std::size_t>(rows.size(), 1));
  auto x_of = [&](double s) { return label_w + std::clamp(s, 0.0, 1.0) * plot_w; };
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
                    std::to_string(height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"10\" y=\"22\" font-size=\"15\">" + xml_escape(title) + "</text>\n";
  const int axis_y = height - bottom + 8;
  for (int k = 0; k <= 4; ++k) {
    const double s = k / 4.0;
    const std::string x = fmt(x_of(s), "%.1f");
    svg += "<line x1=\"" + x + "\" y1=\"" + std::to_string(top - 6) + "\" x2=\"" + x + "\" y2=\"" + std::to_string(axis_y) +
           "\" stroke=\"#ddd\"/>\n";
    svg += "<text x=\"" + x + "\" y=\"" + std::to_string(axis_y + 16) + "\" text-anchor=\"middle\">" + fmt(s, "%.2f") + "</text>\n";
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    const int y = top + static_cast<int>(i) * row_h + row_h / 2;
    svg += "<text x=\"" + std::to_string(label_w - 8) + "\" y=\"" + std::to_string(y + 4) + "\" text-anchor=\"end\">" +
           xml_escape(r.task) + "</text>\n";
    for (double s : r.scores) {
      svg += "<circle cx=\"" + fmt(x_of(s), "%.1f") + "\" cy=\"" + std::to_string(y) +
             "\" r=\"4\" fill=\"#3b6fb6\" fill-opacity=\"0.6\"/>\n";
    }
    if (!r.scores.empty()) {
      const std::string mx = fmt(x_of(mean(r.scores)), "%.1f");
      svg += "<line x1=\"" + mx + "\" y1=\"" + std::to_string(y - 8) + "\" x2=\"" + mx + "\" y2=\"" + std::to_string(y + 8) +
             "\" stroke=\"#c0392b\" stroke-width=\"2\"/>\n";
    }
  }
  svg += "<text x=\"" + std::to_string(label_w + plot_w / 2) + "\" y=\"" + std::to_string(height - 4) +
         "\" text-anchor=\"middle\">score (dots: attempts, bar: mean)</text>\n";
  svg += "</svg>\n";
  return svg;
}

std::vector<std::filesystem::path> write_report(const std::filesystem::path& dir, const catalog::Catalog& catalog) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Conversation> logs;
  for (const auto& f : files) logs.push_back(Conversation::load(f.string()));
  const auto rows = collect_scores(logs, catalog);

  std::vector<std::filesystem::path> written;
  write_file(dir / "scores.md", score_table_markdown(rows));
  written.push_back(dir / "scores.md");
  write_file(dir / "scores.csv", score_table_csv(rows));
  written.push_back(dir / "scores.csv");
  std::map<std::string, std::vector<TaskScores>> by_family;
  for (const auto& r : rows) by_family[r.family.empty() ? "unknown" : r.family].push_back(r);
  for (const auto& [family, fr] : by_family) {
    const auto p = dir / ("scores_" + family + ".svg");
    write_file(p, score_plot_svg(fr, "Scores: " + family));
    written.push_back(p);
  }
  return written;
}

}  // namespace sciexp::session
