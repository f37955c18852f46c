#include <algorithm>
#include <cstdio>
#include <sstream>
#include <unordered_map>

#include "chis/corpus.hpp"
#include "chis/error.hpp"
#include "chis/pipeline.hpp"

namespace chis::pipeline {

namespace {

std::string fixed8(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.8f", value);
  return buf;
}

}  // namespace

double macro_average(std::span<const double> accuracies) {
  if (accuracies.empty()) {
    throw Error(ErrorCode::EmptyInput, "no per-query accuracies to average");
  }
  double sum = 0.0;
  for (const double a : accuracies) sum += a;
  return sum / static_cast<double>(accuracies.size());
}

EvaluationReport evaluate(std::span<const std::string> gold,
                          std::span<const std::string> predicted,
                          std::span<const std::string> groups) {
  if (gold.size() != predicted.size() || gold.size() != groups.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "gold has " + std::to_string(gold.size()) + " rows, predictions " +
                    std::to_string(predicted.size()) + ", groups " +
                    std::to_string(groups.size()));
  }
  if (gold.empty()) throw Error(ErrorCode::EmptyInput, "nothing to evaluate");

  EvaluationReport report;
  std::unordered_map<std::string_view, std::size_t> row_of;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto [it, inserted] = row_of.emplace(groups[i], report.rows.size());
    if (inserted) report.rows.push_back({groups[i], 0, 0, 0.0});
    auto& row = report.rows[it->second];
    ++row.total;
    if (gold[i] == predicted[i]) ++row.correct;
  }
  std::vector<double> accuracies;
  accuracies.reserve(report.rows.size());
  for (auto& row : report.rows) {
    row.accuracy =
        100.0 * static_cast<double>(row.correct) / static_cast<double>(row.total);
    accuracies.push_back(row.accuracy);
  }
  report.macro_average = macro_average(accuracies);
  return report;
}

std::string render_table(const EvaluationReport& report, std::string_view title) {
  std::size_t width = std::string_view("Average").size();
  for (const auto& row : report.rows) width = std::max(width, row.query_id.size());

  std::ostringstream out;
  if (!title.empty()) out << title << '\n';
  auto line = [&](std::string_view name, std::string_view correct,
                  std::string_view accuracy) {
    out << name << std::string(width - name.size() + 2, ' ');
    out << std::string(correct.size() < 11 ? 11 - correct.size() : 0, ' ')
        << correct << "  ";
    out << std::string(accuracy.size() < 12 ? 12 - accuracy.size() : 0, ' ')
        << accuracy << '\n';
  };
  line("Query", "Correct", "Accuracy");
  for (const auto& row : report.rows) {
    line(row.query_id,
         std::to_string(row.correct) + "/" + std::to_string(row.total),
         fixed8(row.accuracy));
  }
  line("Average", "", fixed8(report.macro_average));
  return out.str();
}

std::string render_csv(const EvaluationReport& report) {
  std::ostringstream out;
  out << "query_id,accuracy\n";
  for (const auto& row : report.rows) {
    out << corpus::csv_escape(row.query_id) << ',' << fixed8(row.accuracy) << '\n';
  }
  out << "MACRO_AVERAGE," << fixed8(report.macro_average) << '\n';
  return out.str();
}

}  // namespace chis::pipeline
