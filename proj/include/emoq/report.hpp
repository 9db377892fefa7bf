#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "emoq/graph.hpp"
#include "emoq/simulation.hpp"

namespace emoq {

enum class ReportFormat { all, json, csv };

ReportFormat parse_report_format(std::string_view s);  // throws ConfigError

// Numbers are written with six decimals (CSV) or rounded to six decimals
// (JSON) so outputs stay byte-stable.
std::string run_report_json(const RunReport& report, const SimulationConfig& config);
RunReport parse_run_report_json(std::string_view text);  // throws LoadError
std::string comparison_json(const ComparisonReport& c);

std::string hold_histogram_csv(const std::vector<std::size_t>& bins);
std::string emotion_timeseries_csv(const std::vector<EmotionMass>& series);
std::string final_board_csv(const EmotionBoard& board);
std::string final_board_comparison_csv(const EmotionBoard& no_queue, const EmotionBoard& with_queue);

// One JSON object per decision; conversations in root-id order.
std::string decision_log(const std::vector<ConversationRun>& runs, bool queue);

// Writes report.json, hold_histogram.csv, emotion_timeseries.csv,
// final_board.csv and decisions.log into `dir` (created if needed). The
// format picks which of them are written; decisions.log always is.
void emit_run(const std::filesystem::path& dir, const RunReport& report,
              const std::vector<ConversationRun>& runs, const SimulationConfig& config,
              ReportFormat format = ReportFormat::all);

// comparison.json, hold_histogram.csv and final_board.csv (both conditions).
void emit_comparison(const std::filesystem::path& dir, const ComparisonReport& c,
                     ReportFormat format = ReportFormat::all);

RunReport load_run_report(const std::filesystem::path& dir);

// Nodes with id, parent, timestamp, vector, dominant, intensity and metrics,
// plus the current board.
std::string graph_snapshot_json(const ConversationGraph& graph, const BoardOptions& opts);

void write_file(const std::filesystem::path& path, std::string_view content);  // throws IoError

} // namespace emoq
