#pragma once

#include <map>
#include <string>
#include <vector>

#include "gauntlet/orchestrator.hpp"
#include "gauntlet/scoring.hpp"

namespace gauntlet::reporting {

using util::json;

constexpr int kSchemaVersion = 1;

// One run report file: metadata wrapper around the composite report,
// named {agent}_{problem_id}_{run_index}.json.
json run_record_to_json(const orchestrator::RunRecord& record);

// Writes the report into out_dir, returns the file path.
std::string write_run_report(const std::string& out_dir,
                             const orchestrator::RunRecord& record);

struct LoadedReport {
    std::string agent_name;
    int run_index = 0;
    bool invalid = false;
    std::string invalid_reason;
    scoring::CompositeReport report;
};

LoadedReport loaded_report_from_json(const json& j);

// Reads every run report under dir (files lacking the wrapper shape are
// skipped with a note in `skipped`). Deterministic file order.
std::vector<LoadedReport> load_reports(const std::string& dir, std::vector<std::string>* skipped = nullptr);

scoring::RunOutcome to_outcome(const LoadedReport& loaded);

struct LeaderboardEntry {
    std::string agent_name;
    double mean_composite = 0.0;  // 0-100
    double gate_pass_rate = 0.0;  // 0-1
    std::map<eval::Category, double> per_category_means;
    std::map<std::string, double> per_problem_means;
    int runs_counted = 0;
};

// One entry per agent, sorted by mean composite descending.
std::vector<LeaderboardEntry> build_leaderboard(const std::vector<LoadedReport>& reports);
json to_json(const LeaderboardEntry& entry);

// Plain-text tables for the report command.
std::string render_summary_text(const std::vector<scoring::SummaryRow>& rows);
// Static page with the summary data embedded as JSON and css bar charts.
std::string render_summary_html(const std::vector<scoring::SummaryRow>& rows,
                                const std::string& title);

json summary_to_json(const std::vector<scoring::SummaryRow>& rows);

}  // namespace gauntlet::reporting
