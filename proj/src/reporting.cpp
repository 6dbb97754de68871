#include "gauntlet/reporting.hpp"

#include "gauntlet/errors.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <sstream>

namespace gauntlet::reporting {

namespace fs = std::filesystem;

json run_record_to_json(const orchestrator::RunRecord& record) {
    // tool results are summarized: diagnostics live in evaluator evidence,
    // and full stdout bodies belong in the sandbox, not the report
    json tools = json::array();
    for (const auto& t : record.tool_results) {
        tools.push_back({{"ok", t.ok},
                         {"exit_code", t.exit_code},
                         {"wall_time_seconds", t.wall_time_seconds},
                         {"timed_out", t.timed_out},
                         {"warnings", t.warnings},
                         {"stdout_excerpt", t.stdout_text.substr(0, 2048)},
                         {"stderr_excerpt", t.stderr_text.substr(0, 2048)}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"agent_name", record.agent_name},
                {"run_index", record.run_index},
                {"invalid", record.invalid},
                {"invalid_reason", record.invalid_reason},
                {"report", scoring::to_json(record.report)},
                {"tool_results", tools}};
}

std::string write_run_report(const std::string& out_dir,
                             const orchestrator::RunRecord& record) {
    fs::create_directories(out_dir);
    const std::string filename = record.agent_name + "_" + record.problem_id + "_" +
                                 std::to_string(record.run_index) + ".json";
    const std::string path = (fs::path(out_dir) / filename).string();
    util::write_file(path, run_record_to_json(record).dump(2) + "\n");
    return path;
}

LoadedReport loaded_report_from_json(const json& j) {
    LoadedReport loaded;
    const int version = util::require_key(j, "schema_version", "run report").get<int>();
    if (version != kSchemaVersion)
        throw SchemaError("schema_version",
                          "unsupported version " + std::to_string(version));
    loaded.agent_name = util::require_string(j, "agent_name", "run report");
    loaded.run_index = j.value("run_index", 0);
    loaded.invalid = j.value("invalid", false);
    loaded.invalid_reason = j.value("invalid_reason", std::string());
    loaded.report = scoring::report_from_json(util::require_key(j, "report", "run report"));
    return loaded;
}

std::vector<LoadedReport> load_reports(const std::string& dir, std::vector<std::string>* skipped) {
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());

    std::vector<LoadedReport> reports;
    for (const auto& f : files) {
        json j;
        try {
            j = util::parse_json(util::read_file(f), f);
        } catch (const std::exception& e) {
            if (skipped) skipped->push_back(f + ": " + e.what());
            continue;
        }
        if (!j.is_object() || !j.contains("schema_version") || !j.contains("report")) {
            if (skipped) skipped->push_back(f + ": not a run report");
            continue;
        }
        reports.push_back(loaded_report_from_json(j));
    }
    return reports;
}

scoring::RunOutcome to_outcome(const LoadedReport& loaded) {
    scoring::RunOutcome outcome;
    outcome.agent = loaded.agent_name;
    outcome.problem_id = loaded.report.problem_id;
    outcome.invalid = loaded.invalid;
    outcome.gate_failed = loaded.report.gate_failed;
    outcome.composite = loaded.report.composite;
    for (const auto& cs : loaded.report.category_scores)
        outcome.category_scores[cs.category] = cs.score;
    return outcome;
}

std::vector<LeaderboardEntry> build_leaderboard(const std::vector<LoadedReport>& reports) {
    struct Acc {
        int runs = 0;
        int gate_passed = 0;
        double composite_sum = 0;
        std::map<eval::Category, std::pair<double, int>> cats;
        std::map<std::string, std::pair<double, int>> problems;
    };
    std::map<std::string, Acc> agents;

    for (const auto& r : reports) {
        if (r.invalid) continue;
        Acc& acc = agents[r.agent_name];
        ++acc.runs;
        acc.composite_sum += r.report.composite;
        auto& [psum, pn] = acc.problems[r.report.problem_id];
        psum += r.report.composite;
        ++pn;
        if (!r.report.gate_failed) {
            ++acc.gate_passed;
            for (const auto& cs : r.report.category_scores) {
                auto& [sum, n] = acc.cats[cs.category];
                sum += cs.score;
                ++n;
            }
        }
    }

    std::vector<LeaderboardEntry> board;
    for (const auto& [agent, acc] : agents) {
        if (acc.runs == 0) continue;
        LeaderboardEntry e;
        e.agent_name = agent;
        e.runs_counted = acc.runs;
        e.mean_composite = acc.composite_sum / acc.runs;
        e.gate_pass_rate = static_cast<double>(acc.gate_passed) / acc.runs;
        for (const auto& [cat, sum_n] : acc.cats)
            e.per_category_means[cat] = sum_n.first / sum_n.second;
        for (const auto& [pid, sum_n] : acc.problems)
            e.per_problem_means[pid] = sum_n.first / sum_n.second;
        board.push_back(std::move(e));
    }
    std::sort(board.begin(), board.end(), [](const auto& a, const auto& b) {
        if (a.mean_composite != b.mean_composite) return a.mean_composite > b.mean_composite;
        return a.agent_name < b.agent_name;
    });
    return board;
}

json to_json(const LeaderboardEntry& entry) {
    json cats = json::object();
    for (const auto& [cat, mean] : entry.per_category_means)
        cats[eval::to_string(cat)] = mean;
    json problems = json::object();
    for (const auto& [pid, mean] : entry.per_problem_means) problems[pid] = mean;
    return json{{"agent_name", entry.agent_name},
                {"mean_composite", entry.mean_composite},
                {"gate_pass_rate", entry.gate_pass_rate},
                {"per_category_means", cats},
                {"per_problem_means", problems},
                {"runs_counted", entry.runs_counted}};
}

namespace {

std::string fmt(double v, int precision = 2) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(precision) << v;
    return ss.str();
}

}  // namespace

std::string render_summary_text(const std::vector<scoring::SummaryRow>& rows) {
    std::ostringstream out;
    out << std::left << std::setw(24) << "agent" << std::setw(20) << "problem" << std::right
        << std::setw(6) << "runs" << std::setw(10) << "mean" << std::setw(10) << "pass"
        << std::setw(7) << "zeros" << std::setw(6) << ">80" << "\n";
    out << std::string(83, '-') << "\n";
    for (const auto& row : rows) {
        out << std::left << std::setw(24) << (row.agent.empty() ? "*" : row.agent)
            << std::setw(20) << (row.problem_id.empty() ? "*" : row.problem_id) << std::right
            << std::setw(6) << row.runs << std::setw(10) << fmt(row.mean_composite, 1)
            << std::setw(10) << fmt(row.gate_pass_rate, 3) << std::setw(7) << row.zero_scores
            << std::setw(6) << row.above_80 << "\n";
        if (!row.category_means.empty()) {
            out << "    categories:";
            for (const auto& [cat, mean] : row.category_means)
                out << " " << eval::to_string(cat) << "=" << fmt(mean, 3);
            out << "\n";
        }
    }
    if (rows.empty()) out << "(no scored runs)\n";
    return out.str();
}

json summary_to_json(const std::vector<scoring::SummaryRow>& rows) {
    json arr = json::array();
    for (const auto& row : rows) arr.push_back(scoring::to_json(row));
    return arr;
}

std::string render_summary_html(const std::vector<scoring::SummaryRow>& rows,
                                const std::string& title) {
    std::ostringstream out;
    out << "<!doctype html>\n<html><head><meta charset=\"utf-8\"><title>" << title
        << "</title>\n"
        << "<style>body{font-family:sans-serif;margin:2em}"
        << ".bar{background:#3a7;height:14px;display:inline-block}"
        << ".row{margin:4px 0}.label{display:inline-block;width:22em}"
        << "td,th{padding:2px 10px;text-align:right}th:first-child,td:first-child"
        << "{text-align:left}</style></head><body>\n"
        << "<h1>" << title << "</h1>\n<div id=\"chart\">\n";
    for (const auto& row : rows) {
        const std::string label =
            (row.agent.empty() ? "*" : row.agent) + " / " +
            (row.problem_id.empty() ? "*" : row.problem_id);
        out << "<div class=\"row\"><span class=\"label\">" << label << "</span>"
            << "<span class=\"bar\" style=\"width:" << fmt(row.mean_composite * 3, 0)
            << "px\"></span> " << fmt(row.mean_composite, 1) << "</div>\n";
    }
    out << "</div>\n<script type=\"application/json\" id=\"summary-data\">\n"
        << summary_to_json(rows).dump(2) << "\n</script>\n</body></html>\n";
    return out.str();
}

}  // namespace gauntlet::reporting
