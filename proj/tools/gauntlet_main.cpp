// gauntlet: drive evaluations against a model-under-test agent and a tool
// server, then summarize the resulting report files.
//
//   gauntlet run --problems ./problems --agent http://localhost:9001 \
//       --tools http://localhost:9100 --judge mock --out ./results
//   gauntlet report --results ./results --format text --leaderboard lb.json

#include "CLI11.hpp"

#include "gauntlet/errors.hpp"
#include "gauntlet/orchestrator.hpp"
#include "gauntlet/problem.hpp"
#include "gauntlet/reporting.hpp"

#include <filesystem>
#include <iostream>
#include <memory>

namespace {

using namespace gauntlet;

std::shared_ptr<judge::JudgeClient> make_judge(const std::string& spec) {
    if (spec == "mock") return std::make_shared<judge::MockJudge>();
    if (spec.rfind("http:", 0) == 0) {
        std::string url = spec.substr(5);
        if (url.rfind("//", 0) == 0) url = "http:" + url;  // --judge http://host form
        return std::make_shared<judge::HttpJudge>(url);
    }
    throw ConfigError("unknown judge spec '" + spec + "' (expected mock or http:<url>)");
}

int cmd_run(const std::string& problems_dir, const std::string& agent_url,
            const std::string& tools_url, const std::string& judge_spec,
            const std::string& profile_path, const std::string& rules_path, int repetitions,
            const std::string& out_dir, int parallel, bool keep_artifacts) {
    std::vector<problems::ProblemSpec> specs;
    sandbox::ToolchainProfile profile = sandbox::ToolchainProfile::plain_c();
    rules::RuleSet ruleset = rules::RuleSet::petsc_defaults();
    std::shared_ptr<judge::JudgeClient> judge_client;
    try {
        specs = problems::load_registry(problems_dir);
        if (specs.empty()) {
            std::cerr << "no problem files in " << problems_dir << "\n";
            return 2;
        }
        if (!profile_path.empty()) profile = sandbox::ToolchainProfile::load(profile_path);
        if (!rules_path.empty()) ruleset = rules::RuleSet::load(rules_path);
        judge_client = make_judge(judge_spec);
    } catch (const std::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    }

    std::vector<orchestrator::EvaluationJob> jobs;
    for (const auto& spec : specs) {
        orchestrator::EvaluationJob job;
        job.spec = spec;
        job.agent_endpoint = agent_url;
        job.tool_endpoint = tools_url;
        job.profile = profile;
        job.rules = ruleset;
        job.judge = judge_client;
        job.repetitions = repetitions;
        job.keep_artifacts = keep_artifacts;
        jobs.push_back(std::move(job));
    }

    const auto records = orchestrator::evaluate_suite(jobs, parallel);

    bool infrastructure_trouble = false;
    std::vector<scoring::RunOutcome> outcomes;
    for (const auto& record : records) {
        try {
            const std::string path = reporting::write_run_report(out_dir, record);
            std::cout << (record.invalid ? "invalid " : "scored  ") << path;
            if (!record.invalid)
                std::cout << "  composite=" << record.report.composite
                          << (record.report.gate_failed ? " (gate failed)" : "");
            std::cout << "\n";
        } catch (const std::exception& e) {
            std::cerr << "cannot write report: " << e.what() << "\n";
            infrastructure_trouble = true;
        }
        if (record.invalid) {
            std::cerr << "run " << record.agent_name << "/" << record.problem_id << "/"
                      << record.run_index << " invalid: " << record.invalid_reason << "\n";
            infrastructure_trouble = true;
        }
        outcomes.push_back(orchestrator::to_outcome(record));
    }

    const auto rows = scoring::summarize_runs(outcomes, scoring::GroupBy::agent_problem);
    util::write_file((std::filesystem::path(out_dir) / "summary.json").string(),
                     reporting::summary_to_json(rows).dump(2) + "\n");
    std::cout << reporting::render_summary_text(rows);
    return infrastructure_trouble ? 1 : 0;
}

int cmd_report(const std::string& results_dir, const std::string& format,
               const std::string& leaderboard_path) {
    std::vector<reporting::LoadedReport> reports;
    std::vector<std::string> skipped;
    try {
        reports = reporting::load_reports(results_dir, &skipped);
    } catch (const std::exception& e) {
        std::cerr << "cannot read results: " << e.what() << "\n";
        return 2;
    }
    for (const auto& s : skipped) std::cerr << "skipped " << s << "\n";

    std::vector<scoring::RunOutcome> outcomes;
    outcomes.reserve(reports.size());
    for (const auto& r : reports) outcomes.push_back(reporting::to_outcome(r));

    const auto per_pair = scoring::summarize_runs(outcomes, scoring::GroupBy::agent_problem);
    const auto per_agent = scoring::summarize_runs(outcomes, scoring::GroupBy::agent);

    if (format == "text") {
        std::cout << "per agent/problem:\n"
                  << reporting::render_summary_text(per_pair) << "\nper agent totals:\n"
                  << reporting::render_summary_text(per_agent);
    } else if (format == "json") {
        util::json out{{"per_agent_problem", reporting::summary_to_json(per_pair)},
                       {"per_agent", reporting::summary_to_json(per_agent)}};
        std::cout << out.dump(2) << "\n";
    } else if (format == "html") {
        std::vector<scoring::SummaryRow> all = per_pair;
        all.insert(all.end(), per_agent.begin(), per_agent.end());
        std::cout << reporting::render_summary_html(all, "evaluation summary");
    } else {
        std::cerr << "unknown format: " << format << "\n";
        return 2;
    }

    if (!leaderboard_path.empty()) {
        const auto board = reporting::build_leaderboard(reports);
        util::json arr = util::json::array();
        for (const auto& e : board) arr.push_back(reporting::to_json(e));
        util::write_file(leaderboard_path, arr.dump(2) + "\n");
        std::cerr << "leaderboard written to " << leaderboard_path << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evaluation harness for agent-generated library code"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "evaluate every problem against an agent");
    std::string problems_dir, agent_url, tools_url, out_dir;
    std::string judge_spec = "mock";
    std::string profile_path, rules_path;
    int repetitions = 3, parallel = 2;
    bool keep_artifacts = false;
    run->add_option("--problems", problems_dir, "directory of problem JSON files")->required();
    run->add_option("--agent", agent_url, "model-under-test endpoint URL")->required();
    run->add_option("--tools", tools_url, "tool server endpoint URL")->required();
    run->add_option("--judge", judge_spec, "mock or http:<url>");
    run->add_option("--profile", profile_path, "toolchain profile JSON (default plain-c)");
    run->add_option("--rules", rules_path, "rule file overriding the built-in library rules");
    run->add_option("--repetitions", repetitions, "runs per problem");
    run->add_option("--out", out_dir, "directory for report JSON files")->required();
    run->add_option("--parallel", parallel, "concurrent evaluations");
    run->add_flag("--keep-artifacts", keep_artifacts, "keep sandbox workspaces");

    // report
    auto* report = app.add_subcommand("report", "summarize a results directory");
    std::string results_dir, format = "text", leaderboard_path;
    report->add_option("--results", results_dir, "directory of run report files")->required();
    report->add_option("--format", format, "text | json | html");
    report->add_option("--leaderboard", leaderboard_path, "write leaderboard JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed())
            return cmd_run(problems_dir, agent_url, tools_url, judge_spec, profile_path,
                           rules_path, repetitions, out_dir, parallel, keep_artifacts);
        return cmd_report(results_dir, format, leaderboard_path);
    } catch (const gauntlet::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
