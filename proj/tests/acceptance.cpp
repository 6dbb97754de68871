// Acceptance suite: one check per release criterion, each printing a
// single PASS/FAIL line. Exit code 0 only when every criterion holds.

#include "fixtures.hpp"
#include "gauntlet/errors.hpp"
#include "gauntlet/evaluators.hpp"
#include "gauntlet/orchestrator.hpp"
#include "gauntlet/reporting.hpp"
#include "gauntlet/scoring.hpp"

#include "httplib.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

using namespace gauntlet;
namespace fs = std::filesystem;

namespace {

struct Criterion {
    int number;
    std::string name;
    std::function<void(std::ostream&)> check;  // throws on failure
    double max_seconds = 0.0;                  // 0 = no runtime budget
};

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

std::string data_path(const std::string& rel) {
    return std::string(TEST_DATA_DIR) + "/" + rel;
}

std::string fresh_root(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("gauntlet_acc_" + tag);
    fs::remove_all(dir);
    return dir.string();
}

// ---- criterion 1: accuracy score exactness --------------------------------

void check_accuracy_exactness(std::ostream&) {
    const double tau = 1e-6;
    const struct {
        double eps;
        double expected;
    } anchors[] = {
        {0.0, 1.0},
        {tau, std::exp(-1.0)},
        {2 * tau, std::exp(-2.0)},
        {10 * tau, std::exp(-10.0)},
    };
    for (const auto& a : anchors) {
        const double got = eval::accuracy_score_from_error(a.eps, tau);
        require(std::abs(got - a.expected) <= 1e-12,
                "accuracy(" + std::to_string(a.eps) + ") = " + std::to_string(got));
    }
}

// ---- criterion 2: time score anchors, continuity, monotonicity ------------

void check_time_score(std::ostream&) {
    const std::array<double, 4> th{1, 5, 15, 60};
    const struct {
        double t;
        double expected;
    } anchors[] = {{1, 1.0}, {5, 0.8}, {15, 0.6}, {60, 0.2}, {120, 0.1}};
    for (const auto& a : anchors) {
        const double got = eval::time_score(a.t, th);
        require(std::abs(got - a.expected) <= 1e-12,
                "time(" + std::to_string(a.t) + ") = " + std::to_string(got));
    }
    for (double t : th) {
        const double left = eval::time_score(t - 1e-9, th);
        const double right = eval::time_score(t + 1e-9, th);
        require(std::abs(left - right) <= 1e-8,
                "discontinuity at t = " + std::to_string(t));
    }
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> times(0.0, 300.0);
    for (int i = 0; i < 10000; ++i) {
        double a = times(rng), b = times(rng);
        if (a > b) std::swap(a, b);
        require(eval::time_score(a, th) >= eval::time_score(b, th) - 1e-12,
                "monotonicity violated between " + std::to_string(a) + " and " +
                    std::to_string(b));
    }
}

// ---- criterion 3: aggregation agrees with a direct formula evaluation -----

double direct_formula_composite(const std::vector<eval::EvaluatorResult>& results,
                                const std::map<eval::Category, double>& weights) {
    using eval::Category;
    for (const auto& r : results)
        if (!r.excluded && r.stage == eval::Stage::gate && !r.passed) return 0.0;

    const Category cats[] = {Category::correctness, Category::performance, Category::code,
                             Category::appropriateness, Category::library_specific};
    double used_weight = 0.0, total = 0.0;
    for (Category c : cats) {
        double num = 0.0, den = 0.0;
        for (const auto& r : results) {
            if (r.excluded || r.category != c) continue;
            num += r.confidence * r.score;
            den += r.confidence;
        }
        if (den == 0.0) continue;
        total += weights.at(c) * (num / den);
        used_weight += weights.at(c);
    }
    return used_weight > 0.0 ? 100.0 * total / used_weight : 0.0;
}

void check_aggregation_oracle(std::ostream&) {
    std::mt19937 rng(987654321);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> conf(0.05, 1.0);
    const scoring::ScoringConfig config;  // default weights

    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<eval::EvaluatorResult> results;
        for (const auto& info : eval::evaluator_table()) {
            if (unit(rng) < 0.2) continue;
            eval::EvaluatorResult r = eval::make_result(info.id);
            r.score = unit(rng);
            r.confidence = conf(rng);
            r.passed = info.stage != eval::Stage::gate || unit(rng) > 0.15;
            if (unit(rng) < 0.08) r = eval::make_excluded(info.id, "synthetic");
            results.push_back(r);
        }
        const double composed = scoring::compose(results, config).composite;
        const double direct = direct_formula_composite(results, config.category_weights);
        require(std::abs(composed - direct) <= 1e-12,
                "trial " + std::to_string(trial) + ": compose " + std::to_string(composed) +
                    " vs direct " + std::to_string(direct));
    }
}

// ---- criteria 4 and 5 share the full pipeline harness ---------------------

struct PipelineHarness {
    a2a::MockPurpleServer purple;
    std::string root;
    std::atomic<int> stage23_starts{0};
    orchestrator::EvaluationJob job;

    PipelineHarness(const std::string& tag, const std::string& program)
        : purple({{"p_norm", fixtures::artifact_for(program)}}), root(fresh_root(tag)) {
        purple.start("127.0.0.1", 0);
        job.spec = fixtures::norm_problem();
        job.agent_endpoint = purple.url();
        job.agent_name = "acceptance";
        job.judge = std::make_shared<judge::ScriptedJudge>(fixtures::pinned_verdicts());
        const std::string r = root;
        job.backend_factory = [r] {
            return std::make_shared<sandbox::Engine>(sandbox::ToolchainProfile::plain_c(), r);
        };
        job.hooks.on_tool_result = [](sandbox::ToolResult& t) { t.wall_time_seconds = 1.0; };
        job.hooks.on_evaluator_start = [this](eval::EvaluatorId id) {
            if (eval::info(id).stage != eval::Stage::gate) ++stage23_starts;
        };
    }
    ~PipelineHarness() { purple.stop(); }
};

void check_gate_short_circuit(std::ostream& log) {
    const struct {
        const char* tag;
        const char* program;
        eval::EvaluatorId expected_gate;
    } cases[] = {
        {"gate_compile", fixtures::kBadCompileProgram, eval::EvaluatorId::compilation},
        {"gate_exec", fixtures::kBadExecProgram, eval::EvaluatorId::execution},
        {"gate_memory", fixtures::kBadMemoryProgram, eval::EvaluatorId::memory_safety},
        {"gate_api", fixtures::kBadApiProgram, eval::EvaluatorId::api_usage},
    };
    for (const auto& c : cases) {
        PipelineHarness harness(c.tag, c.program);
        const auto record = orchestrator::evaluate_once(harness.job, 0);
        require(!record.invalid, std::string(c.tag) + ": run unexpectedly invalid: " +
                                     record.invalid_reason);
        require(record.report.gate_failed, std::string(c.tag) + ": gate did not fail");
        require(record.report.composite == 0.0,
                std::string(c.tag) + ": composite " + std::to_string(record.report.composite));
        require(record.report.failed_gate.has_value() &&
                    *record.report.failed_gate == c.expected_gate,
                std::string(c.tag) + ": wrong failed gate");
        require(harness.stage23_starts.load() == 0,
                std::string(c.tag) + ": later-stage evaluator executed");
        for (const auto& r : record.report.evaluator_results)
            require(r.stage == eval::Stage::gate,
                    std::string(c.tag) + ": non-gate result present in report");
        log << "  " << c.tag << ": failed_gate=" << eval::to_string(c.expected_gate)
            << ", composite=0, later stages never started\n";
    }
}

util::json canonical(const orchestrator::RunRecord& record) {
    util::json j = reporting::run_record_to_json(record);
    j["report"].erase("task_id");
    j["report"].erase("started_at");
    j["report"].erase("finished_at");
    for (auto& t : j["tool_results"]) t.erase("wall_time_seconds");
    return j;
}

void check_end_to_end_determinism(std::ostream& log) {
    PipelineHarness harness("e2e", fixtures::kGoodProgram);

    // direct evaluation of the aggregation formulas on the pinned inputs,
    // kept independent of the scoring module
    const double code_cat = (0.9 * 0.8 + 0.8 * 0.7 + 0.5 * 0.6) / (0.9 + 0.8 + 0.5);
    const double appr_cat = (0.6 * 0.9 + 0.4 * 0.5) / (0.6 + 0.4);
    const double lib_cat = (1.0 * 1.0 + 0.8 * 0.75 + 1.0 * 1.0 + 0.8 * 1.0) /
                           (1.0 + 0.8 + 1.0 + 0.8);
    const double expected =
        100.0 * (0.35 * 1.0 + 0.15 * 1.0 + 0.15 * code_cat + 0.15 * appr_cat + 0.20 * lib_cat);
    require(std::abs(expected - fixtures::kPinnedComposite) <= 1e-9,
            "frozen constant disagrees with the hand formula");

    util::json first;
    for (int run = 0; run < 3; ++run) {
        const auto record = orchestrator::evaluate_once(harness.job, 0);
        require(!record.invalid, "run invalid: " + record.invalid_reason);
        require(!record.report.gate_failed, "unexpected gate failure");
        require(record.report.evaluator_results.size() == 14, "expected all 14 results");
        require(std::abs(record.report.composite - expected) <= 1e-9,
                "composite " + std::to_string(record.report.composite) + " vs expected " +
                    std::to_string(expected));
        const auto canon = canonical(record);
        if (run == 0)
            first = canon;
        else
            require(canon == first, "reports differ between runs");
    }
    log << "  composite = " << fixtures::kPinnedComposite
        << " on all 3 runs, canonical reports identical\n";
}

// ---- criterion 6: static analyzer corpus ----------------------------------

a2a::SubmissionArtifact corpus_artifact(const std::string& filename) {
    a2a::SubmissionArtifact artifact;
    artifact.source_files.push_back({filename, util::read_file(data_path("corpus/" + filename))});
    artifact.entry_point = filename;
    return artifact;
}

void check_static_corpus(std::ostream& log) {
    const auto rules = rules::RuleSet::petsc_defaults();
    int checked = 0;

    auto api = [&](const std::string& file) {
        return eval::gate_api_usage(corpus_artifact(file), rules.api);
    };
    auto errh = [&](const std::string& file) {
        return eval::quality_error_handling(corpus_artifact(file), rules.error_handling);
    };
    auto par = [&](const std::string& file, int ranks) {
        return eval::quality_parallel_awareness(corpus_artifact(file), {ranks, false},
                                                rules.parallel);
    };
    auto cites = [](const eval::EvaluatorResult& r, const std::string& rule) {
        for (const auto& e : r.evidence)
            if (e.find(rule) != std::string::npos) return true;
        return false;
    };

    require(api("good.c").passed, "good.c must pass the api gate");
    require(errh("good.c").score == 1.0, "good.c error handling must be 1.0");
    require(par("good.c", 2).score == 1.0, "good.c parallel awareness must be 1.0");
    checked += 3;

    for (const char* f : {"missing_finalize.c", "double_init.c", "finalize_first.c"}) {
        const auto r = api(f);
        require(!r.passed, std::string(f) + " must fail the api gate");
        require(cites(r, "R1"), std::string(f) + " must cite R1");
        ++checked;
    }
    {
        const auto r = api("private_header.c");
        require(!r.passed && cites(r, "R2"), "private_header.c must fail citing R2");
        ++checked;
    }
    {
        const auto r = api("nonpublic_header.c");
        require(!r.passed && cites(r, "R3"), "nonpublic_header.c must fail citing R3");
        ++checked;
    }

    require(api("unwrapped.c").passed, "unwrapped.c still passes the api gate");
    require(errh("unwrapped.c").score == 0.0, "unwrapped.c error handling must be 0.0");
    checked += 2;

    {
        const auto r = errh("legacy.c");
        require(std::abs(r.score - 0.3) <= 1e-9,
                "legacy.c error handling " + std::to_string(r.score) + " != 0.3");
        ++checked;
    }
    {
        const auto r = errh("mixed_wrap.c");
        require(std::abs(r.score - 0.5) <= 1e-12, "mixed_wrap.c error handling != 0.5");
        ++checked;
    }
    {
        const auto r = errh("no_calls.c");
        require(r.score == 0.0, "no_calls.c error handling != 0");
        require(!r.evidence.empty() && r.evidence[0] == "no library calls found",
                "no_calls.c must explain the zero");
        ++checked;
    }
    {
        const auto r = par("rank_guarded_collective.c", 2);
        require(std::abs(r.score - 0.75) <= 1e-12,
                "rank_guarded_collective.c parallel score != 0.75");
        require(cites(r, "C2"), "rank_guarded_collective.c must cite C2");
        ++checked;
    }
    {
        const auto parallel = par("rank_guarded_print.c", 2);
        require(std::abs(parallel.score - 0.75) <= 1e-12,
                "rank_guarded_print.c parallel score != 0.75 at 2 ranks");
        require(cites(parallel, "C3"), "rank_guarded_print.c must cite C3");
        const auto serial = par("rank_guarded_print.c", 1);
        require(serial.score == 1.0, "rank_guarded_print.c must pass at 1 rank");
        ++checked;
    }
    log << "  12-file corpus: " << checked << " expectations hold\n";
}

// ---- criterion 7: sandbox contract -----------------------------------------

void check_sandbox_contract(std::ostream& log) {
    sandbox::Engine engine(sandbox::ToolchainProfile::plain_c(), fresh_root("contract"));

    sandbox::CompileRequest broken;
    broken.files.emplace_back("main.c", "int main(void) { return 0 }\n");
    broken.entry_point = "main.c";
    const auto bad = engine.compile(broken);
    require(!bad.ok, "invalid file must not compile");
    require(!bad.stderr_text.empty(), "compiler diagnostics must be captured");

    sandbox::CompileRequest sleeper;
    sleeper.files.emplace_back("main.c",
                               "#include <unistd.h>\n"
                               "int main(void) { sleep(30); return 0; }\n");
    sleeper.entry_point = "main.c";
    const auto compiled = engine.compile(sleeper);
    require(compiled.ok, "sleeper must compile");
    const auto ran = engine.run(compiled.workspace_id, {}, 1, 2.0, false);
    require(ran.timed_out, "timeout marker missing");
    require(!ran.ok, "timed-out run must not be ok");
    require(ran.wall_time_seconds >= 2.0 && ran.wall_time_seconds <= 2.5,
            "wall time " + std::to_string(ran.wall_time_seconds) + " outside [2, 2.5]");
    log << "  timeout honored at t=" << ran.wall_time_seconds << " s\n";

    // concurrent sessions write distinct marker files and never see each other
    sandbox::CompileRequest writer;
    writer.files.emplace_back("main.c",
                              "#include <stdio.h>\n"
                              "int main(int argc, char** argv) {\n"
                              "  FILE* f = fopen(\"marker.txt\", \"w\");\n"
                              "  fprintf(f, \"%s\", argv[1]);\n"
                              "  fclose(f);\n"
                              "  f = fopen(\"marker.txt\", \"r\");\n"
                              "  char buf[64] = {0};\n"
                              "  fscanf(f, \"%63s\", buf);\n"
                              "  printf(\"marker = %s\\n\", buf);\n"
                              "  return 0;\n"
                              "}\n");
    writer.entry_point = "main.c";

    auto session = [&](const std::string& tag) {
        const auto c = engine.compile(writer);
        require(c.ok, "marker program must compile");
        const auto r = engine.run(c.workspace_id, {tag}, 1, 10.0, false);
        require(r.ok, "marker program must run");
        require(r.stdout_text == "marker = " + tag + "\n",
                "session " + tag + " saw foreign content: " + r.stdout_text);
        return c.workspace_id;
    };
    auto f1 = std::async(std::launch::async, session, "session_one");
    auto f2 = std::async(std::launch::async, session, "session_two");
    const auto ws1 = f1.get();
    const auto ws2 = f2.get();
    require(ws1 != ws2, "workspaces must differ");
    require(engine.workspace_dir(ws1) != engine.workspace_dir(ws2),
            "workspace directories must differ");
}

// ---- criterion 8: protocol conformance -------------------------------------

void check_protocol_conformance(std::ostream& log) {
    // task/artifact side
    a2a::MockPurpleServer purple({{"p1", fixtures::artifact_for(fixtures::kGoodProgram)}});
    purple.start("127.0.0.1", 0);
    a2a::TaskRequest request{"task-echo-1", "p1", "desc", 10.0};
    const auto artifact = a2a::dispatch_task(purple.url(), request);
    require(artifact.task_id == "task-echo-1", "task_id echo broken");

    bool rejected = false;
    try {
        a2a::dispatch_task(purple.url(), {"task-echo-2", "unknown_problem", "desc", 10.0});
    } catch (const ProtocolError&) {
        rejected = true;
    }
    require(rejected, "unknown problem must raise ProtocolError");

    a2a::SubmissionArtifact invalid = fixtures::artifact_for(fixtures::kGoodProgram);
    invalid.entry_point = "ghost.c";
    bool invalid_rejected = false;
    try {
        a2a::validate_artifact(invalid);
    } catch (const ProtocolError&) {
        invalid_rejected = true;
    }
    require(invalid_rejected, "artifact schema validation broken");
    purple.stop();

    // tool side over live http
    sandbox::ToolServer tools(sandbox::ToolchainProfile::plain_c(), fresh_root("proto"));
    const int port = tools.start("127.0.0.1", 0);
    httplib::Client raw("http://127.0.0.1:" + std::to_string(port));

    auto parse_reply = [](const httplib::Result& res) {
        require(static_cast<bool>(res), "tool server unreachable");
        return util::parse_json(res->body, "rpc reply");
    };

    const auto parse_err =
        parse_reply(raw.Post("/mcp", "{this is not json", "application/json"));
    require(parse_err["error"]["code"] == -32700, "malformed envelope must be -32700");

    const auto missing = parse_reply(raw.Post(
        "/mcp", util::json{{"jsonrpc", "2.0"}, {"id", 7}, {"method", "tools/annihilate"}}.dump(),
        "application/json"));
    require(missing["error"]["code"] == -32601, "unknown method must be -32601");

    const auto listed = parse_reply(raw.Post(
        "/mcp", util::json{{"jsonrpc", "2.0"}, {"id", 8}, {"method", "tools/list"}}.dump(),
        "application/json"));
    std::vector<std::string> names;
    for (const auto& t : listed["result"]["tools"]) names.push_back(t["name"]);
    require(names == std::vector<std::string>{"compile", "run"},
            "tools/list must name exactly compile and run");
    tools.stop();
    log << "  task echo, artifact validation, -32700/-32601, tools/list all conform\n";
}

// ---- criterion 9: summary semantics ----------------------------------------

void check_summary_semantics(std::ostream& log) {
    using eval::Category;
    using scoring::RunOutcome;
    // six synthetic reports; category means must cover gate-passed runs only
    const std::vector<RunOutcome> runs{
        {"m1", "p1", false, false, 90.0, {{Category::correctness, 0.9}, {Category::code, 0.8}}},
        {"m1", "p1", false, true, 0.0, {{Category::correctness, 0.1}, {Category::code, 0.1}}},
        {"m1", "p1", false, false, 60.0, {{Category::correctness, 0.5}, {Category::code, 0.6}}},
        {"m1", "p2", false, false, 100.0, {{Category::correctness, 1.0}}},
        {"m1", "p2", false, true, 0.0, {{Category::correctness, 0.9}}},
        {"m1", "p2", false, false, 20.0, {{Category::correctness, 0.2}}},
    };

    const auto by_problem = scoring::summarize_runs(runs, scoring::GroupBy::problem);
    require(by_problem.size() == 2, "expected two problem rows");
    const auto& p1 = by_problem[0];
    require(p1.problem_id == "p1", "row order");
    require(std::abs(p1.mean_composite - 50.0) <= 1e-12, "p1 mean");
    require(std::abs(p1.gate_pass_rate - 2.0 / 3.0) <= 1e-12, "p1 pass rate");
    require(p1.zero_scores == 1 && p1.above_80 == 1, "p1 counters");
    require(std::abs(p1.category_means.at(Category::correctness) - 0.7) <= 1e-12,
            "p1 correctness mean must exclude the gate-failed run");
    require(std::abs(p1.category_means.at(Category::code) - 0.7) <= 1e-12, "p1 code mean");

    const auto& p2 = by_problem[1];
    require(std::abs(p2.mean_composite - 40.0) <= 1e-12, "p2 mean");
    require(std::abs(p2.category_means.at(Category::correctness) - 0.6) <= 1e-12,
            "p2 correctness mean must exclude the gate-failed run");

    const auto by_agent = scoring::summarize_runs(runs, scoring::GroupBy::agent);
    require(by_agent.size() == 1, "expected one agent row");
    const auto& m1 = by_agent[0];
    require(std::abs(m1.mean_composite - 45.0) <= 1e-12, "agent mean");
    require(std::abs(m1.gate_pass_rate - 2.0 / 3.0) <= 1e-12, "agent pass rate");
    require(m1.zero_scores == 2 && m1.above_80 == 2, "agent counters");
    require(std::abs(m1.category_means.at(Category::correctness) - 0.65) <= 1e-12,
            "agent correctness mean over the four gate-passed runs");
    require(std::abs(m1.category_means.at(Category::code) - 0.7) <= 1e-12, "agent code mean");
    log << "  category means computed over gate-passed attempts only\n";
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "accuracy score matches exp(-eps/tau) at 0, tau, 2tau, 10tau",
         check_accuracy_exactness, 1.0},
        {2, "time score anchors, threshold continuity, monotonicity", check_time_score, 1.0},
        {3, "composed scores match direct formula evaluation on 1000 random sets",
         check_aggregation_oracle, 5.0},
        {4, "each failing gate zeroes the run and stops later stages", check_gate_short_circuit},
        {5, "end-to-end pipeline reproduces the hand-derived composite deterministically",
         check_end_to_end_determinism, 30.0},
        {6, "static analyzer corpus produces the expected verdicts and fractions",
         check_static_corpus, 5.0},
        {7, "sandbox honors diagnostics, timeouts and workspace isolation",
         check_sandbox_contract},
        {8, "wire protocols conform (task echo, artifact schema, json-rpc errors, tools/list)",
         check_protocol_conformance},
        {9, "summaries average categories over gate-passed attempts only",
         check_summary_semantics},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        std::ostringstream detail;
        const auto start = std::chrono::steady_clock::now();
        bool ok = true;
        std::string error;
        try {
            criterion.check(detail);
        } catch (const std::exception& e) {
            ok = false;
            error = e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (ok && criterion.max_seconds > 0 && seconds > criterion.max_seconds) {
            ok = false;
            error = "runtime budget exceeded: " + std::to_string(seconds) + " s > " +
                    std::to_string(criterion.max_seconds) + " s";
        }
        std::cout << (ok ? "PASS" : "FAIL") << "  [" << criterion.number << "] "
                  << criterion.name << "  (" << seconds << " s)\n";
        if (!detail.str().empty()) std::cout << detail.str();
        if (!ok) {
            std::cout << "      reason: " << error << "\n";
            ++failures;
        }
    }
    std::cout << (failures == 0 ? "all criteria passed" : "criteria failed") << "\n";
    return failures == 0 ? 0 : 1;
}
