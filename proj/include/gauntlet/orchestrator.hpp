#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gauntlet/a2a.hpp"
#include "gauntlet/evaluators.hpp"
#include "gauntlet/judge.hpp"
#include "gauntlet/problem.hpp"
#include "gauntlet/rules.hpp"
#include "gauntlet/sandbox.hpp"
#include "gauntlet/scoring.hpp"

namespace gauntlet::orchestrator {

struct JobHooks {
    // fires when an evaluator actually starts computing (not when skipped)
    std::function<void(eval::EvaluatorId)> on_evaluator_start;
    // lets tests pin nondeterministic fields (wall times) on tool results
    std::function<void(sandbox::ToolResult&)> on_tool_result;
};

struct EvaluationJob {
    problems::ProblemSpec spec;
    std::string agent_endpoint;
    std::string tool_endpoint;
    std::string agent_name;  // report label; defaults to an endpoint slug
    sandbox::ToolchainProfile profile = sandbox::ToolchainProfile::plain_c();
    std::shared_ptr<judge::JudgeClient> judge = std::make_shared<judge::MockJudge>();
    rules::RuleSet rules = rules::RuleSet::petsc_defaults();
    std::map<std::string, std::string> rubrics;  // rubric_id -> text; built-ins when absent
    scoring::ScoringConfig scoring;
    int repetitions = 3;
    bool keep_artifacts = false;
    double dispatch_deadline_seconds = 60.0;
    int judge_parallelism = 4;  // concurrent judge calls
    JobHooks hooks;
    // when set, used instead of a ToolClient on tool_endpoint (tests,
    // in-process runs)
    std::function<std::shared_ptr<sandbox::ToolBackend>()> backend_factory;
};

struct RunRecord {
    std::string agent_name;
    std::string problem_id;
    int run_index = 0;
    bool invalid = false;  // infrastructure failure; not scored
    std::string invalid_reason;
    std::optional<a2a::SubmissionArtifact> submission;
    std::vector<sandbox::ToolResult> tool_results;  // compile first, then case runs
    scoring::CompositeReport report;
};

// One full evaluation: dispatch -> gates -> metrics -> quality -> compose.
// Gates run in pipeline order (the static API gate concurrently with the
// tool-driven ones); any gate failure stops later stages. Throws nothing:
// infrastructure faults come back as invalid records.
RunRecord evaluate_once(const EvaluationJob& job, int run_index);

// Every job, `repetitions` times each, across a bounded worker pool.
// Records come back in deterministic (job, run_index) order; a failing
// run never disturbs the others.
std::vector<RunRecord> evaluate_suite(const std::vector<EvaluationJob>& jobs, int parallelism);

// scoring-level view of a record, for summaries
scoring::RunOutcome to_outcome(const RunRecord& record);

}  // namespace gauntlet::orchestrator
