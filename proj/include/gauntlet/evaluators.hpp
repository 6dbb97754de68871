#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gauntlet/a2a.hpp"
#include "gauntlet/judge.hpp"
#include "gauntlet/problem.hpp"
#include "gauntlet/rules.hpp"
#include "gauntlet/sandbox.hpp"

namespace gauntlet::eval {

enum class EvaluatorId {
    compilation,
    execution,
    memory_safety,
    api_usage,
    numerical_accuracy,
    execution_time,
    readability,
    code_style,
    documentation,
    algorithm_appropriateness,
    solver_choice,
    best_practices,
    error_handling,
    parallel_awareness,
};

enum class Stage { gate, metric, quality };
enum class Category { correctness, performance, code, appropriateness, library_specific };

constexpr int kEvaluatorCount = 14;

struct EvaluatorInfo {
    EvaluatorId id;
    Stage stage;
    Category category;
    // fixed confidence for deterministic evaluators; judge-reported
    // (and memcheck-dependent) ones resolve at run time
    std::optional<double> fixed_confidence;
};

const EvaluatorInfo& info(EvaluatorId id);
const std::array<EvaluatorInfo, kEvaluatorCount>& evaluator_table();

std::string to_string(EvaluatorId id);
std::string to_string(Stage s);
std::string to_string(Category c);
EvaluatorId evaluator_from_string(const std::string& s);
Stage stage_from_string(const std::string& s);
Category category_from_string(const std::string& s);

struct EvaluatorResult {
    EvaluatorId evaluator_id{};
    Stage stage{};
    Category category{};
    double score = 0.0;       // [0,1]
    double confidence = 1.0;  // (0,1]
    bool passed = true;       // meaningful for gates only
    bool excluded = false;    // skipped; never aggregated
    std::string exclusion_reason;
    std::vector<std::string> evidence;
};

// Pre-populated result with the table's stage/category for the id.
EvaluatorResult make_result(EvaluatorId id);
// Placeholder for an evaluator that could not run.
EvaluatorResult make_excluded(EvaluatorId id, const std::string& reason);

// ---- stage 1: gates ------------------------------------------------------

struct CompilationOutcome {
    EvaluatorResult result;
    sandbox::ToolResult tool;  // carries the workspace handle
};
// Compiles the artifact; passed <=> tool reports ok. SandboxError
// propagates (infrastructure, not a gate failure).
CompilationOutcome gate_compilation(const a2a::SubmissionArtifact& artifact,
                                    sandbox::ToolBackend& tools);

struct ExecutionOutcome {
    EvaluatorResult result;
    std::vector<sandbox::ToolResult> case_runs;  // one per test case, in order
};
// Runs every test case with the artifact's base args prepended to the
// case args; passed <=> all ok. When the profile has memcheck, each case
// gets an extra memcheck pass whose report is merged into the retained
// result so the timing of the scoring run stays clean.
ExecutionOutcome gate_execution(const problems::ProblemSpec& spec, const std::string& workspace_id,
                                const std::vector<std::string>& base_args,
                                const sandbox::ToolchainProfile& profile,
                                sandbox::ToolBackend& tools);

EvaluatorResult gate_memory_safety(const std::vector<sandbox::ToolResult>& case_runs,
                                   const problems::ProblemSpec& spec, bool memcheck_available,
                                   const rules::MemorySafetyRules& rules);

EvaluatorResult gate_api_usage(const a2a::SubmissionArtifact& artifact,
                               const rules::ApiRules& rules);

// ---- stage 2: metrics ----------------------------------------------------

// exp(-epsilon/tau), clamped to 1
double accuracy_score_from_error(double epsilon, double tau);
// piecewise linear through (t1,1)(t2,.8)(t3,.6)(t4,.2), then 0.2*t4/t
double time_score(double t, const std::array<double, 4>& thresholds);

EvaluatorResult metric_numerical_accuracy(const std::vector<sandbox::ToolResult>& case_runs,
                                          const problems::ProblemSpec& spec);
EvaluatorResult metric_execution_time(const std::vector<sandbox::ToolResult>& case_runs,
                                      const problems::ProblemSpec& spec);

// ---- stage 3: quality ----------------------------------------------------

// The six judged dimensions. Returns an excluded result (never throws)
// when the judge misbehaves, so the pipeline can carry on.
EvaluatorResult quality_llm(EvaluatorId id, const std::string& rubric_text,
                            const problems::ProblemSpec& spec,
                            const a2a::SubmissionArtifact& artifact, judge::JudgeClient& judge,
                            const rules::RuleSet& rules);

EvaluatorResult quality_error_handling(const a2a::SubmissionArtifact& artifact,
                                       const rules::ErrorHandlingRules& rules);

struct ParallelEvidence {
    int max_requested_ranks = 1;
    bool ranks_downgraded = false;
};
EvaluatorResult quality_parallel_awareness(const a2a::SubmissionArtifact& artifact,
                                           const ParallelEvidence& evidence,
                                           const rules::ParallelRules& rules);

// serialization (reports, wire)
util::json to_json(const EvaluatorResult& r);
EvaluatorResult result_from_json(const util::json& j);

}  // namespace gauntlet::eval
