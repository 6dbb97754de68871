#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gauntlet/errors.hpp"
#include "gauntlet/evaluators.hpp"

namespace gauntlet::scoring {

using eval::Category;
using eval::EvaluatorId;
using eval::EvaluatorResult;
using util::json;

struct ScoringConfig {
    std::map<Category, double> category_weights{
        {Category::correctness, 0.35},  {Category::performance, 0.15},
        {Category::code, 0.15},         {Category::library_specific, 0.20},
        {Category::appropriateness, 0.15},
    };

    // throws ConfigError unless weights are nonnegative and sum to 1 (1e-9)
    void validate() const;

    static ScoringConfig from_json(const json& j);
    json to_json() const;
};

struct CategoryScore {
    Category category{};
    double score = 0.0;  // [0,1]
    std::vector<EvaluatorId> contributing_evaluators;
    double total_confidence = 0.0;
};

struct CompositeReport {
    std::string problem_id;
    std::string task_id;
    bool gate_failed = false;
    std::optional<EvaluatorId> failed_gate;
    std::string failure_reason;  // e.g. "no valid submission"
    std::vector<CategoryScore> category_scores;
    double composite = 0.0;  // [0,100]
    std::vector<EvaluatorResult> evaluator_results;
    std::string started_at;
    std::string finished_at;
    std::vector<std::string> warnings;
};

class EmptyCategoryError : public Error {
public:
    explicit EmptyCategoryError(const std::string& msg) : Error(msg) {}
};

// Confidence-weighted mean over one category's results. Every result must
// belong to the category and not be excluded; empty input throws
// EmptyCategoryError so the caller can renormalize.
CategoryScore aggregate_category(const std::vector<EvaluatorResult>& results, Category category);

struct ComposeContext {
    std::string problem_id;
    std::string task_id;
    std::string started_at;
    std::string finished_at;
    std::string failure_reason;  // forces gate_failed when non-empty
    std::vector<std::string> warnings;
};

// Applies gate short-circuit semantics, then the confidence-weighted
// category aggregation and the weighted composite on 0-100. Categories
// left empty by exclusions are dropped and the remaining weights
// renormalized.
CompositeReport compose(const std::vector<EvaluatorResult>& results, const ScoringConfig& config,
                        const ComposeContext& ctx = {});

// ---- run summaries ---------------------------------------------------

struct RunOutcome {
    std::string agent;
    std::string problem_id;
    bool invalid = false;  // infrastructure failure; excluded from stats
    bool gate_failed = false;
    double composite = 0.0;
    std::map<Category, double> category_scores;
};

enum class GroupBy { agent, problem, agent_problem };

struct SummaryRow {
    std::string agent;       // empty when grouping by problem
    std::string problem_id;  // empty when grouping by agent
    int runs = 0;            // scored runs
    int invalid_runs = 0;
    double mean_composite = 0.0;
    double gate_pass_rate = 0.0;
    std::map<Category, double> category_means;  // over gate-passed runs only
    int zero_scores = 0;
    int above_80 = 0;
};

// Rows in deterministic key order; empty input gives an empty table.
std::vector<SummaryRow> summarize_runs(const std::vector<RunOutcome>& outcomes, GroupBy group_by);

json to_json(const CompositeReport& report);
CompositeReport report_from_json(const json& j);
json to_json(const SummaryRow& row);

}  // namespace gauntlet::scoring
