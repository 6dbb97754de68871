#include "gauntlet/scoring.hpp"

#include <algorithm>
#include <cmath>

namespace gauntlet::scoring {

namespace {

const std::vector<Category> kAllCategories{
    Category::correctness, Category::performance, Category::code, Category::appropriateness,
    Category::library_specific};

// compilation -> execution -> memory_safety -> api_usage
const std::vector<EvaluatorId> kGateOrder{
    EvaluatorId::compilation, EvaluatorId::execution, EvaluatorId::memory_safety,
    EvaluatorId::api_usage};

}  // namespace

void ScoringConfig::validate() const {
    double sum = 0;
    for (const auto& [cat, w] : category_weights) {
        if (w < 0) throw ConfigError("negative weight for category " + eval::to_string(cat));
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw ConfigError("category weights must sum to 1, got " + std::to_string(sum));
}

ScoringConfig ScoringConfig::from_json(const json& j) {
    ScoringConfig cfg;
    if (j.contains("category_weights")) {
        cfg.category_weights.clear();
        for (const auto& [key, value] : j["category_weights"].items())
            cfg.category_weights[eval::category_from_string(key)] = value.get<double>();
    }
    cfg.validate();
    return cfg;
}

json ScoringConfig::to_json() const {
    json weights = json::object();
    for (const auto& [cat, w] : category_weights) weights[eval::to_string(cat)] = w;
    return json{{"category_weights", weights}};
}

CategoryScore aggregate_category(const std::vector<EvaluatorResult>& results, Category category) {
    if (results.empty())
        throw EmptyCategoryError("no results for category " + eval::to_string(category));

    CategoryScore cs;
    cs.category = category;
    double weighted = 0, total_conf = 0;
    for (const auto& r : results) {
        if (r.category != category)
            throw Error("result for " + eval::to_string(r.evaluator_id) +
                        " aggregated into wrong category " + eval::to_string(category));
        if (r.excluded)
            throw Error("excluded result for " + eval::to_string(r.evaluator_id) +
                        " must not be aggregated");
        weighted += r.confidence * r.score;
        total_conf += r.confidence;
        cs.contributing_evaluators.push_back(r.evaluator_id);
    }
    cs.total_confidence = total_conf;
    cs.score = weighted / total_conf;
    return cs;
}

CompositeReport compose(const std::vector<EvaluatorResult>& results, const ScoringConfig& config,
                        const ComposeContext& ctx) {
    config.validate();

    CompositeReport report;
    report.problem_id = ctx.problem_id;
    report.task_id = ctx.task_id;
    report.started_at = ctx.started_at;
    report.finished_at = ctx.finished_at;
    report.warnings = ctx.warnings;
    report.evaluator_results = results;

    for (const auto& r : results) {
        const auto& expect = eval::info(r.evaluator_id);
        if (r.stage != expect.stage || r.category != expect.category)
            throw Error("result for " + eval::to_string(r.evaluator_id) +
                        " carries inconsistent stage/category");
        if (!r.excluded) {
            if (r.score < 0 || r.score > 1)
                throw Error("score out of [0,1] for " + eval::to_string(r.evaluator_id));
            if (r.confidence <= 0 || r.confidence > 1)
                throw Error("confidence out of (0,1] for " + eval::to_string(r.evaluator_id));
        }
        if (r.excluded && !r.exclusion_reason.empty())
            report.warnings.push_back("evaluator " + eval::to_string(r.evaluator_id) +
                                      " excluded: " + r.exclusion_reason);
    }

    // gate short-circuit: any failed gate zeroes the run
    if (!ctx.failure_reason.empty()) {
        report.gate_failed = true;
        report.failure_reason = ctx.failure_reason;
        report.composite = 0.0;
        return report;
    }
    for (EvaluatorId gate_id : kGateOrder) {
        for (const auto& r : results) {
            if (r.evaluator_id == gate_id && !r.excluded && !r.passed) {
                report.gate_failed = true;
                report.failed_gate = gate_id;
                report.composite = 0.0;
                return report;
            }
        }
    }

    // Eq-style confidence-weighted category means, then the weighted
    // composite over populated categories with weights renormalized
    double weight_sum = 0, acc = 0;
    for (Category cat : kAllCategories) {
        std::vector<EvaluatorResult> members;
        for (const auto& r : results)
            if (r.category == cat && !r.excluded) members.push_back(r);
        if (members.empty()) {
            const double w = config.category_weights.count(cat)
                                 ? config.category_weights.at(cat)
                                 : 0.0;
            if (w > 0)
                report.warnings.push_back("category " + eval::to_string(cat) +
                                          " has no contributing evaluators; weight redistributed");
            continue;
        }
        CategoryScore cs = aggregate_category(members, cat);
        const double w =
            config.category_weights.count(cat) ? config.category_weights.at(cat) : 0.0;
        weight_sum += w;
        acc += w * cs.score;
        report.category_scores.push_back(std::move(cs));
    }

    if (weight_sum <= 0) {
        report.warnings.push_back("no populated category carries weight; composite forced to 0");
        report.composite = 0.0;
        return report;
    }
    report.composite = 100.0 * acc / weight_sum;
    return report;
}

namespace {

struct Accumulator {
    int runs = 0;
    int invalid = 0;
    int gate_passed = 0;
    double composite_sum = 0;
    int zero_scores = 0;
    int above_80 = 0;
    std::map<Category, std::pair<double, int>> category_sums;  // gate-passed only
};

}  // namespace

std::vector<SummaryRow> summarize_runs(const std::vector<RunOutcome>& outcomes, GroupBy group_by) {
    std::map<std::pair<std::string, std::string>, Accumulator> groups;

    for (const auto& run : outcomes) {
        std::pair<std::string, std::string> key;
        switch (group_by) {
            case GroupBy::agent: key = {run.agent, ""}; break;
            case GroupBy::problem: key = {"", run.problem_id}; break;
            case GroupBy::agent_problem: key = {run.agent, run.problem_id}; break;
        }
        Accumulator& acc = groups[key];
        if (run.invalid) {
            ++acc.invalid;
            continue;
        }
        ++acc.runs;
        acc.composite_sum += run.composite;
        if (run.composite == 0.0) ++acc.zero_scores;
        if (run.composite > 80.0) ++acc.above_80;
        if (!run.gate_failed) {
            ++acc.gate_passed;
            for (const auto& [cat, score] : run.category_scores) {
                auto& [sum, n] = acc.category_sums[cat];
                sum += score;
                ++n;
            }
        }
    }

    std::vector<SummaryRow> rows;
    for (const auto& [key, acc] : groups) {
        SummaryRow row;
        row.agent = key.first;
        row.problem_id = key.second;
        row.runs = acc.runs;
        row.invalid_runs = acc.invalid;
        row.mean_composite = acc.runs ? acc.composite_sum / acc.runs : 0.0;
        row.gate_pass_rate = acc.runs ? static_cast<double>(acc.gate_passed) / acc.runs : 0.0;
        row.zero_scores = acc.zero_scores;
        row.above_80 = acc.above_80;
        for (const auto& [cat, sum_n] : acc.category_sums)
            row.category_means[cat] = sum_n.first / sum_n.second;
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const CompositeReport& report) {
    json cats = json::array();
    for (const auto& cs : report.category_scores) {
        json contributors = json::array();
        for (auto id : cs.contributing_evaluators) contributors.push_back(eval::to_string(id));
        cats.push_back({{"category", eval::to_string(cs.category)},
                        {"score", cs.score},
                        {"contributing_evaluators", contributors},
                        {"total_confidence", cs.total_confidence}});
    }
    json evals = json::array();
    for (const auto& r : report.evaluator_results) evals.push_back(eval::to_json(r));
    return json{{"problem_id", report.problem_id},
                {"task_id", report.task_id},
                {"gate_failed", report.gate_failed},
                {"failed_gate",
                 report.failed_gate ? json(eval::to_string(*report.failed_gate)) : json(nullptr)},
                {"failure_reason", report.failure_reason},
                {"category_scores", cats},
                {"composite", report.composite},
                {"evaluator_results", evals},
                {"started_at", report.started_at},
                {"finished_at", report.finished_at},
                {"warnings", report.warnings}};
}

CompositeReport report_from_json(const json& j) {
    CompositeReport report;
    report.problem_id = util::require_string(j, "problem_id", "report");
    report.task_id = j.value("task_id", std::string());
    report.gate_failed = util::require_key(j, "gate_failed", "report").get<bool>();
    if (j.contains("failed_gate") && !j["failed_gate"].is_null())
        report.failed_gate = eval::evaluator_from_string(j["failed_gate"].get<std::string>());
    report.failure_reason = j.value("failure_reason", std::string());
    report.composite = util::require_number(j, "composite", "report");
    if (j.contains("category_scores")) {
        for (const auto& c : j["category_scores"]) {
            CategoryScore cs;
            cs.category = eval::category_from_string(util::require_string(c, "category", "category score"));
            cs.score = util::require_number(c, "score", "category score");
            cs.total_confidence = c.value("total_confidence", 0.0);
            if (c.contains("contributing_evaluators"))
                for (const auto& id : c["contributing_evaluators"])
                    cs.contributing_evaluators.push_back(
                        eval::evaluator_from_string(id.get<std::string>()));
            report.category_scores.push_back(std::move(cs));
        }
    }
    if (j.contains("evaluator_results"))
        for (const auto& r : j["evaluator_results"])
            report.evaluator_results.push_back(eval::result_from_json(r));
    report.started_at = j.value("started_at", std::string());
    report.finished_at = j.value("finished_at", std::string());
    if (j.contains("warnings"))
        for (const auto& w : j["warnings"]) report.warnings.push_back(w.get<std::string>());
    return report;
}

json to_json(const SummaryRow& row) {
    json cats = json::object();
    for (const auto& [cat, mean] : row.category_means) cats[eval::to_string(cat)] = mean;
    return json{{"agent", row.agent},
                {"problem_id", row.problem_id},
                {"runs", row.runs},
                {"invalid_runs", row.invalid_runs},
                {"mean_composite", row.mean_composite},
                {"gate_pass_rate", row.gate_pass_rate},
                {"category_means", cats},
                {"zero_scores", row.zero_scores},
                {"above_80", row.above_80}};
}

}  // namespace gauntlet::scoring
