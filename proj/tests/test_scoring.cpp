#include "doctest.h"

#include "gauntlet/scoring.hpp"

#include <cmath>
#include <random>

using namespace gauntlet;
using eval::Category;
using eval::EvaluatorId;
using eval::EvaluatorResult;

namespace {

EvaluatorResult result_of(EvaluatorId id, double score, double confidence, bool passed = true) {
    EvaluatorResult r = eval::make_result(id);
    r.score = score;
    r.confidence = confidence;
    r.passed = passed;
    return r;
}

// every evaluator at full score; gates passed
std::vector<EvaluatorResult> perfect_results() {
    std::vector<EvaluatorResult> results;
    for (const auto& info : eval::evaluator_table())
        results.push_back(result_of(info.id, 1.0, info.fixed_confidence.value_or(0.9)));
    return results;
}

// independent reference implementation of the two aggregation steps,
// written from the formulas rather than the scoring module
double direct_composite(const std::vector<EvaluatorResult>& results,
                        const std::map<Category, double>& weights) {
    const Category cats[] = {Category::correctness, Category::performance, Category::code,
                             Category::appropriateness, Category::library_specific};
    for (const auto& r : results)
        if (!r.excluded && r.stage == eval::Stage::gate && !r.passed) return 0.0;

    double total_weight = 0.0, acc = 0.0;
    for (Category c : cats) {
        double num = 0.0, den = 0.0;
        for (const auto& r : results) {
            if (r.excluded || r.category != c) continue;
            num += r.confidence * r.score;
            den += r.confidence;
        }
        if (den == 0.0) continue;
        const double w = weights.count(c) ? weights.at(c) : 0.0;
        acc += w * (num / den);
        total_weight += w;
    }
    if (total_weight <= 0.0) return 0.0;
    return 100.0 * acc / total_weight;
}

}  // namespace

TEST_CASE("default weights match the documented split and validate") {
    scoring::ScoringConfig config;
    config.validate();
    CHECK(config.category_weights.at(Category::correctness) == doctest::Approx(0.35));
    CHECK(config.category_weights.at(Category::performance) == doctest::Approx(0.15));
    CHECK(config.category_weights.at(Category::code) == doctest::Approx(0.15));
    CHECK(config.category_weights.at(Category::library_specific) == doctest::Approx(0.20));
    CHECK(config.category_weights.at(Category::appropriateness) == doctest::Approx(0.15));
}

TEST_CASE("invalid weights are rejected") {
    scoring::ScoringConfig config;
    config.category_weights[Category::code] = 0.5;  // sum now 1.35
    CHECK_THROWS_AS(config.validate(), ConfigError);

    scoring::ScoringConfig negative;
    negative.category_weights[Category::code] = -0.15;
    negative.category_weights[Category::correctness] = 0.65;
    CHECK_THROWS_AS(negative.validate(), ConfigError);
}

TEST_CASE("aggregate_category implements the confidence-weighted mean") {
    SUBCASE("single result is the identity") {
        const auto cs = scoring::aggregate_category(
            {result_of(EvaluatorId::readability, 0.7, 1.0)}, Category::code);
        CHECK(cs.score == doctest::Approx(0.7).epsilon(1e-12));
        CHECK(cs.total_confidence == doctest::Approx(1.0));
    }
    SUBCASE("hand-computed two-result mean") {
        // (1.0*0.8 + 0.5*0.4) / 1.5 = 2/3
        const auto cs = scoring::aggregate_category(
            {result_of(EvaluatorId::readability, 0.8, 1.0),
             result_of(EvaluatorId::code_style, 0.4, 0.5)},
            Category::code);
        CHECK(std::abs(cs.score - 2.0 / 3.0) < 1e-12);
    }
    SUBCASE("constant scores are invariant to confidences") {
        const auto cs = scoring::aggregate_category(
            {result_of(EvaluatorId::readability, 0.6, 0.9),
             result_of(EvaluatorId::code_style, 0.6, 0.2),
             result_of(EvaluatorId::documentation, 0.6, 0.55)},
            Category::code);
        CHECK(cs.score == doctest::Approx(0.6).epsilon(1e-12));
    }
    SUBCASE("empty category throws for the caller to renormalize") {
        CHECK_THROWS_AS(scoring::aggregate_category({}, Category::code),
                        scoring::EmptyCategoryError);
    }
    SUBCASE("scale invariance in confidence") {
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> unit(0.01, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<EvaluatorResult> results{
                result_of(EvaluatorId::readability, unit(rng), unit(rng)),
                result_of(EvaluatorId::code_style, unit(rng), unit(rng)),
                result_of(EvaluatorId::documentation, unit(rng), unit(rng))};
            const double base = scoring::aggregate_category(results, Category::code).score;
            const double k = 0.05 + 0.9 * unit(rng);  // keep confidences in (0,1]
            for (auto& r : results) r.confidence *= k;
            const double scaled = scoring::aggregate_category(results, Category::code).score;
            CHECK(std::abs(base - scaled) < 1e-12);
        }
    }
}

TEST_CASE("compose: all perfect scores give exactly 100") {
    const auto report = scoring::compose(perfect_results(), scoring::ScoringConfig{});
    CHECK_FALSE(report.gate_failed);
    CHECK(report.composite == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(report.category_scores.size() == 5);
}

TEST_CASE("compose: correctness at 0.5 with defaults lands on 82.5") {
    // force every correctness evaluator to 0.5 with equal confidence
    auto results = perfect_results();
    for (auto& r : results)
        if (r.category == Category::correctness) {
            r.score = 0.5;
            r.confidence = 1.0;
        }
    const auto report = scoring::compose(results, scoring::ScoringConfig{});
    CHECK(report.composite == doctest::Approx(82.5).epsilon(1e-9));
}

TEST_CASE("compose: any failed gate zeroes the composite") {
    for (EvaluatorId gate : {EvaluatorId::compilation, EvaluatorId::execution,
                             EvaluatorId::memory_safety, EvaluatorId::api_usage}) {
        auto results = perfect_results();
        for (auto& r : results)
            if (r.evaluator_id == gate) {
                r.passed = false;
                r.score = 0.0;
            }
        const auto report = scoring::compose(results, scoring::ScoringConfig{});
        CHECK(report.gate_failed);
        CHECK(report.composite == 0.0);
        REQUIRE(report.failed_gate.has_value());
        CHECK(*report.failed_gate == gate);
    }
}

TEST_CASE("compose: failed_gate names the first failure in pipeline order") {
    auto results = perfect_results();
    for (auto& r : results)
        if (r.evaluator_id == EvaluatorId::execution || r.evaluator_id == EvaluatorId::api_usage) {
            r.passed = false;
            r.score = 0.0;
        }
    const auto report = scoring::compose(results, scoring::ScoringConfig{});
    REQUIRE(report.failed_gate.has_value());
    CHECK(*report.failed_gate == EvaluatorId::execution);
}

TEST_CASE("compose: excluded evaluators drop out and empty categories renormalize") {
    auto results = perfect_results();
    // degrade one performance-free category fully: exclude all code judges
    for (auto& r : results)
        if (r.category == Category::code)
            r = eval::make_excluded(r.evaluator_id, "judge protocol error: test");
    const auto report = scoring::compose(results, scoring::ScoringConfig{});
    CHECK_FALSE(report.gate_failed);
    // remaining categories all score 1 -> renormalized composite stays 100
    CHECK(report.composite == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(report.category_scores.size() == 4);
    bool warned = false;
    for (const auto& w : report.warnings)
        if (w.find("code") != std::string::npos) warned = true;
    CHECK(warned);
}

TEST_CASE("compose: dispatch failure reason forces a zero report") {
    std::vector<EvaluatorResult> slots;
    for (EvaluatorId id : {EvaluatorId::compilation, EvaluatorId::execution,
                           EvaluatorId::memory_safety, EvaluatorId::api_usage})
        slots.push_back(eval::make_excluded(id, "no submission to evaluate"));
    scoring::ComposeContext ctx;
    ctx.failure_reason = "no valid submission";
    const auto report = scoring::compose(slots, scoring::ScoringConfig{}, ctx);
    CHECK(report.gate_failed);
    CHECK(report.composite == 0.0);
    CHECK(report.failure_reason == "no valid submission");
}

TEST_CASE("compose: random result sets agree with the direct formula evaluation") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> conf(0.05, 1.0);
    const scoring::ScoringConfig config;

    for (int trial = 0; trial < 500; ++trial) {
        std::vector<EvaluatorResult> results;
        for (const auto& info : eval::evaluator_table()) {
            if (unit(rng) < 0.15) continue;  // some evaluators absent entirely
            EvaluatorResult r = eval::make_result(info.id);
            r.score = unit(rng);
            r.confidence = conf(rng);
            r.passed = info.stage != eval::Stage::gate || unit(rng) > 0.2;
            if (unit(rng) < 0.1) {
                r = eval::make_excluded(info.id, "synthetic exclusion");
            }
            results.push_back(r);
        }
        const auto report = scoring::compose(results, config);
        const double expected = direct_composite(results, config.category_weights);
        CHECK(std::abs(report.composite - expected) < 1e-12);
        CHECK(report.composite >= 0.0);
        CHECK(report.composite <= 100.0);
    }
}

TEST_CASE("compose: raising one score never lowers the composite") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> conf(0.05, 1.0);
    const scoring::ScoringConfig config;

    for (int trial = 0; trial < 200; ++trial) {
        std::vector<EvaluatorResult> results;
        for (const auto& info : eval::evaluator_table()) {
            EvaluatorResult r = eval::make_result(info.id);
            r.score = unit(rng);
            r.confidence = conf(rng);
            r.passed = true;
            results.push_back(r);
        }
        const double before = scoring::compose(results, config).composite;
        auto& bumped = results[static_cast<std::size_t>(unit(rng) * results.size()) %
                              results.size()];
        bumped.score = std::min(1.0, bumped.score + unit(rng) * (1.0 - bumped.score));
        const double after = scoring::compose(results, config).composite;
        CHECK(after >= before - 1e-12);
    }
}

TEST_CASE("summarize_runs: means, pass rates and gate-passed-only category means") {
    using scoring::RunOutcome;
    SUBCASE("documented arithmetic example") {
        std::vector<RunOutcome> runs{
            {"a", "p", false, true, 0.0, {}},
            {"a", "p", false, false, 80.0, {{Category::code, 0.8}}},
            {"a", "p", false, false, 100.0, {{Category::code, 1.0}}},
        };
        const auto rows = scoring::summarize_runs(runs, scoring::GroupBy::agent_problem);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].mean_composite == doctest::Approx(60.0));
        CHECK(rows[0].gate_pass_rate == doctest::Approx(2.0 / 3.0));
        CHECK(rows[0].zero_scores == 1);
        CHECK(rows[0].above_80 == 1);
        CHECK(rows[0].category_means.at(Category::code) == doctest::Approx(0.9));
    }
    SUBCASE("empty input gives an empty table") {
        CHECK(scoring::summarize_runs({}, scoring::GroupBy::agent).empty());
    }
    SUBCASE("gate-failed runs are excluded from category means only") {
        std::vector<RunOutcome> runs{
            {"a", "p", false, true, 0.0, {{Category::code, 0.1}}},
            {"a", "p", false, false, 50.0, {{Category::code, 0.5}}},
        };
        const auto rows = scoring::summarize_runs(runs, scoring::GroupBy::agent);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].category_means.at(Category::code) == doctest::Approx(0.5));
        CHECK(rows[0].mean_composite == doctest::Approx(25.0));
    }
    SUBCASE("invalid runs are excluded from every statistic") {
        std::vector<RunOutcome> runs{
            {"a", "p", true, false, 0.0, {}},
            {"a", "p", false, false, 90.0, {}},
        };
        const auto rows = scoring::summarize_runs(runs, scoring::GroupBy::agent);
        REQUIRE(rows.size() == 1);
        CHECK(rows[0].runs == 1);
        CHECK(rows[0].invalid_runs == 1);
        CHECK(rows[0].mean_composite == doctest::Approx(90.0));
        CHECK(rows[0].gate_pass_rate == doctest::Approx(1.0));
    }
    SUBCASE("grouping by problem merges agents") {
        std::vector<RunOutcome> runs{
            {"a1", "p1", false, false, 40.0, {}},
            {"a2", "p1", false, false, 60.0, {}},
            {"a1", "p2", false, false, 10.0, {}},
        };
        const auto rows = scoring::summarize_runs(runs, scoring::GroupBy::problem);
        REQUIRE(rows.size() == 2);
        CHECK(rows[0].problem_id == "p1");
        CHECK(rows[0].mean_composite == doctest::Approx(50.0));
        CHECK(rows[1].problem_id == "p2");
    }
}

TEST_CASE("composite report serialization round-trips") {
    auto results = perfect_results();
    results[6].score = 0.8;  // readability
    scoring::ComposeContext ctx;
    ctx.problem_id = "p1";
    ctx.task_id = "t1";
    ctx.started_at = "2026-01-01T00:00:00Z";
    ctx.finished_at = "2026-01-01T00:00:05Z";
    const auto report = scoring::compose(results, scoring::ScoringConfig{}, ctx);

    const auto j = scoring::to_json(report);
    const auto back = scoring::report_from_json(j);
    CHECK(back.problem_id == report.problem_id);
    CHECK(back.composite == doctest::Approx(report.composite).epsilon(1e-12));
    CHECK(back.gate_failed == report.gate_failed);
    CHECK(back.category_scores.size() == report.category_scores.size());
    CHECK(back.evaluator_results.size() == report.evaluator_results.size());
}
