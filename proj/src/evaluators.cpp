#include "gauntlet/evaluators.hpp"

#include "gauntlet/errors.hpp"
#include "gauntlet/source_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <regex>

namespace gauntlet::eval {

namespace {

constexpr std::array<EvaluatorInfo, kEvaluatorCount> kTable{{
    {EvaluatorId::compilation, Stage::gate, Category::correctness, 1.0},
    {EvaluatorId::execution, Stage::gate, Category::correctness, 1.0},
    {EvaluatorId::memory_safety, Stage::gate, Category::correctness, std::nullopt},
    {EvaluatorId::api_usage, Stage::gate, Category::library_specific, 1.0},
    {EvaluatorId::numerical_accuracy, Stage::metric, Category::correctness, 1.0},
    {EvaluatorId::execution_time, Stage::metric, Category::performance, 1.0},
    {EvaluatorId::readability, Stage::quality, Category::code, std::nullopt},
    {EvaluatorId::code_style, Stage::quality, Category::code, std::nullopt},
    {EvaluatorId::documentation, Stage::quality, Category::code, std::nullopt},
    {EvaluatorId::algorithm_appropriateness, Stage::quality, Category::appropriateness,
     std::nullopt},
    {EvaluatorId::solver_choice, Stage::quality, Category::appropriateness, std::nullopt},
    {EvaluatorId::best_practices, Stage::quality, Category::library_specific, std::nullopt},
    {EvaluatorId::error_handling, Stage::quality, Category::library_specific, 1.0},
    {EvaluatorId::parallel_awareness, Stage::quality, Category::library_specific, 0.8},
}};

constexpr double kMemcheckConfidence = 1.0;
constexpr double kHeuristicMemoryConfidence = 0.7;

}  // namespace

const std::array<EvaluatorInfo, kEvaluatorCount>& evaluator_table() { return kTable; }

const EvaluatorInfo& info(EvaluatorId id) { return kTable[static_cast<std::size_t>(id)]; }

std::string to_string(EvaluatorId id) {
    switch (id) {
        case EvaluatorId::compilation: return "compilation";
        case EvaluatorId::execution: return "execution";
        case EvaluatorId::memory_safety: return "memory_safety";
        case EvaluatorId::api_usage: return "api_usage";
        case EvaluatorId::numerical_accuracy: return "numerical_accuracy";
        case EvaluatorId::execution_time: return "execution_time";
        case EvaluatorId::readability: return "readability";
        case EvaluatorId::code_style: return "code_style";
        case EvaluatorId::documentation: return "documentation";
        case EvaluatorId::algorithm_appropriateness: return "algorithm_appropriateness";
        case EvaluatorId::solver_choice: return "solver_choice";
        case EvaluatorId::best_practices: return "best_practices";
        case EvaluatorId::error_handling: return "error_handling";
        case EvaluatorId::parallel_awareness: return "parallel_awareness";
    }
    return "unknown";
}

std::string to_string(Stage s) {
    switch (s) {
        case Stage::gate: return "gate";
        case Stage::metric: return "metric";
        case Stage::quality: return "quality";
    }
    return "unknown";
}

std::string to_string(Category c) {
    switch (c) {
        case Category::correctness: return "correctness";
        case Category::performance: return "performance";
        case Category::code: return "code";
        case Category::appropriateness: return "appropriateness";
        case Category::library_specific: return "library_specific";
    }
    return "unknown";
}

EvaluatorId evaluator_from_string(const std::string& s) {
    for (const auto& e : kTable)
        if (to_string(e.id) == s) return e.id;
    throw SchemaError("evaluator", "unknown evaluator id: " + s);
}

Stage stage_from_string(const std::string& s) {
    if (s == "gate") return Stage::gate;
    if (s == "metric") return Stage::metric;
    if (s == "quality") return Stage::quality;
    throw SchemaError("stage", "unknown stage: " + s);
}

Category category_from_string(const std::string& s) {
    if (s == "correctness") return Category::correctness;
    if (s == "performance") return Category::performance;
    if (s == "code") return Category::code;
    if (s == "appropriateness") return Category::appropriateness;
    if (s == "library_specific") return Category::library_specific;
    throw SchemaError("category", "unknown category: " + s);
}

EvaluatorResult make_result(EvaluatorId id) {
    const EvaluatorInfo& e = info(id);
    EvaluatorResult r;
    r.evaluator_id = id;
    r.stage = e.stage;
    r.category = e.category;
    if (e.fixed_confidence) r.confidence = *e.fixed_confidence;
    return r;
}

EvaluatorResult make_excluded(EvaluatorId id, const std::string& reason) {
    EvaluatorResult r = make_result(id);
    r.excluded = true;
    r.exclusion_reason = reason;
    r.passed = false;
    return r;
}

// ---- gates -----------------------------------------------------------

CompilationOutcome gate_compilation(const a2a::SubmissionArtifact& artifact,
                                    sandbox::ToolBackend& tools) {
    sandbox::CompileRequest req;
    for (const auto& f : artifact.source_files) req.files.emplace_back(f.name, f.content);
    req.entry_point = artifact.entry_point;
    req.dependencies = artifact.dependencies;

    CompilationOutcome out;
    out.tool = tools.compile(req);
    out.result = make_result(EvaluatorId::compilation);
    out.result.passed = out.tool.ok;
    out.result.score = out.tool.ok ? 1.0 : 0.0;
    if (!out.tool.stderr_text.empty()) out.result.evidence.push_back(out.tool.stderr_text);
    if (out.tool.timed_out) out.result.evidence.push_back("compilation timed out");
    return out;
}

ExecutionOutcome gate_execution(const problems::ProblemSpec& spec, const std::string& workspace_id,
                                const std::vector<std::string>& base_args,
                                const sandbox::ToolchainProfile& profile,
                                sandbox::ToolBackend& tools) {
    ExecutionOutcome out;
    out.result = make_result(EvaluatorId::execution);
    out.result.passed = true;
    bool all_ok = true;

    for (const auto& tc : spec.test_cases) {
        std::vector<std::string> args = base_args;
        args.insert(args.end(), tc.run_args.begin(), tc.run_args.end());
        sandbox::ToolResult run =
            tools.run(workspace_id, args, tc.mpi_ranks, tc.timeout_seconds, false);
        if (profile.memcheck_available && run.ok) {
            // separate pass so valgrind overhead never pollutes the timing
            sandbox::ToolResult mc =
                tools.run(workspace_id, args, tc.mpi_ranks, tc.timeout_seconds * 10, true);
            run.memcheck = mc.memcheck;
            if (!mc.ok)
                run.warnings.push_back("memcheck pass for case " + tc.case_id +
                                       " exited with code " + std::to_string(mc.exit_code));
        }
        if (!run.ok) {
            all_ok = false;
            if (run.timed_out)
                out.result.evidence.push_back("case " + tc.case_id + ": timed out after " +
                                              std::to_string(tc.timeout_seconds) + " s");
            else
                out.result.evidence.push_back("case " + tc.case_id + ": exit code " +
                                              std::to_string(run.exit_code));
            if (!run.stderr_text.empty())
                out.result.evidence.push_back("case " + tc.case_id +
                                              " stderr: " + run.stderr_text.substr(0, 2000));
        }
        out.case_runs.push_back(std::move(run));
    }
    out.result.passed = all_ok;
    out.result.score = all_ok ? 1.0 : 0.0;
    return out;
}

EvaluatorResult gate_memory_safety(const std::vector<sandbox::ToolResult>& case_runs,
                                   const problems::ProblemSpec& spec, bool memcheck_available,
                                   const rules::MemorySafetyRules& rules) {
    EvaluatorResult r = make_result(EvaluatorId::memory_safety);
    bool clean = true;

    if (memcheck_available) {
        r.confidence = kMemcheckConfidence;
        for (std::size_t i = 0; i < case_runs.size(); ++i) {
            const std::string case_id =
                i < spec.test_cases.size() ? spec.test_cases[i].case_id : std::to_string(i);
            const auto& mc = case_runs[i].memcheck;
            if (!mc) {
                clean = false;
                r.evidence.push_back("case " + case_id + ": memcheck report missing");
                continue;
            }
            if (mc->leaked_bytes != 0) {
                clean = false;
                r.evidence.push_back("case " + case_id + ": leaked " +
                                     std::to_string(mc->leaked_bytes) + " bytes");
            }
            if (mc->invalid_accesses != 0) {
                clean = false;
                r.evidence.push_back("case " + case_id + ": " +
                                     std::to_string(mc->invalid_accesses) + " invalid accesses");
            }
        }
    } else {
        r.confidence = kHeuristicMemoryConfidence;
        for (std::size_t i = 0; i < case_runs.size(); ++i) {
            const std::string case_id =
                i < spec.test_cases.size() ? spec.test_cases[i].case_id : std::to_string(i);
            for (const auto& sig : rules.leak_signatures) {
                if (case_runs[i].stderr_text.find(sig) != std::string::npos) {
                    clean = false;
                    r.evidence.push_back("case " + case_id + ": stderr matches leak signature '" +
                                         sig + "'");
                }
            }
        }
        r.evidence.push_back("no memcheck backend; heuristic stderr scan only");
    }

    r.passed = clean;
    r.score = clean ? 1.0 : 0.0;
    return r;
}

EvaluatorResult gate_api_usage(const a2a::SubmissionArtifact& artifact,
                               const rules::ApiRules& rules) {
    EvaluatorResult r = make_result(EvaluatorId::api_usage);
    std::vector<std::string> violations;

    // R1: exactly one init and one finalize call, init first, in the
    // entry file, which must define main
    int init_calls = 0, finalize_calls = 0;
    int entry_init_order = -1, entry_finalize_order = -1;
    bool entry_has_main = false;

    for (const auto& f : artifact.source_files) {
        const std::string stripped = analysis::strip_code(f.content);
        const auto inits = analysis::find_symbol_calls(stripped, rules.init_symbol);
        const auto finals = analysis::find_symbol_calls(stripped, rules.finalize_symbol);
        init_calls += static_cast<int>(inits.size());
        finalize_calls += static_cast<int>(finals.size());
        if (f.name == artifact.entry_point) {
            entry_has_main = analysis::defines_function(stripped, "main");
            if (!inits.empty()) entry_init_order = inits.front().order;
            if (!finals.empty()) entry_finalize_order = finals.front().order;
        }
    }
    if (init_calls != 1)
        violations.push_back("R1: expected exactly one " + rules.init_symbol + " call, found " +
                             std::to_string(init_calls));
    if (finalize_calls != 1)
        violations.push_back("R1: expected exactly one " + rules.finalize_symbol +
                             " call, found " + std::to_string(finalize_calls));
    if (init_calls == 1 && finalize_calls == 1) {
        if (entry_init_order < 0 || entry_finalize_order < 0)
            violations.push_back("R1: " + rules.init_symbol + "/" + rules.finalize_symbol +
                                 " must both live in the entry file " + artifact.entry_point);
        else if (!entry_has_main)
            violations.push_back("R1: entry file " + artifact.entry_point +
                                 " does not define main");
        else if (entry_init_order >= entry_finalize_order)
            violations.push_back("R1: " + rules.init_symbol + " must precede " +
                                 rules.finalize_symbol);
    }

    // R2 / R3: header discipline
    std::regex allowed;
    try {
        allowed = std::regex(rules.allowed_header_pattern, std::regex::icase);
    } catch (const std::regex_error& e) {
        throw ConfigError(std::string("bad allowed_header_pattern: ") + e.what());
    }
    for (const auto& f : artifact.source_files) {
        for (const auto& inc : analysis::find_includes(f.content)) {
            if (inc.path.find(rules.private_include_pattern) != std::string::npos) {
                violations.push_back("R2: private header " + inc.path + " included by " + f.name +
                                     ":" + std::to_string(inc.line));
                continue;
            }
            if (!util::contains_ci(inc.path, rules.library_token)) continue;
            const std::string base =
                inc.path.find('/') == std::string::npos ? inc.path
                                                        : inc.path.substr(inc.path.rfind('/') + 1);
            if (!std::regex_match(base, allowed))
                violations.push_back("R3: non-public library header " + inc.path +
                                     " included by " + f.name + ":" + std::to_string(inc.line));
        }
    }

    r.passed = violations.empty();
    r.score = r.passed ? 1.0 : 0.0;
    r.evidence = std::move(violations);
    if (r.passed) r.evidence.push_back("all API structure rules hold");
    return r;
}

// ---- metrics ---------------------------------------------------------

double accuracy_score_from_error(double epsilon, double tau) {
    return std::min(1.0, std::exp(-epsilon / tau));
}

double time_score(double t, const std::array<double, 4>& thresholds) {
    const double t1 = thresholds[0], t2 = thresholds[1], t3 = thresholds[2], t4 = thresholds[3];
    if (t <= t1) return 1.0;
    if (t <= t2) return 1.0 - (t - t1) / (t2 - t1) * 0.2;
    if (t <= t3) return 0.8 - (t - t2) / (t3 - t2) * 0.2;
    if (t <= t4) return 0.6 - (t - t3) / (t4 - t3) * 0.4;
    return 0.2 * t4 / t;
}

namespace {

double l2_norm(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double relative_l2_error(const std::vector<double>& out, const std::vector<double>& ref) {
    std::vector<double> diff(ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) diff[i] = out[i] - ref[i];
    const double ref_norm = l2_norm(ref);
    if (ref_norm == 0.0) return l2_norm(out);  // absolute norm fallback
    return l2_norm(diff) / ref_norm;
}

}  // namespace

EvaluatorResult metric_numerical_accuracy(const std::vector<sandbox::ToolResult>& case_runs,
                                          const problems::ProblemSpec& spec) {
    EvaluatorResult r = make_result(EvaluatorId::numerical_accuracy);
    const double tau = spec.accuracy_tolerance;
    double total = 0;
    int n = 0;

    for (std::size_t i = 0; i < spec.test_cases.size() && i < case_runs.size(); ++i) {
        const auto& tc = spec.test_cases[i];
        double s_case = 0.0;
        try {
            const auto values = problems::extract_output(case_runs[i].stdout_text,
                                                         tc.extraction_rule);
            const double eps = relative_l2_error(values, tc.reference_values);
            s_case = accuracy_score_from_error(eps, tau);
            r.evidence.push_back("case " + tc.case_id + ": relative error " +
                                 std::to_string(eps) + ", score " + std::to_string(s_case));
        } catch (const ExtractionError& e) {
            s_case = 0.0;
            r.evidence.push_back("case " + tc.case_id + ": extraction failed: " + e.what());
        }
        total += s_case;
        ++n;
    }
    r.score = n > 0 ? total / n : 0.0;
    return r;
}

EvaluatorResult metric_execution_time(const std::vector<sandbox::ToolResult>& case_runs,
                                      const problems::ProblemSpec& spec) {
    EvaluatorResult r = make_result(EvaluatorId::execution_time);
    double worst = 0;
    for (const auto& run : case_runs) worst = std::max(worst, run.wall_time_seconds);
    r.score = time_score(worst, spec.time_thresholds);
    r.evidence.push_back("worst case wall time " + std::to_string(worst) + " s");
    return r;
}

// ---- quality ---------------------------------------------------------

EvaluatorResult quality_llm(EvaluatorId id, const std::string& rubric_text,
                            const problems::ProblemSpec& spec,
                            const a2a::SubmissionArtifact& artifact, judge::JudgeClient& judge,
                            const rules::RuleSet& rules) {
    EvaluatorResult r = make_result(id);
    const std::string rubric_id = to_string(id);

    judge::SourceFiles files;
    for (const auto& f : artifact.source_files) files.emplace_back(f.name, f.content);

    std::string prompt = rubric_text;
    auto aug = rules.augmenters.find(rubric_id);
    if (aug != rules.augmenters.end() && !aug->second.empty()) {
        const auto hits = rules::run_augmenter(aug->second, files);
        if (!hits.empty()) {
            prompt += "\n\nAutomated findings:\n";
            for (const auto& h : hits) {
                prompt += "- " + h + "\n";
                r.evidence.push_back(h);
            }
        }
    }

    try {
        const judge::JudgeVerdict v =
            judge.evaluate(rubric_id, prompt, spec.problem_description, files);
        judge::validate_verdict(v);
        r.score = v.score;
        r.confidence = v.confidence;
        if (!v.rationale.empty()) r.evidence.push_back("judge: " + v.rationale);
    } catch (const JudgeProtocolError& e) {
        return make_excluded(id, std::string("judge protocol error: ") + e.what());
    } catch (const std::exception& e) {
        return make_excluded(id, std::string("judge failure: ") + e.what());
    }
    return r;
}

EvaluatorResult quality_error_handling(const a2a::SubmissionArtifact& artifact,
                                       const rules::ErrorHandlingRules& rules) {
    EvaluatorResult r = make_result(EvaluatorId::error_handling);

    analysis::CallScanOptions opts;
    opts.prefixes = rules.call_prefixes;
    opts.check_macros = rules.check_macros;
    opts.legacy_macros = rules.legacy_macros;
    opts.ignore = rules.ignore_symbols;

    int total = 0, wrapped = 0, legacy = 0;
    for (const auto& f : artifact.source_files) {
        const auto calls = analysis::scan_callsites(analysis::strip_code(f.content), opts);
        for (const auto& c : calls) {
            ++total;
            if (c.wrapped) {
                ++wrapped;
            } else if (c.legacy) {
                ++legacy;
            } else {
                r.evidence.push_back("unchecked call " + c.callee + " (" + f.name + ":" +
                                     std::to_string(c.line) + ")");
            }
        }
    }

    if (total == 0) {
        r.score = 0.0;
        r.evidence.push_back("no library calls found");
        return r;
    }
    r.score = (wrapped + rules.legacy_weight * legacy) / total;
    r.evidence.push_back(std::to_string(wrapped) + "/" + std::to_string(total) +
                         " calls wrapped, " + std::to_string(legacy) + " legacy-checked");
    return r;
}

EvaluatorResult quality_parallel_awareness(const a2a::SubmissionArtifact& artifact,
                                           const ParallelEvidence& evidence,
                                           const rules::ParallelRules& rules) {
    EvaluatorResult r = make_result(EvaluatorId::parallel_awareness);

    bool any_creation = false, any_comm = false;
    std::vector<std::string> c2_hits, c3_hits;

    for (const auto& f : artifact.source_files) {
        const std::string stripped = analysis::strip_code(f.content);

        analysis::CallScanOptions creation_scan;
        for (const auto& c : analysis::scan_callsites(stripped, creation_scan)) {
            if (c.callee.find(rules.creation_call_token) != std::string::npos) {
                any_creation = true;
                break;
            }
        }
        for (const auto& sym : rules.communicator_symbols)
            if (analysis::uses_identifier(stripped, sym)) any_comm = true;

        for (const auto& guard : analysis::find_rank_guards(stripped, rules.rank_token)) {
            for (const auto& call : guard.guarded_calls) {
                if (std::find(rules.collective_calls.begin(), rules.collective_calls.end(),
                              call) != rules.collective_calls.end())
                    c2_hits.push_back(call + " under rank guard (" + f.name + ":" +
                                      std::to_string(guard.line) + ")");
                if (std::find(rules.print_calls.begin(), rules.print_calls.end(), call) !=
                    rules.print_calls.end())
                    c3_hits.push_back(call + " under rank guard (" + f.name + ":" +
                                      std::to_string(guard.line) + ")");
            }
        }
    }

    int passed = 0;
    const int total = 4;

    // C1: object creation should name a communicator
    const bool c1 = !any_creation || any_comm;
    if (c1) ++passed;
    else r.evidence.push_back("C1: creation calls present but no communicator symbol used");

    // C2: collectives must not hide behind rank branches
    const bool c2 = c2_hits.empty();
    if (c2) ++passed;
    else
        for (const auto& h : c2_hits) r.evidence.push_back("C2: " + h);

    // C3: rank-guarded printing of results only matters in parallel runs
    const bool c3 = evidence.max_requested_ranks <= 1 || c3_hits.empty();
    if (c3) ++passed;
    else
        for (const auto& h : c3_hits) r.evidence.push_back("C3: " + h);

    // C4: the sandbox honored the requested ranks
    const bool c4 = !evidence.ranks_downgraded;
    if (c4) ++passed;
    else r.evidence.push_back("C4: requested mpi ranks were downgraded by the sandbox");

    r.score = static_cast<double>(passed) / total;
    r.evidence.push_back(std::to_string(passed) + "/" + std::to_string(total) +
                         " parallel checks passed");
    return r;
}

util::json to_json(const EvaluatorResult& r) {
    return util::json{{"evaluator", to_string(r.evaluator_id)},
                      {"stage", to_string(r.stage)},
                      {"category", to_string(r.category)},
                      {"score", r.score},
                      {"confidence", r.confidence},
                      {"passed", r.passed},
                      {"excluded", r.excluded},
                      {"exclusion_reason", r.exclusion_reason},
                      {"evidence", r.evidence}};
}

EvaluatorResult result_from_json(const util::json& j) {
    EvaluatorResult r;
    r.evaluator_id = evaluator_from_string(util::require_string(j, "evaluator", "result"));
    r.stage = stage_from_string(util::require_string(j, "stage", "result"));
    r.category = category_from_string(util::require_string(j, "category", "result"));
    r.score = util::require_number(j, "score", "result");
    r.confidence = util::require_number(j, "confidence", "result");
    r.passed = j.value("passed", true);
    r.excluded = j.value("excluded", false);
    r.exclusion_reason = j.value("exclusion_reason", std::string());
    if (j.contains("evidence"))
        for (const auto& e : j["evidence"]) r.evidence.push_back(e.get<std::string>());
    return r;
}

}  // namespace gauntlet::eval
