#include "gauntlet/orchestrator.hpp"

#include "gauntlet/errors.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <future>
#include <mutex>
#include <thread>

namespace gauntlet::orchestrator {

namespace {

using eval::EvaluatorId;
using eval::EvaluatorResult;

const std::vector<EvaluatorId> kLlmQuality{
    EvaluatorId::readability,   EvaluatorId::code_style,
    EvaluatorId::documentation, EvaluatorId::algorithm_appropriateness,
    EvaluatorId::solver_choice, EvaluatorId::best_practices,
};

// canonical report order = pipeline table order
void sort_results(std::vector<EvaluatorResult>& results) {
    std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) {
        return static_cast<int>(a.evaluator_id) < static_cast<int>(b.evaluator_id);
    });
}

std::string rubric_text_for(const EvaluationJob& job, EvaluatorId id) {
    const std::string rid = eval::to_string(id);
    auto it = job.rubrics.find(rid);
    return it != job.rubrics.end() ? it->second : rules::default_rubric_text(rid);
}

// bounded concurrent map over the LLM quality evaluators
class Semaphore {
public:
    explicit Semaphore(int count) : count_(count) {}
    void acquire() {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return count_ > 0; });
        --count_;
    }
    void release() {
        std::lock_guard<std::mutex> lock(mu_);
        ++count_;
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int count_;
};

void fire(const JobHooks& hooks, EvaluatorId id) {
    if (hooks.on_evaluator_start) hooks.on_evaluator_start(id);
}

void apply_tool_hook(const JobHooks& hooks, sandbox::ToolResult& result) {
    if (hooks.on_tool_result) hooks.on_tool_result(result);
}

std::string agent_slug(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    return util::slugify(scheme == std::string::npos ? endpoint
                                                     : endpoint.substr(scheme + 3));
}

struct WorkspaceGuard {
    sandbox::ToolBackend* backend = nullptr;
    std::string id;
    bool keep = false;
    ~WorkspaceGuard() {
        if (backend && !id.empty() && !keep) {
            try {
                backend->release(id);
            } catch (...) {
                // releasing is best effort; the engine cleans up on teardown
            }
        }
    }
};

}  // namespace

RunRecord evaluate_once(const EvaluationJob& job, int run_index) {
    RunRecord record;
    record.agent_name =
        job.agent_name.empty() ? agent_slug(job.agent_endpoint) : job.agent_name;
    record.problem_id = job.spec.problem_id;
    record.run_index = run_index;

    scoring::ComposeContext ctx;
    ctx.problem_id = job.spec.problem_id;
    ctx.task_id = util::make_uuid();
    ctx.started_at = util::now_iso8601();

    // ---- dispatch ------------------------------------------------------
    a2a::TaskRequest request{ctx.task_id, job.spec.problem_id, job.spec.problem_description,
                             job.dispatch_deadline_seconds};
    a2a::SubmissionArtifact artifact;
    try {
        artifact = a2a::dispatch_task(job.agent_endpoint, request);
    } catch (const Error& e) {
        std::vector<EvaluatorResult> slots;
        for (EvaluatorId id : {EvaluatorId::compilation, EvaluatorId::execution,
                               EvaluatorId::memory_safety, EvaluatorId::api_usage})
            slots.push_back(eval::make_excluded(id, "no submission to evaluate"));
        ctx.failure_reason = "no valid submission";
        ctx.warnings.push_back(std::string("dispatch failed: ") + e.what());
        ctx.finished_at = util::now_iso8601();
        record.report = scoring::compose(slots, job.scoring, ctx);
        return record;
    }
    record.submission = artifact;

    try {
        std::shared_ptr<sandbox::ToolBackend> backend =
            job.backend_factory ? job.backend_factory()
                                : std::make_shared<sandbox::ToolClient>(job.tool_endpoint);

        std::vector<EvaluatorResult> results;

        // ---- stage 1: gates ---------------------------------------------
        // the static API gate has no tool precondition; run it alongside
        auto api_future = std::async(std::launch::async, [&] {
            fire(job.hooks, EvaluatorId::api_usage);
            return eval::gate_api_usage(artifact, job.rules.api);
        });

        fire(job.hooks, EvaluatorId::compilation);
        eval::CompilationOutcome compilation = eval::gate_compilation(artifact, *backend);
        apply_tool_hook(job.hooks, compilation.tool);
        WorkspaceGuard guard{backend.get(), compilation.tool.workspace_id, job.keep_artifacts};
        record.tool_results.push_back(compilation.tool);
        results.push_back(compilation.result);

        std::vector<sandbox::ToolResult> case_runs;
        if (compilation.result.passed) {
            fire(job.hooks, EvaluatorId::execution);
            eval::ExecutionOutcome execution =
                eval::gate_execution(job.spec, compilation.tool.workspace_id, artifact.run_args,
                                     job.profile, *backend);
            for (auto& run : execution.case_runs) {
                apply_tool_hook(job.hooks, run);
                record.tool_results.push_back(run);
            }
            case_runs = execution.case_runs;
            results.push_back(execution.result);

            if (execution.result.passed) {
                fire(job.hooks, EvaluatorId::memory_safety);
                results.push_back(eval::gate_memory_safety(
                    case_runs, job.spec, job.profile.memcheck_available, job.rules.memory));
            } else {
                results.push_back(eval::make_excluded(EvaluatorId::memory_safety,
                                                      "execution gate did not pass"));
            }
        } else {
            results.push_back(
                eval::make_excluded(EvaluatorId::execution, "compilation gate did not pass"));
            results.push_back(
                eval::make_excluded(EvaluatorId::memory_safety, "compilation gate did not pass"));
        }
        results.push_back(api_future.get());
        sort_results(results);

        const bool any_gate_failed = std::any_of(
            results.begin(), results.end(),
            [](const EvaluatorResult& r) { return !r.excluded && !r.passed; });
        if (any_gate_failed) {
            ctx.finished_at = util::now_iso8601();
            record.report = scoring::compose(results, job.scoring, ctx);
            return record;
        }

        // ---- stage 2: metrics ---------------------------------------------
        auto accuracy_future = std::async(std::launch::async, [&] {
            fire(job.hooks, EvaluatorId::numerical_accuracy);
            return eval::metric_numerical_accuracy(case_runs, job.spec);
        });
        auto time_future = std::async(std::launch::async, [&] {
            fire(job.hooks, EvaluatorId::execution_time);
            return eval::metric_execution_time(case_runs, job.spec);
        });
        results.push_back(accuracy_future.get());
        results.push_back(time_future.get());

        // ---- stage 3: quality ---------------------------------------------
        eval::ParallelEvidence parallel_evidence;
        for (const auto& tc : job.spec.test_cases)
            parallel_evidence.max_requested_ranks =
                std::max(parallel_evidence.max_requested_ranks, tc.mpi_ranks);
        for (const auto& run : case_runs)
            for (const auto& w : run.warnings)
                if (w.find("downgraded") != std::string::npos)
                    parallel_evidence.ranks_downgraded = true;

        Semaphore judge_slots(std::max(1, job.judge_parallelism));
        std::vector<std::future<EvaluatorResult>> quality_futures;
        for (EvaluatorId id : kLlmQuality) {
            quality_futures.push_back(std::async(std::launch::async, [&, id] {
                judge_slots.acquire();
                fire(job.hooks, id);
                EvaluatorResult r = eval::quality_llm(id, rubric_text_for(job, id), job.spec,
                                                      artifact, *job.judge, job.rules);
                judge_slots.release();
                return r;
            }));
        }
        auto error_handling_future = std::async(std::launch::async, [&] {
            fire(job.hooks, EvaluatorId::error_handling);
            return eval::quality_error_handling(artifact, job.rules.error_handling);
        });
        auto parallel_future = std::async(std::launch::async, [&] {
            fire(job.hooks, EvaluatorId::parallel_awareness);
            return eval::quality_parallel_awareness(artifact, parallel_evidence,
                                                    job.rules.parallel);
        });
        for (auto& f : quality_futures) results.push_back(f.get());
        results.push_back(error_handling_future.get());
        results.push_back(parallel_future.get());

        sort_results(results);
        ctx.finished_at = util::now_iso8601();
        record.report = scoring::compose(results, job.scoring, ctx);
        return record;
    } catch (const SandboxError& e) {
        record.invalid = true;
        record.invalid_reason = std::string("sandbox infrastructure failure: ") + e.what();
    } catch (const InfrastructureError& e) {
        record.invalid = true;
        record.invalid_reason = e.what();
    } catch (const std::exception& e) {
        record.invalid = true;
        record.invalid_reason = std::string("internal error: ") + e.what();
    }
    record.report.problem_id = job.spec.problem_id;
    record.report.task_id = ctx.task_id;
    record.report.started_at = ctx.started_at;
    record.report.finished_at = util::now_iso8601();
    record.report.warnings.push_back(record.invalid_reason);
    return record;
}

std::vector<RunRecord> evaluate_suite(const std::vector<EvaluationJob>& jobs, int parallelism) {
    struct Task {
        const EvaluationJob* job;
        int run_index;
        std::size_t slot;
    };
    std::vector<Task> tasks;
    std::size_t slot = 0;
    for (const auto& job : jobs)
        for (int rep = 0; rep < std::max(1, job.repetitions); ++rep)
            tasks.push_back({&job, rep, slot++});

    std::vector<RunRecord> records(tasks.size());
    std::atomic<std::size_t> next{0};
    const int workers = std::max(1, std::min<int>(parallelism, static_cast<int>(tasks.size())));

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            try {
                records[task.slot] = evaluate_once(*task.job, task.run_index);
            } catch (const std::exception& e) {
                RunRecord bad;
                bad.agent_name = task.job->agent_name.empty()
                                     ? agent_slug(task.job->agent_endpoint)
                                     : task.job->agent_name;
                bad.problem_id = task.job->spec.problem_id;
                bad.run_index = task.run_index;
                bad.invalid = true;
                bad.invalid_reason = std::string("run aborted: ") + e.what();
                records[task.slot] = std::move(bad);
            }
        }
    };

    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return records;
}

scoring::RunOutcome to_outcome(const RunRecord& record) {
    scoring::RunOutcome outcome;
    outcome.agent = record.agent_name;
    outcome.problem_id = record.problem_id;
    outcome.invalid = record.invalid;
    outcome.gate_failed = record.report.gate_failed;
    outcome.composite = record.report.composite;
    for (const auto& cs : record.report.category_scores)
        outcome.category_scores[cs.category] = cs.score;
    return outcome;
}

}  // namespace gauntlet::orchestrator
