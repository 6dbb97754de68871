// Shared fixtures: small C programs with stubbed library symbols so the
// static evaluators see realistic call patterns while everything still
// builds with a plain C compiler.
#pragma once

#include "gauntlet/a2a.hpp"
#include "gauntlet/judge.hpp"
#include "gauntlet/problem.hpp"

#include <map>
#include <string>

namespace fixtures {

// Computes and prints 0.5 (exactly representable), fully wrapped calls,
// communicator in use, bracketed init/finalize. Every gate and static
// evaluator scores full marks on this file.
inline const char* kGoodProgram = R"c(
#include <stdio.h>

#define PETSC_COMM_WORLD 1
#define PetscCall(call) do { int err_ = (call); if (err_) return err_; } while (0)

static double g_vec;

static int PetscInitialize(int* argc, char*** argv) {
  (void)argc; (void)argv;
  g_vec = 0.0;
  return 0;
}

static int VecCreate(int comm, double* x) {
  (void)comm;
  *x = 0.5;
  return 0;
}

static int VecNorm(double x, double* norm) {
  *norm = x;
  return 0;
}

static int PetscFinalize(void) { return 0; }

int main(int argc, char** argv) {
  double x, norm;
  PetscCall(PetscInitialize(&argc, &argv));
  PetscCall(VecCreate(PETSC_COMM_WORLD, &x));
  PetscCall(VecNorm(x, &norm));
  printf("final_norm = %g\n", norm);
  PetscCall(PetscFinalize());
  return 0;
}
)c";

// missing semicolon: fails the compilation gate
inline const char* kBadCompileProgram = R"c(
int main(void) { return 0 }
)c";

// compiles, exits nonzero: fails the execution gate (api gate stays green)
inline const char* kBadExecProgram = R"c(
static int PetscInitialize(void) { return 0; }
static int PetscFinalize(void) { return 0; }

int main(void) {
  PetscInitialize();
  PetscFinalize();
  return 2;
}
)c";

// clean exit but emits a leak signature on stderr: fails the memory gate
// under the heuristic backend
inline const char* kBadMemoryProgram = R"c(
#include <stdio.h>

static int PetscInitialize(void) { return 0; }
static int PetscFinalize(void) { return 0; }

int main(void) {
  PetscInitialize();
  fprintf(stderr, "Invalid read of size 4\n");
  printf("final_norm = 0.5\n");
  PetscFinalize();
  return 0;
}
)c";

// clean run but never finalizes: fails the api gate (R1)
inline const char* kBadApiProgram = R"c(
#include <stdio.h>

static int PetscInitialize(void) { return 0; }

int main(void) {
  PetscInitialize();
  printf("final_norm = 0.5\n");
  return 0;
}
)c";

inline gauntlet::a2a::SubmissionArtifact artifact_for(const std::string& source) {
    gauntlet::a2a::SubmissionArtifact artifact;
    artifact.source_files.push_back({"main.c", source});
    artifact.entry_point = "main.c";
    return artifact;
}

// one case, reference 0.5, default tolerance/thresholds
inline gauntlet::problems::ProblemSpec norm_problem(const std::string& id = "p_norm") {
    gauntlet::problems::ProblemSpec spec;
    spec.problem_id = id;
    spec.problem_name = "norm fixture";
    spec.problem_description = "create a vector, print final_norm = <value>";
    gauntlet::problems::TestCase tc;
    tc.case_id = "c1";
    tc.reference_values = {0.5};
    tc.extraction_rule = {
        {"final_norm",
         R"(final_norm\s*=\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))"}};
    tc.timeout_seconds = 20.0;
    spec.test_cases.push_back(std::move(tc));
    return spec;
}

// the six judged dimensions pinned to easy hand arithmetic
inline std::map<std::string, gauntlet::judge::JudgeVerdict> pinned_verdicts() {
    return {
        {"readability", {0.8, 0.9, "pinned"}},
        {"code_style", {0.7, 0.8, "pinned"}},
        {"documentation", {0.6, 0.5, "pinned"}},
        {"algorithm_appropriateness", {0.9, 0.6, "pinned"}},
        {"solver_choice", {0.5, 0.4, "pinned"}},
        {"best_practices", {0.75, 0.8, "pinned"}},
    };
}

// Composite for kGoodProgram under pinned_verdicts with injected t=1 s,
// evaluated directly from the aggregation formulas by hand:
//   correctness      = (1 + 1 + 0.7 + 1) / 3.7            = 1.0
//   performance      = 1.0
//   code             = (0.72 + 0.56 + 0.30) / 2.2         = 0.7181818...
//   appropriateness  = (0.54 + 0.20) / 1.0                = 0.74
//   library_specific = (1 + 0.6 + 1 + 0.8) / 3.6          = 0.9444444...
//   composite = 100 * (0.35 + 0.15 + 0.15*79/110 + 0.111 + 0.20*17/18)
//             = 8985400 / 99000
inline constexpr double kPinnedComposite = 90.76161616161616;

}  // namespace fixtures
