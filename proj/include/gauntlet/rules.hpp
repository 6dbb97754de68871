#pragma once

#include <map>
#include <string>
#include <vector>

#include "gauntlet/util.hpp"

namespace gauntlet::rules {

using util::json;

// Library-specific knowledge lives here, as data. The shipped defaults
// target PETSc; pointing the harness at another library is a rule-file
// edit, not a code change.

struct ApiRules {
    std::string init_symbol = "PetscInitialize";
    std::string finalize_symbol = "PetscFinalize";
    std::string private_include_pattern = "/private/";
    // includes whose path mentions this token are treated as library headers
    std::string library_token = "petsc";
    // basename pattern public library headers must match
    std::string allowed_header_pattern = R"(^petsc[A-Za-z0-9_]*\.(h|hpp)$)";
};

struct ErrorHandlingRules {
    std::vector<std::string> call_prefixes{"Petsc", "Vec", "Mat", "KSP",
                                           "SNES", "TS",  "Tao", "DM"};
    std::vector<std::string> check_macros{"PetscCall"};
    std::vector<std::string> legacy_macros{"CHKERRQ"};
    double legacy_weight = 0.3;
    // counted neither as callsites nor as wrappers
    std::vector<std::string> ignore_symbols{"PetscFunctionBegin", "PetscFunctionBeginUser",
                                            "PetscFunctionReturn", "PetscCallVoid",
                                            "PetscCallMPI", "CHKERRV", "CHKERRABORT"};
};

struct ParallelRules {
    std::vector<std::string> communicator_symbols{"PETSC_COMM_WORLD", "MPI_COMM_WORLD"};
    std::string creation_call_token = "Create";  // identifiers containing this
    std::vector<std::string> collective_calls{
        "VecAssemblyBegin", "VecAssemblyEnd", "MatAssemblyBegin", "MatAssemblyEnd",
        "KSPSolve",         "SNESSolve",      "TSSolve",          "VecNorm",
        "VecDot",           "MPI_Barrier",    "MPI_Allreduce",    "MPI_Bcast",
        "MPI_Reduce"};
    std::string rank_token = "rank";
    std::vector<std::string> print_calls{"printf", "fprintf", "puts", "fputs", "putchar"};
};

struct MemorySafetyRules {
    std::vector<std::string> leak_signatures{"memory leak", "Invalid read", "Invalid write",
                                             "PetscMallocDump"};
};

struct AugmenterPattern {
    std::string label;
    std::string pattern;  // regex, applied per source line
};

struct RuleSet {
    ApiRules api;
    ErrorHandlingRules error_handling;
    ParallelRules parallel;
    MemorySafetyRules memory;
    // rubric_id -> static-analysis patterns appended to the judge prompt
    std::map<std::string, std::vector<AugmenterPattern>> augmenters;

    static RuleSet petsc_defaults();
    static RuleSet from_json(const json& j);
    static RuleSet load(const std::string& path);
    json to_json() const;
};

// Applies the patterns line-by-line over all files.
// Hit format: "<label> (<file>:<line>)".
std::vector<std::string> run_augmenter(const std::vector<AugmenterPattern>& patterns,
                                       const std::vector<std::pair<std::string, std::string>>& files,
                                       std::size_t max_hits = 20);

// Built-in rubric text for the six judged dimensions.
std::string default_rubric_text(const std::string& rubric_id);

}  // namespace gauntlet::rules
