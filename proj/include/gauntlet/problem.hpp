#pragma once

#include <array>
#include <string>
#include <vector>

#include "gauntlet/util.hpp"

namespace gauntlet::problems {

using util::json;

enum class Difficulty { easy, medium, hard };

std::string to_string(Difficulty d);
Difficulty difficulty_from_string(const std::string& s);

// One (label, pattern) pair. The pattern is a regex whose first capture
// group is the numeric payload; when omitted in JSON, a default pattern
// "<label> = <number>" is derived from the label.
struct LabeledPattern {
    std::string label;
    std::string pattern;

    bool operator==(const LabeledPattern&) const = default;
};

// Ordered extraction rule: one value per pattern, in rule order.
using ExtractionRule = std::vector<LabeledPattern>;

struct TestCase {
    std::string case_id;
    std::vector<std::string> run_args;
    int mpi_ranks = 1;
    std::vector<double> reference_values;
    ExtractionRule extraction_rule;
    double timeout_seconds = 120.0;

    bool operator==(const TestCase&) const = default;
};

// Global fallbacks applied when a problem file omits the optional knobs.
struct ProblemDefaults {
    double accuracy_tolerance = 1e-6;
    std::array<double, 4> time_thresholds{1.0, 5.0, 15.0, 60.0};
    int mpi_ranks = 1;
    double timeout_seconds = 120.0;
};

// Loads fallbacks from a harness config file ({"accuracy_tolerance": ...,
// "time_thresholds": [...], ...}); absent keys keep the built-in values.
ProblemDefaults load_defaults(const std::string& path);

struct ProblemSpec {
    std::string problem_id;
    std::string problem_name;
    std::string problem_description;
    Difficulty difficulty = Difficulty::medium;  // metadata only
    std::string module_tag;                      // metadata only
    std::vector<TestCase> test_cases;
    double accuracy_tolerance = 1e-6;
    std::array<double, 4> time_thresholds{1.0, 5.0, 15.0, 60.0};

    bool operator==(const ProblemSpec&) const = default;
};

// Parses and validates one problem JSON document.
// Throws ParseError on malformed JSON, SchemaError (naming the field) on
// missing keys or violated invariants.
ProblemSpec parse_problem(const std::string& text, const std::string& where,
                          const ProblemDefaults& defaults = {});

ProblemSpec load_problem(const std::string& path, const ProblemDefaults& defaults = {});

// Loads every *.json in dir, in lexicographic filename order.
// Throws DuplicateIdError if two files share a problem_id.
std::vector<ProblemSpec> load_registry(const std::string& dir,
                                       const ProblemDefaults& defaults = {});

// Serialization with defaults materialized; parse_problem(serialize(p))
// compares equal to p.
json to_json(const ProblemSpec& spec);

// Applies the rule to stdout text: one real per labeled pattern, in rule
// order regardless of where the labels appear in the text.
// Throws ExtractionError if a label is missing or its capture is not a real.
std::vector<double> extract_output(const std::string& stdout_text, const ExtractionRule& rule);

}  // namespace gauntlet::problems
