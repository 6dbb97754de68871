#include "gauntlet/problem.hpp"

#include "gauntlet/errors.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <regex>
#include <set>

namespace gauntlet::problems {

namespace fs = std::filesystem;

std::string to_string(Difficulty d) {
    switch (d) {
        case Difficulty::easy: return "easy";
        case Difficulty::medium: return "medium";
        case Difficulty::hard: return "hard";
    }
    return "medium";
}

Difficulty difficulty_from_string(const std::string& s) {
    if (s == "easy") return Difficulty::easy;
    if (s == "medium") return Difficulty::medium;
    if (s == "hard") return Difficulty::hard;
    throw SchemaError("difficulty", "must be one of easy|medium|hard, got '" + s + "'");
}

namespace {

std::string default_pattern_for(const std::string& label) {
    // "<label>[ ]=[ ]<float>" with the usual float spellings captured.
    std::string escaped;
    for (char c : label) {
        if (std::string("\\^$.|?*+()[]{}").find(c) != std::string::npos) escaped.push_back('\\');
        escaped.push_back(c);
    }
    return escaped + R"(\s*[=:]\s*([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?))";
}

ExtractionRule parse_rule(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.empty())
        throw SchemaError("extraction_rule", "expected non-empty array in " + ctx);
    ExtractionRule rule;
    for (const auto& entry : j) {
        LabeledPattern lp;
        if (entry.is_string()) {
            lp.label = entry.get<std::string>();
            lp.pattern = default_pattern_for(lp.label);
        } else if (entry.is_object()) {
            lp.label = util::require_string(entry, "label", ctx + ".extraction_rule");
            if (entry.contains("pattern"))
                lp.pattern = entry["pattern"].get<std::string>();
            else
                lp.pattern = default_pattern_for(lp.label);
        } else {
            throw SchemaError("extraction_rule", "entries must be strings or objects in " + ctx);
        }
        try {
            std::regex probe(lp.pattern);
            if (probe.mark_count() < 1)
                throw SchemaError("extraction_rule",
                                  "pattern for '" + lp.label + "' has no capture group");
        } catch (const std::regex_error& e) {
            throw SchemaError("extraction_rule",
                              "invalid pattern for '" + lp.label + "': " + e.what());
        }
        rule.push_back(std::move(lp));
    }
    return rule;
}

TestCase parse_test_case(const json& j, const ProblemDefaults& defaults, const std::string& ctx) {
    TestCase tc;
    tc.case_id = util::require_string(j, "case_id", ctx);
    const std::string cctx = ctx + " case '" + tc.case_id + "'";

    const json& args = util::require_key(j, "run_args", cctx);
    if (!args.is_array()) throw SchemaError("run_args", "expected array in " + cctx);
    for (const auto& a : args) tc.run_args.push_back(a.get<std::string>());
    tc.mpi_ranks = defaults.mpi_ranks;
    if (j.contains("mpi_ranks")) {
        tc.mpi_ranks = j["mpi_ranks"].get<int>();
        if (tc.mpi_ranks < 1) throw SchemaError("mpi_ranks", "must be >= 1 in " + cctx);
    }
    const json& refs = util::require_key(j, "reference_values", cctx);
    if (!refs.is_array() || refs.empty())
        throw SchemaError("reference_values", "expected non-empty array in " + cctx);
    for (const auto& v : refs) {
        if (!v.is_number()) throw SchemaError("reference_values", "expected numbers in " + cctx);
        tc.reference_values.push_back(v.get<double>());
    }
    tc.extraction_rule = parse_rule(util::require_key(j, "extraction_rule", cctx), cctx);
    if (tc.extraction_rule.size() != tc.reference_values.size())
        throw SchemaError("extraction_rule",
                          "must yield exactly " + std::to_string(tc.reference_values.size()) +
                              " values (one per reference) in " + cctx + ", has " +
                              std::to_string(tc.extraction_rule.size()));
    tc.timeout_seconds = defaults.timeout_seconds;
    if (j.contains("timeout_seconds")) {
        tc.timeout_seconds = j["timeout_seconds"].get<double>();
        if (tc.timeout_seconds <= 0) throw SchemaError("timeout_seconds", "must be > 0 in " + cctx);
    }
    return tc;
}

}  // namespace

ProblemDefaults load_defaults(const std::string& path) {
    ProblemDefaults d;
    const json j = util::parse_json(util::read_file(path), path);
    if (j.contains("accuracy_tolerance")) d.accuracy_tolerance = j["accuracy_tolerance"].get<double>();
    if (j.contains("time_thresholds")) {
        const auto& t = j["time_thresholds"];
        if (!t.is_array() || t.size() != 4)
            throw SchemaError("time_thresholds", "expected 4 numbers in " + path);
        for (std::size_t i = 0; i < 4; ++i) d.time_thresholds[i] = t[i].get<double>();
    }
    if (j.contains("mpi_ranks")) d.mpi_ranks = j["mpi_ranks"].get<int>();
    if (j.contains("timeout_seconds")) d.timeout_seconds = j["timeout_seconds"].get<double>();
    return d;
}

ProblemSpec parse_problem(const std::string& text, const std::string& where,
                          const ProblemDefaults& defaults) {
    const json j = util::parse_json(text, where);
    if (!j.is_object()) throw SchemaError("(root)", "expected object in " + where);

    ProblemSpec spec;
    spec.problem_id = util::require_string(j, "problem_id", where);
    if (spec.problem_id.empty()) throw SchemaError("problem_id", "must be non-empty in " + where);
    spec.problem_name = util::require_string(j, "problem_name", where);
    spec.problem_description = util::require_string(j, "problem_description", where);
    if (j.contains("difficulty"))
        spec.difficulty = difficulty_from_string(j["difficulty"].get<std::string>());
    if (j.contains("module_tag")) spec.module_tag = j["module_tag"].get<std::string>();

    const json& cases = util::require_key(j, "test_cases", where);
    if (!cases.is_array() || cases.empty())
        throw SchemaError("test_cases", "expected non-empty array in " + where);
    std::set<std::string> seen_cases;
    for (const auto& c : cases) {
        TestCase tc = parse_test_case(c, defaults, where);
        if (!seen_cases.insert(tc.case_id).second)
            throw SchemaError("case_id", "duplicate case_id '" + tc.case_id + "' in " + where);
        spec.test_cases.push_back(std::move(tc));
    }

    spec.accuracy_tolerance = defaults.accuracy_tolerance;
    if (j.contains("accuracy_tolerance"))
        spec.accuracy_tolerance = j["accuracy_tolerance"].get<double>();
    if (spec.accuracy_tolerance <= 0)
        throw SchemaError("accuracy_tolerance", "must be > 0 in " + where);

    spec.time_thresholds = defaults.time_thresholds;
    if (j.contains("time_thresholds")) {
        const auto& t = j["time_thresholds"];
        if (!t.is_array() || t.size() != 4)
            throw SchemaError("time_thresholds", "expected exactly 4 numbers in " + where);
        for (std::size_t i = 0; i < 4; ++i) spec.time_thresholds[i] = t[i].get<double>();
    }
    const auto& th = spec.time_thresholds;
    if (!(0 < th[0] && th[0] < th[1] && th[1] < th[2] && th[2] < th[3]))
        throw SchemaError("time_thresholds",
                          "must satisfy 0 < t1 < t2 < t3 < t4 in " + where);
    return spec;
}

ProblemSpec load_problem(const std::string& path, const ProblemDefaults& defaults) {
    return parse_problem(util::read_file(path), path, defaults);
}

std::vector<ProblemSpec> load_registry(const std::string& dir, const ProblemDefaults& defaults) {
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());

    std::vector<ProblemSpec> specs;
    std::set<std::string> ids;
    for (const auto& f : files) {
        ProblemSpec spec = load_problem(f, defaults);
        if (!ids.insert(spec.problem_id).second)
            throw DuplicateIdError("duplicate problem_id '" + spec.problem_id + "' in " + f);
        specs.push_back(std::move(spec));
    }
    return specs;
}

json to_json(const ProblemSpec& spec) {
    json cases = json::array();
    for (const auto& tc : spec.test_cases) {
        json rule = json::array();
        for (const auto& lp : tc.extraction_rule)
            rule.push_back({{"label", lp.label}, {"pattern", lp.pattern}});
        cases.push_back({{"case_id", tc.case_id},
                         {"run_args", tc.run_args},
                         {"mpi_ranks", tc.mpi_ranks},
                         {"reference_values", tc.reference_values},
                         {"extraction_rule", rule},
                         {"timeout_seconds", tc.timeout_seconds}});
    }
    return json{{"problem_id", spec.problem_id},
                {"problem_name", spec.problem_name},
                {"problem_description", spec.problem_description},
                {"difficulty", to_string(spec.difficulty)},
                {"module_tag", spec.module_tag},
                {"test_cases", cases},
                {"accuracy_tolerance", spec.accuracy_tolerance},
                {"time_thresholds", spec.time_thresholds}};
}

std::vector<double> extract_output(const std::string& stdout_text, const ExtractionRule& rule) {
    std::vector<double> values;
    values.reserve(rule.size());
    for (const auto& lp : rule) {
        std::regex re(lp.pattern);
        std::smatch m;
        if (!std::regex_search(stdout_text, m, re))
            throw ExtractionError("label '" + lp.label + "' not found in program output");
        if (m.size() < 2)
            throw ExtractionError("pattern for label '" + lp.label + "' captured nothing");
        const std::string raw = m[1].str();
        char* end = nullptr;
        errno = 0;
        const double v = std::strtod(raw.c_str(), &end);
        if (end == raw.c_str() || *end != '\0' || errno == ERANGE)
            throw ExtractionError("label '" + lp.label + "': capture '" + raw +
                                  "' is not a parseable real");
        values.push_back(v);
    }
    return values;
}

}  // namespace gauntlet::problems
