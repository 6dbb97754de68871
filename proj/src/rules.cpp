#include "gauntlet/rules.hpp"

#include "gauntlet/errors.hpp"

#include <regex>
#include <sstream>

namespace gauntlet::rules {

namespace {

std::vector<std::string> string_list(const json& j, const std::string& key,
                                     std::vector<std::string> fallback) {
    if (!j.contains(key)) return fallback;
    std::vector<std::string> out;
    for (const auto& v : j[key]) out.push_back(v.get<std::string>());
    return out;
}

std::string string_or(const json& j, const std::string& key, std::string fallback) {
    return j.contains(key) ? j[key].get<std::string>() : fallback;
}

}  // namespace

RuleSet RuleSet::petsc_defaults() {
    RuleSet rs;
    rs.augmenters["code_style"] = {
        {"tab indentation", "\t"},
        {"line longer than 120 characters", "^.{121,}"},
        {"goto statement", R"(\bgoto\b)"},
    };
    rs.augmenters["solver_choice"] = {
        {"solver type pinned in code", R"((KSP|SNES|TS|Tao)SetType\s*\()"},
        {"options database consulted", R"([A-Za-z]+SetFromOptions\s*\()"},
        {"tolerances hard-coded", R"([A-Za-z]+SetTolerances\s*\()"},
    };
    rs.augmenters["best_practices"] = {
        {"legacy error macro CHKERRQ", R"(\bCHKERRQ\s*\()"},
        {"deprecated PETSC_NULL macro", R"(\bPETSC_NULL\b)"},
        {"raw malloc instead of PetscMalloc", R"(\bmalloc\s*\()"},
        {"exit() bypasses library teardown", R"(\bexit\s*\()"},
    };
    return rs;
}

RuleSet RuleSet::from_json(const json& j) {
    RuleSet rs = petsc_defaults();
    if (j.contains("api")) {
        const auto& a = j["api"];
        rs.api.init_symbol = string_or(a, "init_symbol", rs.api.init_symbol);
        rs.api.finalize_symbol = string_or(a, "finalize_symbol", rs.api.finalize_symbol);
        rs.api.private_include_pattern =
            string_or(a, "private_include_pattern", rs.api.private_include_pattern);
        rs.api.library_token = string_or(a, "library_token", rs.api.library_token);
        rs.api.allowed_header_pattern =
            string_or(a, "allowed_header_pattern", rs.api.allowed_header_pattern);
    }
    if (j.contains("error_handling")) {
        const auto& e = j["error_handling"];
        rs.error_handling.call_prefixes =
            string_list(e, "call_prefixes", rs.error_handling.call_prefixes);
        rs.error_handling.check_macros =
            string_list(e, "check_macros", rs.error_handling.check_macros);
        rs.error_handling.legacy_macros =
            string_list(e, "legacy_macros", rs.error_handling.legacy_macros);
        if (e.contains("legacy_weight")) {
            rs.error_handling.legacy_weight = e["legacy_weight"].get<double>();
            if (rs.error_handling.legacy_weight < 0 || rs.error_handling.legacy_weight > 1)
                throw SchemaError("legacy_weight", "must be in [0,1]");
        }
        rs.error_handling.ignore_symbols =
            string_list(e, "ignore_symbols", rs.error_handling.ignore_symbols);
    }
    if (j.contains("parallel")) {
        const auto& p = j["parallel"];
        rs.parallel.communicator_symbols =
            string_list(p, "communicator_symbols", rs.parallel.communicator_symbols);
        rs.parallel.creation_call_token =
            string_or(p, "creation_call_token", rs.parallel.creation_call_token);
        rs.parallel.collective_calls =
            string_list(p, "collective_calls", rs.parallel.collective_calls);
        rs.parallel.rank_token = string_or(p, "rank_token", rs.parallel.rank_token);
        rs.parallel.print_calls = string_list(p, "print_calls", rs.parallel.print_calls);
    }
    if (j.contains("memory")) {
        rs.memory.leak_signatures =
            string_list(j["memory"], "leak_signatures", rs.memory.leak_signatures);
    }
    if (j.contains("augmenters")) {
        rs.augmenters.clear();
        for (const auto& [rubric, patterns] : j["augmenters"].items()) {
            std::vector<AugmenterPattern> ps;
            for (const auto& p : patterns) {
                ps.push_back({util::require_string(p, "label", "augmenters." + rubric),
                              util::require_string(p, "pattern", "augmenters." + rubric)});
            }
            rs.augmenters[rubric] = std::move(ps);
        }
    }
    return rs;
}

RuleSet RuleSet::load(const std::string& path) {
    return from_json(util::parse_json(util::read_file(path), path));
}

json RuleSet::to_json() const {
    json aug = json::object();
    for (const auto& [rubric, patterns] : augmenters) {
        json ps = json::array();
        for (const auto& p : patterns) ps.push_back({{"label", p.label}, {"pattern", p.pattern}});
        aug[rubric] = ps;
    }
    return json{
        {"api",
         {{"init_symbol", api.init_symbol},
          {"finalize_symbol", api.finalize_symbol},
          {"private_include_pattern", api.private_include_pattern},
          {"library_token", api.library_token},
          {"allowed_header_pattern", api.allowed_header_pattern}}},
        {"error_handling",
         {{"call_prefixes", error_handling.call_prefixes},
          {"check_macros", error_handling.check_macros},
          {"legacy_macros", error_handling.legacy_macros},
          {"legacy_weight", error_handling.legacy_weight},
          {"ignore_symbols", error_handling.ignore_symbols}}},
        {"parallel",
         {{"communicator_symbols", parallel.communicator_symbols},
          {"creation_call_token", parallel.creation_call_token},
          {"collective_calls", parallel.collective_calls},
          {"rank_token", parallel.rank_token},
          {"print_calls", parallel.print_calls}}},
        {"memory", {{"leak_signatures", memory.leak_signatures}}},
        {"augmenters", aug}};
}

std::vector<std::string> run_augmenter(const std::vector<AugmenterPattern>& patterns,
                                       const std::vector<std::pair<std::string, std::string>>& files,
                                       std::size_t max_hits) {
    std::vector<std::string> hits;
    for (const auto& ap : patterns) {
        std::regex re;
        try {
            re = std::regex(ap.pattern);
        } catch (const std::regex_error& e) {
            throw ConfigError("bad augmenter pattern '" + ap.label + "': " + e.what());
        }
        for (const auto& [name, content] : files) {
            std::istringstream ss(content);
            std::string line;
            int lineno = 0;
            while (std::getline(ss, line)) {
                ++lineno;
                if (hits.size() >= max_hits) return hits;
                if (std::regex_search(line, re))
                    hits.push_back(ap.label + " (" + name + ":" + std::to_string(lineno) + ")");
            }
        }
    }
    return hits;
}

std::string default_rubric_text(const std::string& rubric_id) {
    if (rubric_id == "readability")
        return "Rate how easily a maintainer can follow this code: naming, structure, "
               "control flow, and absence of gratuitous cleverness. 0 = opaque, 1 = exemplary.";
    if (rubric_id == "code_style")
        return "Rate adherence to consistent formatting and C style conventions: "
               "indentation, declaration placement, consistent brace style. 0 = chaotic, "
               "1 = uniformly clean.";
    if (rubric_id == "documentation")
        return "Rate the usefulness of comments and any usage notes: intent explained where "
               "non-obvious, no stale or noisy comments. 0 = undocumented, 1 = well documented.";
    if (rubric_id == "algorithm_appropriateness")
        return "Rate whether the chosen numerical method fits the stated problem "
               "(discretization, stability, complexity). 0 = unsuitable, 1 = well matched.";
    if (rubric_id == "solver_choice")
        return "Rate whether solver and preconditioner selections are sensible for the "
               "problem class, and whether they remain runtime-configurable. 0 = poor, 1 = ideal.";
    if (rubric_id == "best_practices")
        return "Rate compliance with current library idioms: modern error-checking macros, "
               "library memory management, no deprecated calls. 0 = legacy throughout, "
               "1 = fully current.";
    throw ConfigError("unknown rubric id: " + rubric_id);
}

}  // namespace gauntlet::rules
