#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gauntlet/util.hpp"

namespace gauntlet::judge {

using util::json;

struct JudgeVerdict {
    double score = 0.0;       // [0,1]
    double confidence = 1.0;  // (0,1]
    std::string rationale;
};

// Throws JudgeProtocolError if score/confidence are out of range.
void validate_verdict(const JudgeVerdict& v);

using SourceFiles = std::vector<std::pair<std::string, std::string>>;

class JudgeClient {
public:
    virtual ~JudgeClient() = default;
    // Implementations must either return a valid verdict or throw
    // JudgeProtocolError. Must tolerate concurrent calls.
    virtual JudgeVerdict evaluate(const std::string& rubric_id, const std::string& rubric_text,
                                  const std::string& problem_description,
                                  const SourceFiles& files) = 0;
};

// Deterministic stand-in: hashes rubric_id plus the source text into a
// reproducible verdict. Same inputs, same verdict, on any machine.
class MockJudge : public JudgeClient {
public:
    JudgeVerdict evaluate(const std::string& rubric_id, const std::string& rubric_text,
                          const std::string& problem_description,
                          const SourceFiles& files) override;
};

// Fixed verdicts per rubric_id, for tests that need pinned scores.
// Unknown rubric ids get the fallback verdict.
class ScriptedJudge : public JudgeClient {
public:
    explicit ScriptedJudge(std::map<std::string, JudgeVerdict> verdicts,
                           JudgeVerdict fallback = {0.5, 0.5, "scripted fallback"});
    JudgeVerdict evaluate(const std::string& rubric_id, const std::string& rubric_text,
                          const std::string& problem_description,
                          const SourceFiles& files) override;

private:
    std::map<std::string, JudgeVerdict> verdicts_;
    JudgeVerdict fallback_;
};

// Remote judge speaking the request/response contract:
//   POST <url>  {rubric_id, rubric_text, problem_description, files}
//   -> {score, confidence, rationale}
// Bearer auth token read from CODEGAUNTLET_JUDGE_KEY when set.
class HttpJudge : public JudgeClient {
public:
    explicit HttpJudge(std::string url);
    JudgeVerdict evaluate(const std::string& rubric_id, const std::string& rubric_text,
                          const std::string& problem_description,
                          const SourceFiles& files) override;

private:
    std::string base_url_;
    std::string path_;
};

}  // namespace gauntlet::judge
