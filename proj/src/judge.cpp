#include "gauntlet/judge.hpp"

#include "gauntlet/errors.hpp"

#include "httplib.h"

#include <cstdio>
#include <cstdlib>

namespace gauntlet::judge {

void validate_verdict(const JudgeVerdict& v) {
    if (!(v.score >= 0.0 && v.score <= 1.0))
        throw JudgeProtocolError("judge score out of [0,1]: " + std::to_string(v.score));
    if (!(v.confidence > 0.0 && v.confidence <= 1.0))
        throw JudgeProtocolError("judge confidence out of (0,1]: " +
                                 std::to_string(v.confidence));
}

JudgeVerdict MockJudge::evaluate(const std::string& rubric_id, const std::string& rubric_text,
                                 const std::string& problem_description,
                                 const SourceFiles& files) {
    (void)rubric_text;  // deliberately not hashed: augmenter findings must
    (void)problem_description;  // not perturb the verdict between runs
    std::string blob = rubric_id;
    blob.push_back('\0');
    for (const auto& [name, content] : files) {
        blob += name;
        blob.push_back('\0');
        blob += content;
        blob.push_back('\0');
    }
    const std::uint64_t h = util::fnv1a(blob);
    JudgeVerdict v;
    v.score = 0.35 + static_cast<double>(h % 61) / 100.0;          // 0.35 .. 0.95
    v.confidence = 0.50 + static_cast<double>((h >> 8) % 51) / 100.0;  // 0.50 .. 1.00
    char buf[64];
    std::snprintf(buf, sizeof(buf), "mock verdict (digest %016llx)",
                  static_cast<unsigned long long>(h));
    v.rationale = buf;
    return v;
}

ScriptedJudge::ScriptedJudge(std::map<std::string, JudgeVerdict> verdicts, JudgeVerdict fallback)
    : verdicts_(std::move(verdicts)), fallback_(std::move(fallback)) {}

JudgeVerdict ScriptedJudge::evaluate(const std::string& rubric_id, const std::string&,
                                     const std::string&, const SourceFiles&) {
    auto it = verdicts_.find(rubric_id);
    return it == verdicts_.end() ? fallback_ : it->second;
}

HttpJudge::HttpJudge(std::string url) {
    // split "http://host:port/some/path" into client base and request path
    std::string u = std::move(url);
    if (u.rfind("http://", 0) != 0 && u.rfind("https://", 0) != 0) u = "http://" + u;
    const auto scheme_end = u.find("://") + 3;
    const auto slash = u.find('/', scheme_end);
    if (slash == std::string::npos) {
        base_url_ = u;
        path_ = "/judge";
    } else {
        base_url_ = u.substr(0, slash);
        path_ = u.substr(slash);
    }
}

JudgeVerdict HttpJudge::evaluate(const std::string& rubric_id, const std::string& rubric_text,
                                 const std::string& problem_description,
                                 const SourceFiles& files) {
    json file_array = json::array();
    for (const auto& [name, content] : files)
        file_array.push_back({{"name", name}, {"content", content}});
    const json request{{"rubric_id", rubric_id},
                       {"rubric_text", rubric_text},
                       {"problem_description", problem_description},
                       {"files", file_array}};

    httplib::Client client(base_url_);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (const char* key = std::getenv("CODEGAUNTLET_JUDGE_KEY"))
        headers.emplace("Authorization", std::string("Bearer ") + key);

    auto res = client.Post(path_, headers, request.dump(), "application/json");
    if (!res)
        throw JudgeProtocolError("judge unreachable at " + base_url_ + ": " +
                                 httplib::to_string(res.error()));
    if (res->status != 200)
        throw JudgeProtocolError("judge returned HTTP " + std::to_string(res->status));

    json body;
    try {
        body = json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw JudgeProtocolError(std::string("judge sent malformed JSON: ") + e.what());
    }
    JudgeVerdict v;
    if (!body.contains("score") || !body["score"].is_number())
        throw JudgeProtocolError("judge verdict lacks numeric score");
    if (!body.contains("confidence") || !body["confidence"].is_number())
        throw JudgeProtocolError("judge verdict lacks numeric confidence");
    v.score = body["score"].get<double>();
    v.confidence = body["confidence"].get<double>();
    v.rationale = body.value("rationale", std::string());
    validate_verdict(v);
    return v;
}

}  // namespace gauntlet::judge
