#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "gauntlet/util.hpp"

namespace gauntlet::a2a {

using util::json;

struct TaskRequest {
    std::string task_id;
    std::string problem_id;
    std::string problem_description;
    double deadline_seconds = 60.0;
};

struct SourceFile {
    std::string name;
    std::string content;

    bool operator==(const SourceFile&) const = default;
};

struct SubmissionArtifact {
    std::string task_id;
    std::vector<SourceFile> source_files;
    std::string entry_point;
    std::vector<std::string> dependencies;
    std::vector<std::string> run_args;
    std::string notes;

    bool operator==(const SubmissionArtifact&) const = default;
};

constexpr std::size_t kMaxSourceFiles = 20;
constexpr std::size_t kMaxFileBytes = 1024 * 1024;

json to_json(const TaskRequest& req);
TaskRequest task_request_from_json(const json& j);

json to_json(const SubmissionArtifact& artifact);
SubmissionArtifact artifact_from_json(const json& j);

// The single validation path for artifacts, wire-received or local.
// Throws ProtocolError describing the first violated invariant.
void validate_artifact(const SubmissionArtifact& artifact);

// POST /a2a/tasks against the agent; blocks at most deadline + 2 s grace.
// Throws TransportError (unreachable/timeout) or ProtocolError (bad payload,
// task_id mismatch, invariant violation).
SubmissionArtifact dispatch_task(const std::string& agent_endpoint, const TaskRequest& req);

// Scripted stand-in for a model-under-test agent: answers each known
// problem_id with a canned artifact, echoing the request's task_id.
class MockPurpleServer {
public:
    explicit MockPurpleServer(std::map<std::string, SubmissionArtifact> script);
    ~MockPurpleServer();

    // port 0 picks a free port; returns the bound port. Throws BindError.
    int start(const std::string& host, int port);
    void stop();
    int port() const { return port_; }
    std::string url() const;

    // artificial response delay, for deadline tests
    void set_response_delay_seconds(double s) { delay_seconds_ = s; }

private:
    std::map<std::string, SubmissionArtifact> script_;
    double delay_seconds_ = 0.0;
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::string host_;
    int port_ = 0;
};

}  // namespace gauntlet::a2a
