#include "gauntlet/a2a.hpp"

#include "gauntlet/errors.hpp"

#include "httplib.h"

#include <algorithm>
#include <chrono>
#include <set>
#include <thread>

namespace gauntlet::a2a {

json to_json(const TaskRequest& req) {
    return json{{"task_id", req.task_id},
                {"problem_id", req.problem_id},
                {"problem_description", req.problem_description},
                {"deadline_seconds", req.deadline_seconds}};
}

TaskRequest task_request_from_json(const json& j) {
    TaskRequest req;
    req.task_id = util::require_string(j, "task_id", "task request");
    req.problem_id = util::require_string(j, "problem_id", "task request");
    req.problem_description = util::require_string(j, "problem_description", "task request");
    req.deadline_seconds = j.value("deadline_seconds", 60.0);
    if (req.deadline_seconds <= 0) throw SchemaError("deadline_seconds", "must be > 0");
    return req;
}

json to_json(const SubmissionArtifact& artifact) {
    json files = json::array();
    for (const auto& f : artifact.source_files)
        files.push_back({{"name", f.name}, {"content", f.content}});
    return json{{"task_id", artifact.task_id},
                {"source_files", files},
                {"entry_point", artifact.entry_point},
                {"dependencies", artifact.dependencies},
                {"run_args", artifact.run_args},
                {"notes", artifact.notes}};
}

SubmissionArtifact artifact_from_json(const json& j) {
    if (!j.is_object()) throw ProtocolError("artifact must be a JSON object");
    SubmissionArtifact a;
    try {
        a.task_id = util::require_string(j, "task_id", "artifact");
        const json& files = util::require_key(j, "source_files", "artifact");
        if (!files.is_array()) throw SchemaError("source_files", "expected array");
        for (const auto& f : files)
            a.source_files.push_back({util::require_string(f, "name", "source file"),
                                      util::require_string(f, "content", "source file")});
        a.entry_point = util::require_string(j, "entry_point", "artifact");
        if (j.contains("dependencies"))
            for (const auto& d : j["dependencies"]) a.dependencies.push_back(d.get<std::string>());
        if (j.contains("run_args"))
            for (const auto& r : j["run_args"]) a.run_args.push_back(r.get<std::string>());
        if (j.contains("notes") && !j["notes"].is_null()) a.notes = j["notes"].get<std::string>();
    } catch (const SchemaError& e) {
        throw ProtocolError(std::string("malformed artifact: ") + e.what());
    }
    return a;
}

void validate_artifact(const SubmissionArtifact& artifact) {
    if (artifact.source_files.empty()) throw ProtocolError("artifact has no source files");
    if (artifact.source_files.size() > kMaxSourceFiles)
        throw ProtocolError("artifact exceeds " + std::to_string(kMaxSourceFiles) + " files");
    std::set<std::string> names;
    bool entry_found = false;
    for (const auto& f : artifact.source_files) {
        if (f.name.empty()) throw ProtocolError("artifact contains an unnamed file");
        if (f.name.front() == '/') throw ProtocolError("absolute filename forbidden: " + f.name);
        if (f.name.find("..") != std::string::npos)
            throw ProtocolError("path traversal forbidden in filename: " + f.name);
        if (!names.insert(f.name).second) throw ProtocolError("duplicate filename: " + f.name);
        if (f.content.size() > kMaxFileBytes)
            throw ProtocolError("file " + f.name + " exceeds " + std::to_string(kMaxFileBytes) +
                                " bytes");
        if (f.name == artifact.entry_point) entry_found = true;
    }
    if (artifact.entry_point.empty()) throw ProtocolError("artifact entry_point is empty");
    if (!entry_found)
        throw ProtocolError("entry_point '" + artifact.entry_point +
                            "' does not name a submitted file");
}

SubmissionArtifact dispatch_task(const std::string& agent_endpoint, const TaskRequest& req) {
    httplib::Client client(agent_endpoint);
    // budget: connect within the grace window, read within the deadline,
    // so the call never blocks past deadline + 2 s
    const double grace = 2.0;
    auto ms = [](double s) {
        return std::chrono::milliseconds(static_cast<long long>(s * 1000));
    };
    client.set_connection_timeout(ms(std::min(req.deadline_seconds, grace)));
    client.set_read_timeout(ms(req.deadline_seconds));
    client.set_write_timeout(ms(std::min(req.deadline_seconds, grace)));

    auto res = client.Post("/a2a/tasks", to_json(req).dump(), "application/json");
    if (!res)
        throw TransportError("agent unreachable at " + agent_endpoint + ": " +
                             httplib::to_string(res.error()));
    if (res->status != 200) {
        std::string detail;
        try {
            detail = json::parse(res->body).value("error", std::string());
        } catch (...) {
        }
        throw ProtocolError("agent returned HTTP " + std::to_string(res->status) +
                            (detail.empty() ? "" : (": " + detail)));
    }

    json body;
    try {
        body = json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw ProtocolError(std::string("agent sent malformed JSON: ") + e.what());
    }
    SubmissionArtifact artifact = artifact_from_json(body);
    if (artifact.task_id != req.task_id)
        throw ProtocolError("task_id mismatch: sent '" + req.task_id + "', got '" +
                            artifact.task_id + "'");
    validate_artifact(artifact);
    return artifact;
}

struct MockPurpleServer::Impl {
    httplib::Server server;
    std::thread thread;
};

MockPurpleServer::MockPurpleServer(std::map<std::string, SubmissionArtifact> script)
    : script_(std::move(script)), impl_(std::make_unique<Impl>()) {}

MockPurpleServer::~MockPurpleServer() { stop(); }

int MockPurpleServer::start(const std::string& host, int port) {
    host_ = host;
    // no SO_REUSEPORT: a taken port must fail the bind
    impl_->server.set_socket_options([](int sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes),
                     sizeof(yes));
    });
    impl_->server.Post("/a2a/tasks", [this](const httplib::Request& req, httplib::Response& res) {
        if (delay_seconds_ > 0)
            std::this_thread::sleep_for(std::chrono::duration<double>(delay_seconds_));
        json body;
        try {
            body = json::parse(req.body);
        } catch (const json::parse_error&) {
            res.status = 400;
            res.set_content(json{{"error", "malformed task request"}}.dump(), "application/json");
            return;
        }
        TaskRequest task;
        try {
            task = task_request_from_json(body);
        } catch (const std::exception& e) {
            res.status = 400;
            res.set_content(json{{"error", e.what()}}.dump(), "application/json");
            return;
        }
        auto it = script_.find(task.problem_id);
        if (it == script_.end()) {
            res.status = 404;
            res.set_content(json{{"error", "unknown problem_id: " + task.problem_id}}.dump(),
                            "application/json");
            return;
        }
        SubmissionArtifact artifact = it->second;
        artifact.task_id = task.task_id;  // echo
        res.set_content(to_json(artifact).dump(), "application/json");
    });

    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        if (port_ < 0) throw BindError("cannot bind mock agent on " + host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            throw BindError("cannot bind mock agent on " + host + ":" + std::to_string(port));
        port_ = port;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void MockPurpleServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
    if (impl_ && impl_->thread.joinable()) impl_->thread.join();
}

std::string MockPurpleServer::url() const {
    return "http://" + host_ + ":" + std::to_string(port_);
}

}  // namespace gauntlet::a2a
