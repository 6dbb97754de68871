// mock-purple: scripted model-under-test agent for demos and local runs.
// The script file maps problem_id to a canned submission artifact:
//
//   { "p01": { "source_files": [{"name": "main.c", "content": "..."}],
//              "entry_point": "main.c" }, ... }
//
//   mock-purple --script fixtures/agents/good_agent.json --port 9001

#include "CLI11.hpp"

#include "gauntlet/a2a.hpp"
#include "gauntlet/errors.hpp"
#include "gauntlet/util.hpp"

#include <csignal>
#include <iostream>
#include <map>

namespace {
volatile std::sig_atomic_t g_stop = 0;
void handle_signal(int) { g_stop = 1; }
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scripted agent answering task requests with canned artifacts"};
    std::string script_path, host = "0.0.0.0";
    int port = 9001;
    app.add_option("--script", script_path, "problem_id -> artifact JSON map")->required();
    app.add_option("--port", port, "listen port");
    app.add_option("--host", host, "bind address");
    CLI11_PARSE(app, argc, argv);

    std::map<std::string, gauntlet::a2a::SubmissionArtifact> script;
    try {
        const auto j = gauntlet::util::parse_json(gauntlet::util::read_file(script_path),
                                                  script_path);
        for (const auto& [problem_id, artifact_json] : j.items()) {
            auto artifact = gauntlet::a2a::artifact_from_json(
                [&] {
                    auto a = artifact_json;
                    if (!a.contains("task_id")) a["task_id"] = "";  // echoed per request
                    return a;
                }());
            gauntlet::a2a::validate_artifact(artifact);
            script[problem_id] = std::move(artifact);
        }
    } catch (const std::exception& e) {
        std::cerr << "bad script: " << e.what() << "\n";
        return 2;
    }

    try {
        gauntlet::a2a::MockPurpleServer server(script);
        const int bound = server.start(host, port);
        std::cout << "mock-purple listening on " << host << ":" << bound << " serving "
                  << script.size() << " problem(s)" << std::endl;
        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        while (!g_stop) pause();
        server.stop();
    } catch (const gauntlet::BindError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
