// sandboxd: the compile/run tool server. Exposes JSON-RPC 2.0 on
// POST /mcp with tools/list, tools/call and workspace/release.
//
//   sandboxd --profile config/profiles/plain-c.json --port 9100 --workdir /tmp/sandbox

#include "CLI11.hpp"

#include "gauntlet/errors.hpp"
#include "gauntlet/sandbox.hpp"

#include <csignal>
#include <iostream>

namespace {
volatile std::sig_atomic_t g_stop = 0;
void handle_signal(int) { g_stop = 1; }
}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sandboxed compile/run tool server"};
    std::string profile_path, workdir = "/tmp/gauntlet-sandbox", host = "0.0.0.0";
    int port = 9100;
    bool keep = false;
    app.add_option("--profile", profile_path, "toolchain profile JSON (default plain-c)");
    app.add_option("--port", port, "listen port");
    app.add_option("--host", host, "bind address");
    app.add_option("--workdir", workdir, "workspace root directory");
    app.add_flag("--keep-workspaces", keep, "do not delete workspaces on release");
    CLI11_PARSE(app, argc, argv);

    gauntlet::sandbox::ToolchainProfile profile;
    try {
        profile = profile_path.empty() ? gauntlet::sandbox::ToolchainProfile::plain_c()
                                       : gauntlet::sandbox::ToolchainProfile::load(profile_path);
    } catch (const std::exception& e) {
        std::cerr << "bad profile: " << e.what() << "\n";
        return 2;
    }

    try {
        gauntlet::sandbox::ToolServer server(profile, workdir, keep);
        const int bound = server.start(host, port);
        std::cout << "sandboxd listening on " << host << ":" << bound << " (profile "
                  << profile.name << ", workdir " << workdir << ")" << std::endl;
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
