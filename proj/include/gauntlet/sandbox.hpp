#pragma once

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gauntlet/util.hpp"

namespace gauntlet::sandbox {

using util::json;

// Describes how to build and launch code. Templates are whitespace-split;
// {sources}, {extra_flags} and {args} expand to zero or more argv entries,
// {output}, {binary} and {ranks} to exactly one.
struct ToolchainProfile {
    std::string name;
    std::string compile_command_template;   // {sources} {output} {extra_flags}
    std::string run_launcher_template;      // {ranks} {binary} {args}
    std::string memcheck_command_template;  // optional; {binary} {args}
    int max_ranks = 1;
    bool memcheck_available = false;
    std::vector<std::string> include_dirs;
    std::vector<std::string> lib_dirs;
    std::vector<std::string> libs;
    std::vector<std::string> source_extensions{".c"};
    std::vector<std::pair<std::string, std::string>> env;  // added to the scrubbed child env
    double compile_timeout_seconds = 60.0;

    // throws SchemaError when a template is missing a placeholder
    void validate() const;

    static ToolchainProfile plain_c();
    // plain_c plus valgrind-backed memcheck, for hosts that have it
    static ToolchainProfile plain_c_valgrind();
    static ToolchainProfile from_json(const json& j);
    static ToolchainProfile load(const std::string& path);
    json to_json() const;
};

struct MemcheckReport {
    long long leaked_bytes = 0;
    long long invalid_accesses = 0;
};

struct ToolResult {
    bool ok = false;
    int exit_code = -1;
    std::string stdout_text;
    std::string stderr_text;
    double wall_time_seconds = 0.0;
    bool timed_out = false;
    bool stdout_truncated = false;
    bool stderr_truncated = false;
    std::vector<std::string> warnings;  // e.g. rank downgrade notices
    std::optional<MemcheckReport> memcheck;
    std::string workspace_id;  // session handle, filled by compile

    json to_json() const;
    static ToolResult from_json(const json& j);
};

struct CompileRequest {
    std::vector<std::pair<std::string, std::string>> files;  // name -> content
    std::string entry_point;
    std::vector<std::string> dependencies;  // extra compiler/linker tokens
};

// What the pipeline programs against; implemented by the in-process
// engine and by the HTTP tool client.
class ToolBackend {
public:
    virtual ~ToolBackend() = default;
    virtual ToolResult compile(const CompileRequest& req) = 0;
    virtual ToolResult run(const std::string& workspace_id, const std::vector<std::string>& args,
                           int ranks, double timeout_seconds, bool memcheck) = 0;
    virtual void release(const std::string& workspace_id) = 0;
};

// Parses leak bytes and invalid-access counts out of valgrind-style output.
MemcheckReport parse_memcheck_output(const std::string& text);

// Local compile/run engine. Each compile creates a fresh workspace
// directory under workdir_root, keyed by a random session id.
class Engine : public ToolBackend {
public:
    Engine(ToolchainProfile profile, std::string workdir_root, bool keep_workspaces = false);
    ~Engine() override;

    ToolResult compile(const CompileRequest& req) override;
    ToolResult run(const std::string& workspace_id, const std::vector<std::string>& args,
                   int ranks, double timeout_seconds, bool memcheck) override;
    void release(const std::string& workspace_id) override;

    const ToolchainProfile& profile() const { return profile_; }
    // test introspection
    std::string workspace_dir(const std::string& workspace_id) const;

private:
    struct Workspace {
        std::string dir;
        std::string binary;  // empty until a successful compile
    };

    ToolchainProfile profile_;
    std::string root_;
    bool keep_;
    mutable std::mutex mu_;
    std::map<std::string, Workspace> workspaces_;
};

// JSON-RPC 2.0 surface over an Engine: POST /mcp with methods
// tools/list, tools/call and workspace/release.
class ToolServer {
public:
    ToolServer(ToolchainProfile profile, std::string workdir_root, bool keep_workspaces = false);
    ~ToolServer();

    // port 0 picks a free port; returns the bound port. Throws BindError.
    int start(const std::string& host, int port);
    void stop();
    int port() const { return port_; }

    // single JSON-RPC exchange, exposed for tests
    json handle(const json& request);

private:
    std::unique_ptr<Engine> engine_;
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = 0;
};

// HTTP client side of the tool surface. Transport failures and server
// infrastructure errors surface as SandboxError.
class ToolClient : public ToolBackend {
public:
    explicit ToolClient(std::string base_url);

    std::vector<std::string> list_tools();
    ToolResult compile(const CompileRequest& req) override;
    ToolResult run(const std::string& workspace_id, const std::vector<std::string>& args,
                   int ranks, double timeout_seconds, bool memcheck) override;
    void release(const std::string& workspace_id) override;

private:
    json rpc(const std::string& method, const json& params, double read_timeout_seconds = 120.0);
    std::string base_url_;
    int next_id_ = 1;
    std::mutex mu_;
};

}  // namespace gauntlet::sandbox
