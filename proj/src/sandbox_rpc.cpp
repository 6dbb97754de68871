#include "gauntlet/sandbox.hpp"

#include "gauntlet/errors.hpp"

#include "httplib.h"

#include <thread>

namespace gauntlet::sandbox {

namespace {

constexpr int kParseError = -32700;
constexpr int kMethodNotFound = -32601;
constexpr int kInvalidParams = -32602;
constexpr int kServerError = -32000;

json rpc_error(const json& id, int code, const std::string& message) {
    return json{{"jsonrpc", "2.0"},
                {"id", id},
                {"error", {{"code", code}, {"message", message}}}};
}

json rpc_result(const json& id, json result) {
    return json{{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
}

CompileRequest compile_request_from_params(const json& args) {
    CompileRequest req;
    const json& files = util::require_key(args, "files", "compile arguments");
    if (!files.is_array()) throw SchemaError("files", "expected array");
    for (const auto& f : files)
        req.files.emplace_back(util::require_string(f, "name", "compile file"),
                               util::require_string(f, "content", "compile file"));
    req.entry_point = util::require_string(args, "entry_point", "compile arguments");
    if (args.contains("dependencies"))
        for (const auto& d : args["dependencies"]) req.dependencies.push_back(d.get<std::string>());
    return req;
}

}  // namespace

struct ToolServer::Impl {
    httplib::Server server;
    std::thread thread;
};

ToolServer::ToolServer(ToolchainProfile profile, std::string workdir_root, bool keep_workspaces)
    : engine_(std::make_unique<Engine>(std::move(profile), std::move(workdir_root),
                                       keep_workspaces)),
      impl_(std::make_unique<Impl>()) {}

ToolServer::~ToolServer() { stop(); }

json ToolServer::handle(const json& request) {
    if (!request.is_object()) return rpc_error(nullptr, kParseError, "request must be an object");
    const json id = request.contains("id") ? request["id"] : json(nullptr);
    if (!request.contains("method") || !request["method"].is_string())
        return rpc_error(id, kMethodNotFound, "missing method");
    const std::string method = request["method"].get<std::string>();
    const json params = request.value("params", json::object());

    try {
        if (method == "tools/list") {
            return rpc_result(id, json{{"tools",
                                        json::array({{{"name", "compile"},
                                                      {"description",
                                                       "build submitted sources in a fresh "
                                                       "workspace; returns diagnostics and a "
                                                       "workspace handle"}},
                                                     {{"name", "run"},
                                                      {"description",
                                                       "execute the compiled binary with the "
                                                       "given ranks and arguments"}}})}});
        }
        if (method == "tools/call") {
            const std::string name = util::require_string(params, "name", "tools/call params");
            const json args = params.value("arguments", json::object());
            if (name == "compile") {
                return rpc_result(id, engine_->compile(compile_request_from_params(args)).to_json());
            }
            if (name == "run") {
                ToolResult r = engine_->run(
                    util::require_string(args, "workspace_id", "run arguments"),
                    [&] {
                        std::vector<std::string> a;
                        if (args.contains("args"))
                            for (const auto& s : args["args"]) a.push_back(s.get<std::string>());
                        return a;
                    }(),
                    args.value("ranks", 1), args.value("timeout_seconds", 120.0),
                    args.value("memcheck", false));
                return rpc_result(id, r.to_json());
            }
            return rpc_error(id, kInvalidParams, "unknown tool: " + name);
        }
        if (method == "workspace/release") {
            engine_->release(util::require_string(params, "workspace_id", "release params"));
            return rpc_result(id, json{{"released", true}});
        }
        return rpc_error(id, kMethodNotFound, "unknown method: " + method);
    } catch (const SchemaError& e) {
        return rpc_error(id, kInvalidParams, e.what());
    } catch (const SandboxError& e) {
        return rpc_error(id, kServerError, e.what());
    } catch (const std::exception& e) {
        return rpc_error(id, kServerError, std::string("internal error: ") + e.what());
    }
}

int ToolServer::start(const std::string& host, int port) {
    // no SO_REUSEPORT: a taken port must fail the bind
    impl_->server.set_socket_options([](int sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes),
                     sizeof(yes));
    });
    impl_->server.Post("/mcp", [this](const httplib::Request& req, httplib::Response& res) {
        json request;
        try {
            request = json::parse(req.body);
        } catch (const json::parse_error&) {
            res.set_content(rpc_error(nullptr, kParseError, "parse error").dump(), "application/json");
            return;
        }
        res.set_content(handle(request).dump(), "application/json");
    });

    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        if (port_ < 0) throw BindError("cannot bind tool server on " + host);
    } else {
        if (!impl_->server.bind_to_port(host, port))
            throw BindError("cannot bind tool server on " + host + ":" + std::to_string(port));
        port_ = port;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return port_;
}

void ToolServer::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
    if (impl_ && impl_->thread.joinable()) impl_->thread.join();
}

ToolClient::ToolClient(std::string base_url) : base_url_(std::move(base_url)) {}

json ToolClient::rpc(const std::string& method, const json& params, double read_timeout_seconds) {
    int id;
    {
        std::lock_guard<std::mutex> lock(mu_);
        id = next_id_++;
    }
    const json request{{"jsonrpc", "2.0"}, {"id", id}, {"method", method}, {"params", params}};

    httplib::Client client(base_url_);
    client.set_connection_timeout(10, 0);
    client.set_read_timeout(static_cast<time_t>(read_timeout_seconds), 0);
    auto res = client.Post("/mcp", request.dump(), "application/json");
    if (!res)
        throw SandboxError("tool server unreachable at " + base_url_ + ": " +
                           httplib::to_string(res.error()));
    if (res->status != 200)
        throw SandboxError("tool server returned HTTP " + std::to_string(res->status));

    json reply;
    try {
        reply = json::parse(res->body);
    } catch (const json::parse_error& e) {
        throw SandboxError(std::string("tool server sent malformed JSON: ") + e.what());
    }
    if (reply.contains("error") && !reply["error"].is_null()) {
        const auto& err = reply["error"];
        throw SandboxError("tool server error " + std::to_string(err.value("code", 0)) + ": " +
                           err.value("message", std::string("unknown")));
    }
    if (!reply.contains("result")) throw SandboxError("tool server reply lacks result");
    return reply["result"];
}

std::vector<std::string> ToolClient::list_tools() {
    const json result = rpc("tools/list", json::object());
    std::vector<std::string> names;
    for (const auto& t : util::require_key(result, "tools", "tools/list result"))
        names.push_back(util::require_string(t, "name", "tool entry"));
    return names;
}

ToolResult ToolClient::compile(const CompileRequest& req) {
    json files = json::array();
    for (const auto& [name, content] : req.files)
        files.push_back({{"name", name}, {"content", content}});
    const json params{{"name", "compile"},
                      {"arguments",
                       {{"files", files},
                        {"entry_point", req.entry_point},
                        {"dependencies", req.dependencies}}}};
    return ToolResult::from_json(rpc("tools/call", params));
}

ToolResult ToolClient::run(const std::string& workspace_id, const std::vector<std::string>& args,
                           int ranks, double timeout_seconds, bool memcheck) {
    const json params{{"name", "run"},
                      {"arguments",
                       {{"workspace_id", workspace_id},
                        {"args", args},
                        {"ranks", ranks},
                        {"timeout_seconds", timeout_seconds},
                        {"memcheck", memcheck}}}};
    // the HTTP read must outlast the program's own timeout
    return ToolResult::from_json(rpc("tools/call", params, timeout_seconds + 60.0));
}

void ToolClient::release(const std::string& workspace_id) {
    rpc("workspace/release", json{{"workspace_id", workspace_id}});
}

}  // namespace gauntlet::sandbox
