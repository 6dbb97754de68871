#include "gauntlet/sandbox.hpp"

#include "gauntlet/errors.hpp"
#include "gauntlet/process.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

namespace gauntlet::sandbox {

namespace fs = std::filesystem;

namespace {

void require_placeholder(const std::string& tmpl, const std::string& ph, const std::string& field) {
    if (tmpl.find(ph) == std::string::npos)
        throw SchemaError(field, "template missing placeholder " + ph);
}

// Splits a command template on whitespace and expands placeholders.
// A token that is exactly a list placeholder expands to n entries.
std::vector<std::string> expand_template(
    const std::string& tmpl, const std::map<std::string, std::vector<std::string>>& lists,
    const std::map<std::string, std::string>& scalars) {
    std::vector<std::string> argv;
    std::istringstream ss(tmpl);
    std::string tok;
    while (ss >> tok) {
        auto lit = lists.find(tok);
        if (lit != lists.end()) {
            argv.insert(argv.end(), lit->second.begin(), lit->second.end());
            continue;
        }
        for (const auto& [ph, value] : scalars) {
            std::size_t pos;
            while ((pos = tok.find(ph)) != std::string::npos) tok.replace(pos, ph.size(), value);
        }
        argv.push_back(tok);
    }
    return argv;
}

bool filename_is_safe(const std::string& name) {
    if (name.empty() || name.front() == '/') return false;
    if (name.find("..") != std::string::npos) return false;
    return true;
}

std::vector<std::pair<std::string, std::string>> scrubbed_env(const ToolchainProfile& profile,
                                                              const std::string& home) {
    std::vector<std::pair<std::string, std::string>> env = {
        {"PATH", "/usr/local/sbin:/usr/local/bin:/usr/sbin:/usr/bin:/sbin:/bin"},
        {"HOME", home},
        {"LC_ALL", "C"},
    };
    for (const auto& kv : profile.env) env.push_back(kv);
    return env;
}

}  // namespace

void ToolchainProfile::validate() const {
    if (name.empty()) throw SchemaError("name", "profile name must be non-empty");
    require_placeholder(compile_command_template, "{sources}", "compile_command_template");
    require_placeholder(compile_command_template, "{output}", "compile_command_template");
    require_placeholder(compile_command_template, "{extra_flags}", "compile_command_template");
    require_placeholder(run_launcher_template, "{binary}", "run_launcher_template");
    require_placeholder(run_launcher_template, "{args}", "run_launcher_template");
    if (max_ranks < 1) throw SchemaError("max_ranks", "must be >= 1");
    if (memcheck_available && memcheck_command_template.empty())
        throw SchemaError("memcheck_command_template",
                          "required when memcheck_available is true");
}

ToolchainProfile ToolchainProfile::plain_c() {
    ToolchainProfile p;
    p.name = "plain-c";
    p.compile_command_template = "cc {sources} -o {output} {extra_flags}";
    p.run_launcher_template = "{binary} {args}";
    p.max_ranks = 1;
    p.memcheck_available = false;
    p.libs = {"m"};
    return p;
}

ToolchainProfile ToolchainProfile::plain_c_valgrind() {
    ToolchainProfile p = plain_c();
    p.name = "plain-c-valgrind";
    p.memcheck_available = true;
    p.memcheck_command_template = "valgrind --leak-check=full --error-exitcode=0 {binary} {args}";
    return p;
}

ToolchainProfile ToolchainProfile::from_json(const json& j) {
    ToolchainProfile p;
    p.name = util::require_string(j, "name", "profile");
    p.compile_command_template = util::require_string(j, "compile_command_template", "profile");
    p.run_launcher_template = util::require_string(j, "run_launcher_template", "profile");
    if (j.contains("memcheck_command_template"))
        p.memcheck_command_template = j["memcheck_command_template"].get<std::string>();
    if (j.contains("max_ranks")) p.max_ranks = j["max_ranks"].get<int>();
    if (j.contains("memcheck_available")) p.memcheck_available = j["memcheck_available"].get<bool>();
    auto list = [&](const char* key, std::vector<std::string>& dst) {
        if (j.contains(key)) {
            dst.clear();
            for (const auto& v : j[key]) dst.push_back(v.get<std::string>());
        }
    };
    list("include_dirs", p.include_dirs);
    list("lib_dirs", p.lib_dirs);
    list("libs", p.libs);
    list("source_extensions", p.source_extensions);
    if (j.contains("env")) {
        for (const auto& [k, v] : j["env"].items()) p.env.emplace_back(k, v.get<std::string>());
    }
    if (j.contains("compile_timeout_seconds"))
        p.compile_timeout_seconds = j["compile_timeout_seconds"].get<double>();
    p.validate();
    return p;
}

ToolchainProfile ToolchainProfile::load(const std::string& path) {
    return from_json(util::parse_json(util::read_file(path), path));
}

json ToolchainProfile::to_json() const {
    json env_obj = json::object();
    for (const auto& [k, v] : env) env_obj[k] = v;
    return json{{"name", name},
                {"compile_command_template", compile_command_template},
                {"run_launcher_template", run_launcher_template},
                {"memcheck_command_template", memcheck_command_template},
                {"max_ranks", max_ranks},
                {"memcheck_available", memcheck_available},
                {"include_dirs", include_dirs},
                {"lib_dirs", lib_dirs},
                {"libs", libs},
                {"source_extensions", source_extensions},
                {"env", env_obj},
                {"compile_timeout_seconds", compile_timeout_seconds}};
}

json ToolResult::to_json() const {
    json j{{"ok", ok},
           {"exit_code", exit_code},
           {"stdout", stdout_text},
           {"stderr", stderr_text},
           {"wall_time_seconds", wall_time_seconds},
           {"timed_out", timed_out},
           {"stdout_truncated", stdout_truncated},
           {"stderr_truncated", stderr_truncated},
           {"warnings", warnings},
           {"workspace_id", workspace_id}};
    if (memcheck)
        j["memcheck_report"] = {{"leaked_bytes", memcheck->leaked_bytes},
                                {"invalid_accesses", memcheck->invalid_accesses}};
    else
        j["memcheck_report"] = nullptr;
    return j;
}

ToolResult ToolResult::from_json(const json& j) {
    ToolResult r;
    r.ok = util::require_key(j, "ok", "tool result").get<bool>();
    r.exit_code = util::require_key(j, "exit_code", "tool result").get<int>();
    r.stdout_text = util::require_string(j, "stdout", "tool result");
    r.stderr_text = util::require_string(j, "stderr", "tool result");
    r.wall_time_seconds = util::require_number(j, "wall_time_seconds", "tool result");
    if (r.wall_time_seconds < 0) throw SchemaError("wall_time_seconds", "must be >= 0");
    r.timed_out = j.value("timed_out", false);
    r.stdout_truncated = j.value("stdout_truncated", false);
    r.stderr_truncated = j.value("stderr_truncated", false);
    if (j.contains("warnings"))
        for (const auto& w : j["warnings"]) r.warnings.push_back(w.get<std::string>());
    if (j.contains("memcheck_report") && !j["memcheck_report"].is_null()) {
        MemcheckReport m;
        m.leaked_bytes = j["memcheck_report"].value("leaked_bytes", 0ll);
        m.invalid_accesses = j["memcheck_report"].value("invalid_accesses", 0ll);
        if (m.leaked_bytes < 0 || m.invalid_accesses < 0)
            throw SchemaError("memcheck_report", "counts must be >= 0");
        r.memcheck = m;
    }
    r.workspace_id = j.value("workspace_id", "");
    return r;
}

MemcheckReport parse_memcheck_output(const std::string& text) {
    MemcheckReport report;
    static const std::regex lost_re(
        R"((definitely|indirectly) lost:\s*([0-9,]+)\s+bytes)");
    static const std::regex invalid_re(R"(Invalid (read|write) of size)");

    auto begin = std::sregex_iterator(text.begin(), text.end(), lost_re);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        std::string digits = (*it)[2].str();
        digits.erase(std::remove(digits.begin(), digits.end(), ','), digits.end());
        report.leaked_bytes += std::stoll(digits);
    }
    report.invalid_accesses = std::distance(
        std::sregex_iterator(text.begin(), text.end(), invalid_re), std::sregex_iterator());
    return report;
}

Engine::Engine(ToolchainProfile profile, std::string workdir_root, bool keep_workspaces)
    : profile_(std::move(profile)), root_(std::move(workdir_root)), keep_(keep_workspaces) {
    profile_.validate();
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw SandboxError("cannot create workdir root " + root_ + ": " + ec.message());
}

Engine::~Engine() {
    if (keep_) return;
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [id, ws] : workspaces_) {
        std::error_code ec;
        fs::remove_all(ws.dir, ec);
    }
}

std::string Engine::workspace_dir(const std::string& workspace_id) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = workspaces_.find(workspace_id);
    return it == workspaces_.end() ? std::string() : it->second.dir;
}

ToolResult Engine::compile(const CompileRequest& req) {
    if (req.files.empty()) throw SandboxError("no source files supplied");
    for (const auto& [name, content] : req.files) {
        if (!filename_is_safe(name)) throw SandboxError("unsafe filename: " + name);
        (void)content;
    }
    bool entry_found = false;
    for (const auto& [name, content] : req.files)
        if (name == req.entry_point) entry_found = true;
    if (!entry_found)
        throw SandboxError("entry_point names a nonexistent file: " + req.entry_point);

    const std::string id = util::make_uuid();
    const std::string dir = (fs::path(root_) / ("ws_" + id)).string();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw SandboxError("workspace creation failed: " + ec.message());

    for (const auto& [name, content] : req.files) {
        const fs::path target = fs::path(dir) / name;
        fs::create_directories(target.parent_path(), ec);
        std::ofstream out(target, std::ios::binary);
        if (!out) throw SandboxError("cannot write workspace file " + name);
        out << content;
    }

    std::vector<std::string> sources;
    for (const auto& [name, content] : req.files) {
        const std::string ext = fs::path(name).extension().string();
        if (std::find(profile_.source_extensions.begin(), profile_.source_extensions.end(), ext) !=
            profile_.source_extensions.end())
            sources.push_back(name);
    }

    ToolResult result;
    result.workspace_id = id;
    if (sources.empty()) {
        result.ok = false;
        result.exit_code = 1;
        result.stderr_text = "no compilable sources among submitted files (expected extensions: " +
                             util::join(profile_.source_extensions, ", ") + ")";
        std::lock_guard<std::mutex> lock(mu_);
        workspaces_[id] = {dir, ""};
        return result;
    }

    std::vector<std::string> extra;
    for (const auto& d : profile_.include_dirs) extra.push_back("-I" + d);
    for (const auto& d : profile_.lib_dirs) extra.push_back("-L" + d);
    for (const auto& l : profile_.libs) extra.push_back("-l" + l);
    for (const auto& dep : req.dependencies) extra.push_back(dep);

    const std::string binary = "app.bin";
    const auto argv = expand_template(profile_.compile_command_template,
                                      {{"{sources}", sources}, {"{extra_flags}", extra}},
                                      {{"{output}", binary}});

    proc::ProcessOptions opts;
    opts.argv = argv;
    opts.cwd = dir;
    opts.env = scrubbed_env(profile_, dir);
    opts.timeout_seconds = profile_.compile_timeout_seconds;
    const auto outcome = proc::run_process(opts);
    if (outcome.spawn_failed) throw SandboxError("compiler spawn failed: " + outcome.spawn_error);

    result.exit_code = outcome.exit_code;
    result.stdout_text = outcome.stdout_text;
    result.stderr_text = outcome.stderr_text;
    result.stdout_truncated = outcome.stdout_truncated;
    result.stderr_truncated = outcome.stderr_truncated;
    result.timed_out = outcome.timed_out;
    result.wall_time_seconds = outcome.wall_seconds;
    result.ok = outcome.exit_code == 0 && !outcome.timed_out;

    std::lock_guard<std::mutex> lock(mu_);
    workspaces_[id] = {dir, result.ok ? (fs::path(dir) / binary).string() : ""};
    return result;
}

ToolResult Engine::run(const std::string& workspace_id, const std::vector<std::string>& args,
                       int ranks, double timeout_seconds, bool memcheck) {
    Workspace ws;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = workspaces_.find(workspace_id);
        if (it == workspaces_.end()) throw SandboxError("unknown workspace: " + workspace_id);
        ws = it->second;
    }
    if (ws.binary.empty())
        throw SandboxError("no compiled binary in workspace " + workspace_id +
                           " (compile must succeed first)");
    if (ranks < 1) throw SandboxError("ranks must be >= 1");
    if (timeout_seconds <= 0) throw SandboxError("timeout_seconds must be > 0");

    ToolResult result;
    result.workspace_id = workspace_id;
    int effective_ranks = ranks;
    if (ranks > profile_.max_ranks) {
        effective_ranks = profile_.max_ranks;
        result.warnings.push_back("mpi ranks downgraded from " + std::to_string(ranks) + " to " +
                                  std::to_string(effective_ranks) + " (profile limit)");
    }

    const bool use_memcheck = memcheck && profile_.memcheck_available;
    const std::string& tmpl =
        use_memcheck ? profile_.memcheck_command_template : profile_.run_launcher_template;
    const auto argv = expand_template(tmpl, {{"{args}", args}},
                                      {{"{binary}", ws.binary},
                                       {"{ranks}", std::to_string(effective_ranks)}});

    proc::ProcessOptions opts;
    opts.argv = argv;
    opts.cwd = ws.dir;
    opts.env = scrubbed_env(profile_, ws.dir);
    opts.timeout_seconds = timeout_seconds;
    const auto outcome = proc::run_process(opts);
    if (outcome.spawn_failed) throw SandboxError("launcher spawn failed: " + outcome.spawn_error);

    result.exit_code = outcome.exit_code;
    result.stdout_text = outcome.stdout_text;
    result.stderr_text = outcome.stderr_text;
    result.stdout_truncated = outcome.stdout_truncated;
    result.stderr_truncated = outcome.stderr_truncated;
    result.timed_out = outcome.timed_out;
    result.wall_time_seconds = outcome.wall_seconds;
    result.ok = outcome.exit_code == 0 && !outcome.timed_out;
    if (use_memcheck)
        result.memcheck = parse_memcheck_output(outcome.stderr_text + outcome.stdout_text);
    return result;
}

void Engine::release(const std::string& workspace_id) {
    Workspace ws;
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = workspaces_.find(workspace_id);
        if (it == workspaces_.end()) return;
        ws = it->second;
        workspaces_.erase(it);
    }
    if (!keep_) {
        std::error_code ec;
        fs::remove_all(ws.dir, ec);
    }
}

}  // namespace gauntlet::sandbox
