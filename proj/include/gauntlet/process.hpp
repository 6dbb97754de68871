#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace gauntlet::proc {

struct ProcessOptions {
    std::vector<std::string> argv;  // argv[0] = executable (PATH-resolved)
    std::string cwd;                // empty = inherit
    std::vector<std::pair<std::string, std::string>> env;  // full child environment
    double timeout_seconds = 0;     // <= 0 = no timeout
    std::size_t output_cap_bytes = 8u * 1024u * 1024u;  // per stream
};

struct ProcessOutcome {
    bool spawn_failed = false;      // exec/fork failure; not a program outcome
    std::string spawn_error;
    int exit_code = -1;             // 128+signal if killed by a signal
    bool timed_out = false;
    std::string stdout_text;
    std::string stderr_text;
    bool stdout_truncated = false;
    bool stderr_truncated = false;
    double wall_seconds = 0.0;
};

// Runs argv to completion (or timeout), capturing both streams.
// The child runs in its own process group; on timeout the whole group
// receives SIGKILL and the outcome carries timed_out=true.
ProcessOutcome run_process(const ProcessOptions& opts);

}  // namespace gauntlet::proc
