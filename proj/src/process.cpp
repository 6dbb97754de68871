#include "gauntlet/process.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace gauntlet::proc {

namespace {

// Reads from fd into buf up to cap; keeps draining past the cap so the
// child never blocks on a full pipe. Returns false once fd hits EOF.
bool drain_fd(int fd, std::string& buf, std::size_t cap, bool& truncated) {
    char chunk[16384];
    for (;;) {
        ssize_t n = ::read(fd, chunk, sizeof(chunk));
        if (n > 0) {
            if (buf.size() < cap) {
                const std::size_t room = cap - buf.size();
                buf.append(chunk, std::min(static_cast<std::size_t>(n), room));
                if (static_cast<std::size_t>(n) > room) truncated = true;
            } else {
                truncated = true;
            }
            if (static_cast<std::size_t>(n) < sizeof(chunk)) return true;
            continue;
        }
        if (n == 0) return false;  // EOF
        if (errno == EAGAIN || errno == EWOULDBLOCK) return true;
        if (errno == EINTR) continue;
        return false;
    }
}

void set_nonblocking(int fd) {
    int flags = ::fcntl(fd, F_GETFL, 0);
    ::fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

}  // namespace

ProcessOutcome run_process(const ProcessOptions& opts) {
    ProcessOutcome out;
    if (opts.argv.empty()) {
        out.spawn_failed = true;
        out.spawn_error = "empty argv";
        return out;
    }

    int out_pipe[2], err_pipe[2];
    if (::pipe(out_pipe) != 0 || ::pipe(err_pipe) != 0) {
        out.spawn_failed = true;
        out.spawn_error = std::string("pipe: ") + std::strerror(errno);
        return out;
    }

    std::vector<std::string> env_strings;
    env_strings.reserve(opts.env.size());
    for (const auto& [k, v] : opts.env) env_strings.push_back(k + "=" + v);
    std::vector<char*> envp;
    for (auto& s : env_strings) envp.push_back(s.data());
    envp.push_back(nullptr);

    std::vector<char*> argv;
    std::vector<std::string> argv_strings = opts.argv;
    for (auto& s : argv_strings) argv.push_back(s.data());
    argv.push_back(nullptr);

    const auto start = std::chrono::steady_clock::now();
    const pid_t pid = ::fork();
    if (pid < 0) {
        out.spawn_failed = true;
        out.spawn_error = std::string("fork: ") + std::strerror(errno);
        ::close(out_pipe[0]); ::close(out_pipe[1]);
        ::close(err_pipe[0]); ::close(err_pipe[1]);
        return out;
    }

    if (pid == 0) {
        ::setpgid(0, 0);
        if (!opts.cwd.empty() && ::chdir(opts.cwd.c_str()) != 0) _exit(127);
        ::dup2(out_pipe[1], STDOUT_FILENO);
        ::dup2(err_pipe[1], STDERR_FILENO);
        ::close(out_pipe[0]); ::close(out_pipe[1]);
        ::close(err_pipe[0]); ::close(err_pipe[1]);
        ::execvpe(argv[0], argv.data(), envp.data());
        // exec failed; report on stderr so the parent captures it
        std::fprintf(stderr, "exec failed: %s: %s\n", argv[0], std::strerror(errno));
        _exit(127);
    }

    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    set_nonblocking(out_pipe[0]);
    set_nonblocking(err_pipe[0]);

    bool out_open = true, err_open = true;
    bool killed = false;
    const bool has_timeout = opts.timeout_seconds > 0;
    const auto deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                      std::chrono::duration<double>(opts.timeout_seconds));

    while (out_open || err_open) {
        struct pollfd fds[2];
        nfds_t nfds = 0;
        if (out_open) fds[nfds++] = {out_pipe[0], POLLIN, 0};
        if (err_open) fds[nfds++] = {err_pipe[0], POLLIN, 0};

        int wait_ms = 200;
        if (has_timeout && !killed) {
            const auto remain = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            wait_ms = std::max(0, std::min<int>(200, static_cast<int>(remain.count())));
        }
        ::poll(fds, nfds, wait_ms);

        nfds_t i = 0;
        if (out_open) {
            if (fds[i].revents & (POLLIN | POLLHUP)) {
                if (!drain_fd(out_pipe[0], out.stdout_text, opts.output_cap_bytes,
                              out.stdout_truncated))
                    out_open = false;
            }
            ++i;
        }
        if (err_open) {
            if (fds[i].revents & (POLLIN | POLLHUP)) {
                if (!drain_fd(err_pipe[0], out.stderr_text, opts.output_cap_bytes,
                              out.stderr_truncated))
                    err_open = false;
            }
        }

        if (has_timeout && !killed && std::chrono::steady_clock::now() >= deadline) {
            ::kill(-pid, SIGKILL);
            ::kill(pid, SIGKILL);
            out.timed_out = true;
            killed = true;
        }
    }
    ::close(out_pipe[0]);
    ::close(err_pipe[0]);

    int status = 0;
    for (;;) {
        if (::waitpid(pid, &status, 0) >= 0) break;
        if (errno != EINTR) break;
    }
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (WIFEXITED(status)) {
        out.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        out.exit_code = 128 + WTERMSIG(status);
    }
    if (out.exit_code == 127 && out.stderr_text.find("exec failed:") == 0) {
        out.spawn_failed = true;
        out.spawn_error = out.stderr_text;
    }
    return out;
}

}  // namespace gauntlet::proc
