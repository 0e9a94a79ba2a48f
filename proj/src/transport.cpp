#include "flexti2v/transport.hpp"

#include <cerrno>
#include <csignal>
#include <cstring>
#include <fcntl.h>
#include <netdb.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include "flexti2v/error.hpp"

extern char** environ;

namespace flexti2v {

namespace {

[[noreturn]] void transport_fail(const std::string& what) {
    fail(ErrorKind::Transport, what);
}

std::string errno_text(int err) {
    return std::strerror(err);
}

void ignore_sigpipe() {
    static const bool once = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)once;
}

}  // namespace

FdStream::FdStream(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {
    ignore_sigpipe();
}

FdStream::~FdStream() {
    if (read_fd_ >= 0) ::close(read_fd_);
    if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
}

void FdStream::write_all(std::span<const std::uint8_t> bytes) {
    if (write_fd_ < 0) transport_fail("write on closed stream");
    std::size_t done = 0;
    while (done < bytes.size()) {
        const ssize_t n = ::write(write_fd_, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            transport_fail("write failed: " + errno_text(errno));
        }
        done += static_cast<std::size_t>(n);
    }
}

void FdStream::read_exact(std::span<std::uint8_t> bytes) {
    std::size_t done = 0;
    while (done < bytes.size()) {
        const ssize_t n = ::read(read_fd_, bytes.data() + done, bytes.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            transport_fail("read failed: " + errno_text(errno));
        }
        if (n == 0) {
            transport_fail("connection closed after " + std::to_string(done) + " of " +
                           std::to_string(bytes.size()) + " bytes");
        }
        done += static_cast<std::size_t>(n);
    }
}

void FdStream::close_write() {
    if (write_fd_ < 0) return;
    if (write_fd_ == read_fd_) {
        ::shutdown(write_fd_, SHUT_WR);
    } else {
        ::close(write_fd_);
    }
    write_fd_ = -1;
}

ChildProcessStream::ChildProcessStream(const std::string& command) {
    int to_child[2];
    int from_child[2];
    if (::pipe2(to_child, O_CLOEXEC) != 0) transport_fail("pipe failed: " + errno_text(errno));
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
        ::close(to_child[0]);
        ::close(to_child[1]);
        transport_fail("pipe failed: " + errno_text(errno));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, to_child[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, from_child[1], STDOUT_FILENO);

    const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
    const int rc = ::posix_spawn(&pid_, "/bin/sh", &actions, nullptr,
                                 const_cast<char* const*>(argv), environ);
    posix_spawn_file_actions_destroy(&actions);
    ::close(to_child[0]);
    ::close(from_child[1]);
    if (rc != 0) {
        ::close(to_child[1]);
        ::close(from_child[0]);
        pid_ = -1;
        transport_fail("cannot spawn worker '" + command + "': " + errno_text(rc));
    }
    pipes_ = std::make_unique<FdStream>(from_child[0], to_child[1]);
}

ChildProcessStream::~ChildProcessStream() {
    try {
        wait_exit();
    } catch (...) {
    }
}

void ChildProcessStream::write_all(std::span<const std::uint8_t> bytes) {
    pipes_->write_all(bytes);
}

void ChildProcessStream::read_exact(std::span<std::uint8_t> bytes) {
    pipes_->read_exact(bytes);
}

int ChildProcessStream::wait_exit() {
    if (pid_ < 0) return exit_status_;
    pipes_->close_write();
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0) {
        if (errno != EINTR) {
            pid_ = -1;
            return exit_status_;
        }
    }
    pid_ = -1;
    pipes_.reset();
    if (WIFEXITED(status)) {
        exit_status_ = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        exit_status_ = 128 + WTERMSIG(status);
    }
    return exit_status_;
}

std::unique_ptr<wire::ByteStream> connect_tcp(const std::string& host, const std::string& port) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    const int rc = ::getaddrinfo(host.c_str(), port.c_str(), &hints, &found);
    if (rc != 0) transport_fail("cannot resolve " + host + ":" + port + ": " + gai_strerror(rc));

    int last_error = 0;
    for (addrinfo* ai = found; ai != nullptr; ai = ai->ai_next) {
        const int fd = ::socket(ai->ai_family, ai->ai_socktype | SOCK_CLOEXEC, ai->ai_protocol);
        if (fd < 0) {
            last_error = errno;
            continue;
        }
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
            ::freeaddrinfo(found);
            return std::make_unique<FdStream>(fd, fd);
        }
        last_error = errno;
        ::close(fd);
    }
    ::freeaddrinfo(found);
    transport_fail("cannot connect to " + host + ":" + port + ": " + errno_text(last_error));
}

std::unique_ptr<wire::ByteStream> open_endpoint(const std::string& endpoint) {
    if (endpoint.starts_with("stdio:")) {
        const std::string command = endpoint.substr(6);
        require(!command.empty(), ErrorKind::Config, "stdio endpoint needs a command");
        return std::make_unique<ChildProcessStream>(command);
    }
    if (endpoint.starts_with("tcp:")) {
        const std::string rest = endpoint.substr(4);
        const auto colon = rest.rfind(':');
        require(colon != std::string::npos && colon > 0 && colon + 1 < rest.size(),
                ErrorKind::Config, "tcp endpoint must be tcp:<host>:<port>");
        return connect_tcp(rest.substr(0, colon), rest.substr(colon + 1));
    }
    fail(ErrorKind::Config, "unknown worker endpoint '" + endpoint + "' (expected stdio: or tcp:)");
}

}  // namespace flexti2v
