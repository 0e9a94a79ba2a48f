#pragma once

#include <memory>
#include <string>
#include <sys/types.h>

#include "flexti2v/wire.hpp"

namespace flexti2v {

/// Byte stream over a pair of POSIX file descriptors (pipes or a socket).
class FdStream : public wire::ByteStream {
public:
    /// Takes ownership of both descriptors; they may be the same socket.
    FdStream(int read_fd, int write_fd);
    ~FdStream() override;

    FdStream(const FdStream&) = delete;
    FdStream& operator=(const FdStream&) = delete;

    void write_all(std::span<const std::uint8_t> bytes) override;
    void read_exact(std::span<std::uint8_t> bytes) override;

    /// Closes the write side so the peer observes EOF.
    void close_write();

private:
    int read_fd_;
    int write_fd_;
};

/// Child process started with `/bin/sh -c command`, talking over its
/// stdin/stdout. The destructor closes the pipes and reaps the child.
class ChildProcessStream : public wire::ByteStream {
public:
    explicit ChildProcessStream(const std::string& command);
    ~ChildProcessStream() override;

    ChildProcessStream(const ChildProcessStream&) = delete;
    ChildProcessStream& operator=(const ChildProcessStream&) = delete;

    void write_all(std::span<const std::uint8_t> bytes) override;
    void read_exact(std::span<std::uint8_t> bytes) override;

    /// Closes stdin of the child and waits for it; returns its exit status
    /// (128 + signal when killed). Idempotent.
    int wait_exit();

private:
    std::unique_ptr<FdStream> pipes_;
    pid_t pid_ = -1;
    int exit_status_ = -1;
};

std::unique_ptr<wire::ByteStream> connect_tcp(const std::string& host, const std::string& port);

/// "stdio:<shell command>" or "tcp:<host>:<port>". Throws ErrorKind::Config
/// for an unknown scheme and ErrorKind::Transport when the connection fails.
std::unique_ptr<wire::ByteStream> open_endpoint(const std::string& endpoint);

}  // namespace flexti2v
