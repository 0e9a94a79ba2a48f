#pragma once

#include <memory>
#include <string>

#include "flexti2v/estimator.hpp"
#include "flexti2v/wire.hpp"

namespace flexti2v {

/// Noise estimator backed by an out-of-process worker speaking the wire
/// protocol. The constructor performs the Hello handshake; shutdown() (or the
/// destructor) sends Shutdown.
///
/// Errors: ErrorKind::Transport for broken streams, ErrorKind::Protocol for
/// malformed or unexpected replies, ErrorKind::Worker for Error replies.
class RemoteEstimator final : public NoiseEstimator {
public:
    explicit RemoteEstimator(std::unique_ptr<wire::ByteStream> stream,
                             std::string client_name = "flexti2v");
    ~RemoteEstimator() override;

    RemoteEstimator(const RemoteEstimator&) = delete;
    RemoteEstimator& operator=(const RemoteEstimator&) = delete;

    LatentVideo estimate(const LatentVideo& z, std::size_t t_train, const PromptSpec& prompt,
                         bool conditional) override;

    const std::string& worker_name() const noexcept { return worker_name_; }

    void shutdown();

private:
    wire::Message expect(wire::MessageType type);

    std::unique_ptr<wire::ByteStream> stream_;
    std::string worker_name_;
    bool open_ = false;
};

/// Opens an endpoint (see open_endpoint) and completes the handshake.
std::unique_ptr<RemoteEstimator> connect_remote(const std::string& endpoint);

}  // namespace flexti2v
