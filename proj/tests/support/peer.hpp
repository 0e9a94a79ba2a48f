#pragma once

// Test-only counterpart of the remote estimator: answers the wire protocol
// with the reference dummy denoiser, optionally misbehaving.

#include <string>

#include "flexti2v/wire.hpp"

namespace flexti2v::testing {

enum class PeerFault {
    None,
    ErrorOnEstimate,     // reply Error("oom") to the first EstimateRequest
    BadMagic,            // corrupt magic on the first EstimateResponse
    WrongVersion,        // version 2 on the Hello reply
    TruncatedResponse,   // header promises more bytes than are sent, then close
    WrongDims,           // response tensor with one frame too few
    CloseAfterHello,     // hang up after the handshake
    WrongReplyType,      // answer EstimateRequest with Hello
};

PeerFault parse_fault(const std::string& name);

struct PeerStats {
    int hellos = 0;
    int requests = 0;
    bool saw_shutdown = false;
    std::string client_name;
};

/// Serves until Shutdown, EOF or an injected fault. Returns the exit status a
/// worker process would use: 0 after Shutdown, 1 otherwise.
int serve_peer(wire::ByteStream& stream, PeerFault fault, PeerStats* stats = nullptr);

}  // namespace flexti2v::testing
