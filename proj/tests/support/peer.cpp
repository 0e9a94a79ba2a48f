#include "peer.hpp"

#include "flexti2v/error.hpp"
#include "flexti2v/estimator.hpp"

namespace flexti2v::testing {

PeerFault parse_fault(const std::string& name) {
    if (name == "none") return PeerFault::None;
    if (name == "error") return PeerFault::ErrorOnEstimate;
    if (name == "bad-magic") return PeerFault::BadMagic;
    if (name == "wrong-version") return PeerFault::WrongVersion;
    if (name == "truncated") return PeerFault::TruncatedResponse;
    if (name == "wrong-dims") return PeerFault::WrongDims;
    if (name == "close-after-hello") return PeerFault::CloseAfterHello;
    if (name == "wrong-type") return PeerFault::WrongReplyType;
    fail(ErrorKind::Config, "unknown peer fault " + name);
}

int serve_peer(wire::ByteStream& stream, PeerFault fault, PeerStats* stats) {
    PeerStats local;
    PeerStats& s = stats ? *stats : local;
    try {
        for (;;) {
            const wire::Message message = wire::receive_message(stream);
            switch (message.type) {
                case wire::MessageType::Hello: {
                    ++s.hellos;
                    s.client_name = wire::decode_hello(message.payload);
                    Bytes reply = wire::encode_message(wire::MessageType::Hello,
                                                       wire::encode_hello("test-peer"));
                    if (fault == PeerFault::WrongVersion) reply[4] = 2;
                    stream.write_all(reply);
                    if (fault == PeerFault::CloseAfterHello) return 1;
                    break;
                }
                case wire::MessageType::EstimateRequest: {
                    ++s.requests;
                    const wire::EstimateRequest request = wire::decode_request(message.payload);
                    if (fault == PeerFault::ErrorOnEstimate) {
                        wire::send_message(stream, wire::MessageType::Error,
                                           wire::encode_error("oom"));
                        return 1;
                    }
                    if (fault == PeerFault::WrongReplyType) {
                        wire::send_message(stream, wire::MessageType::Hello,
                                           wire::encode_hello("confused"));
                        return 1;
                    }
                    LatentVideo eps =
                        dummy_denoise(request.z, request.t_train, request.conditional);
                    if (fault == PeerFault::WrongDims && eps.frames() > 1) {
                        LatentVideo shorter(eps.frames() - 1, eps.dims());
                        for (std::size_t m = 0; m + 1 < eps.frames(); ++m) {
                            shorter.set_frame(m, eps.frame_copy(m));
                        }
                        eps = std::move(shorter);
                    }
                    Bytes reply = wire::encode_message(wire::MessageType::EstimateResponse,
                                                       wire::encode_response(eps));
                    if (fault == PeerFault::BadMagic) reply[0] = 'X';
                    if (fault == PeerFault::TruncatedResponse) {
                        reply.resize(reply.size() / 2);
                        stream.write_all(reply);
                        return 1;
                    }
                    stream.write_all(reply);
                    if (fault == PeerFault::BadMagic) return 1;
                    break;
                }
                case wire::MessageType::Shutdown:
                    s.saw_shutdown = true;
                    return 0;
                default:
                    wire::send_message(stream, wire::MessageType::Error,
                                       wire::encode_error("unexpected message"));
                    return 1;
            }
        }
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Protocol) {
            try {
                wire::send_message(stream, wire::MessageType::Error, wire::encode_error(e.what()));
            } catch (const Error&) {
            }
        }
        return 1;
    }
}

}  // namespace flexti2v::testing
