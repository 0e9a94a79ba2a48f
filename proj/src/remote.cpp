#include "flexti2v/remote.hpp"

#include "flexti2v/error.hpp"
#include "flexti2v/transport.hpp"

namespace flexti2v {

namespace {

std::string type_name(wire::MessageType type) {
    switch (type) {
        case wire::MessageType::Hello: return "Hello";
        case wire::MessageType::EstimateRequest: return "EstimateRequest";
        case wire::MessageType::EstimateResponse: return "EstimateResponse";
        case wire::MessageType::Error: return "Error";
        case wire::MessageType::Shutdown: return "Shutdown";
    }
    return "unknown";
}

}  // namespace

RemoteEstimator::RemoteEstimator(std::unique_ptr<wire::ByteStream> stream, std::string client_name)
    : stream_(std::move(stream)) {
    require(stream_ != nullptr, ErrorKind::Config, "remote estimator needs a stream");
    wire::send_message(*stream_, wire::MessageType::Hello, wire::encode_hello(client_name));
    const wire::Message reply = expect(wire::MessageType::Hello);
    worker_name_ = wire::decode_hello(reply.payload);
    open_ = true;
}

RemoteEstimator::~RemoteEstimator() {
    try {
        shutdown();
    } catch (...) {
    }
}

wire::Message RemoteEstimator::expect(wire::MessageType type) {
    wire::Message message = wire::receive_message(*stream_);
    if (message.type == wire::MessageType::Error) {
        std::string text;
        try {
            text = wire::decode_error(message.payload);
        } catch (const Error&) {
            text = "<malformed error payload>";
        }
        fail(ErrorKind::Worker, "worker error: " + text);
    }
    if (message.type != type) {
        fail(ErrorKind::Protocol,
             "expected " + type_name(type) + ", got " + type_name(message.type));
    }
    return message;
}

LatentVideo RemoteEstimator::estimate(const LatentVideo& z, std::size_t t_train,
                                      const PromptSpec& prompt, bool conditional) {
    require(open_, ErrorKind::Transport, "remote estimator is shut down");
    wire::EstimateRequest request;
    request.t_train = static_cast<std::uint32_t>(t_train);
    request.conditional = conditional;
    request.prompt = conditional ? prompt.text : prompt.negative;
    request.z = z;
    wire::send_message(*stream_, wire::MessageType::EstimateRequest, wire::encode_request(request));

    const wire::Message reply = expect(wire::MessageType::EstimateResponse);
    LatentVideo eps = wire::decode_response(reply.payload);
    if (eps.frames() != z.frames() || eps.dims() != z.dims()) {
        fail(ErrorKind::Protocol, "response dims (" + std::to_string(eps.frames()) + "," +
                                      to_string(eps.dims()) + ") differ from request (" +
                                      std::to_string(z.frames()) + "," + to_string(z.dims()) +
                                      ")");
    }
    return eps;
}

void RemoteEstimator::shutdown() {
    if (!open_) return;
    open_ = false;
    wire::send_message(*stream_, wire::MessageType::Shutdown, {});
    if (auto* child = dynamic_cast<ChildProcessStream*>(stream_.get())) child->wait_exit();
}

std::unique_ptr<RemoteEstimator> connect_remote(const std::string& endpoint) {
    return std::make_unique<RemoteEstimator>(open_endpoint(endpoint));
}

}  // namespace flexti2v
