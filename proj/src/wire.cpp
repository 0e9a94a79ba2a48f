#include "flexti2v/wire.hpp"

#include <algorithm>
#include <array>

#include "flexti2v/error.hpp"

namespace flexti2v::wire {

namespace {

constexpr std::uint8_t kMagic[4] = {'F', 'T', 'I', 'V'};
constexpr std::size_t kTensorHeader = 1 + 4 * 4;

[[noreturn]] void protocol_fail(const std::string& message) {
    fail(ErrorKind::Protocol, message);
}

class Reader {
public:
    Reader(std::span<const std::uint8_t> bytes, const char* what) : bytes_(bytes), what_(what) {}

    const std::uint8_t* take(std::size_t n) {
        if (bytes_.size() - pos_ < n) {
            protocol_fail(std::string(what_) + " payload truncated: need " +
                          std::to_string(pos_ + n) + " bytes, have " +
                          std::to_string(bytes_.size()));
        }
        const std::uint8_t* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::uint8_t u8() { return *take(1); }
    std::uint32_t u32() { return le::get_u32(take(4)); }

    std::string string_u32() {
        const std::uint32_t len = u32();
        const auto* p = take(len);
        return std::string(reinterpret_cast<const char*>(p), len);
    }

    LatentVideo tensor() {
        const std::uint8_t ndim = u8();
        if (ndim != 4) protocol_fail("ndim must be 4");
        std::uint64_t dims[4];
        for (auto& d : dims) d = u32();
        std::uint64_t elements = 1;
        for (auto d : dims) {
            if (d == 0) protocol_fail(std::string(what_) + " tensor has a zero dimension");
            if (elements > (kMaxPayload / 4) / d) protocol_fail("tensor dims overflow");
            elements *= d;
        }
        const std::uint64_t expected = elements * 4;
        const std::uint64_t actual = bytes_.size() - pos_;
        if (actual != expected) {
            protocol_fail(std::string(what_) + " payload size mismatch: expected " +
                          std::to_string(expected) + " tensor bytes, got " +
                          std::to_string(actual));
        }
        std::vector<float> values(elements);
        le::get_f32s(take(expected), values);
        return LatentVideo(dims[0], Dims{dims[1], dims[2], dims[3]}, std::move(values));
    }

    void finish() const {
        if (pos_ != bytes_.size()) {
            protocol_fail(std::string(what_) + " payload has " +
                          std::to_string(bytes_.size() - pos_) + " trailing bytes");
        }
    }

private:
    std::span<const std::uint8_t> bytes_;
    const char* what_;
    std::size_t pos_ = 0;
};

void put_string(Bytes& out, const std::string& s) {
    le::put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.insert(out.end(), s.begin(), s.end());
}

void put_tensor(Bytes& out, const LatentVideo& video) {
    out.reserve(out.size() + kTensorHeader + video.size() * 4);
    out.push_back(4);
    le::put_u32(out, static_cast<std::uint32_t>(video.frames()));
    le::put_u32(out, static_cast<std::uint32_t>(video.dims().channels));
    le::put_u32(out, static_cast<std::uint32_t>(video.dims().height));
    le::put_u32(out, static_cast<std::uint32_t>(video.dims().width));
    le::put_f32s(out, video.values());
}

}  // namespace

Header parse_header(std::span<const std::uint8_t, kHeaderSize> bytes) {
    if (!std::equal(bytes.begin(), bytes.begin() + 4, kMagic)) protocol_fail("bad magic");
    const std::uint16_t version = le::get_u16(bytes.data() + 4);
    if (version != kVersion) {
        protocol_fail("protocol version mismatch: peer " + std::to_string(version) + ", ours " +
                      std::to_string(kVersion));
    }
    const std::uint8_t type = bytes[6];
    if (type < 1 || type > 5) protocol_fail("unknown message type " + std::to_string(type));
    const std::uint64_t len = le::get_u64(bytes.data() + 7);
    if (len > kMaxPayload) protocol_fail("payload length " + std::to_string(len) + " too large");
    return {static_cast<MessageType>(type), len};
}

Bytes encode_message(MessageType type, std::span<const std::uint8_t> payload) {
    Bytes out(kMagic, kMagic + 4);
    out.reserve(kHeaderSize + payload.size());
    le::put_u16(out, kVersion);
    out.push_back(static_cast<std::uint8_t>(type));
    le::put_u64(out, payload.size());
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

Bytes encode_hello(const std::string& name) {
    Bytes out;
    put_string(out, name);
    return out;
}

std::string decode_hello(std::span<const std::uint8_t> payload) {
    Reader reader(payload, "Hello");
    std::string name = reader.string_u32();
    reader.finish();
    return name;
}

Bytes encode_error(const std::string& message) {
    Bytes out;
    put_string(out, message);
    return out;
}

std::string decode_error(std::span<const std::uint8_t> payload) {
    Reader reader(payload, "Error");
    std::string message = reader.string_u32();
    reader.finish();
    return message;
}

Bytes encode_request(const EstimateRequest& request) {
    Bytes out;
    le::put_u32(out, request.t_train);
    out.push_back(request.conditional ? 1 : 0);
    put_string(out, request.prompt);
    put_tensor(out, request.z);
    return out;
}

EstimateRequest decode_request(std::span<const std::uint8_t> payload) {
    Reader reader(payload, "EstimateRequest");
    EstimateRequest request;
    request.t_train = reader.u32();
    const std::uint8_t flag = reader.u8();
    if (flag > 1) protocol_fail("conditional flag must be 0 or 1");
    request.conditional = flag == 1;
    request.prompt = reader.string_u32();
    request.z = reader.tensor();
    return request;
}

Bytes encode_response(const LatentVideo& eps) {
    Bytes out;
    put_tensor(out, eps);
    return out;
}

LatentVideo decode_response(std::span<const std::uint8_t> payload) {
    Reader reader(payload, "EstimateResponse");
    return reader.tensor();
}

void send_message(ByteStream& stream, MessageType type, std::span<const std::uint8_t> payload) {
    stream.write_all(encode_message(type, payload));
}

Message receive_message(ByteStream& stream) {
    std::array<std::uint8_t, kHeaderSize> header{};
    stream.read_exact(header);
    const Header parsed = parse_header(header);
    Message message{parsed.type, Bytes(parsed.payload_len)};
    if (!message.payload.empty()) stream.read_exact(message.payload);
    return message;
}

}  // namespace flexti2v::wire
