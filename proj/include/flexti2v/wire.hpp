#pragma once

// Engine <-> worker wire protocol, version 1. Every message is
//
//   "FTIV" | version u16 | msg_type u8 | payload_len u64 | payload
//
// with all integers little-endian and tensors as f32 LE, row-major.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

#include "flexti2v/fileio.hpp"
#include "flexti2v/tensor.hpp"

namespace flexti2v::wire {

enum class MessageType : std::uint8_t {
    Hello = 1,
    EstimateRequest = 2,
    EstimateResponse = 3,
    Error = 4,
    Shutdown = 5,
};

inline constexpr std::uint16_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 15;
inline constexpr std::uint64_t kMaxPayload = std::uint64_t{1} << 32;

struct Header {
    MessageType type;
    std::uint64_t payload_len;
};

struct Message {
    MessageType type;
    Bytes payload;
};

/// Validates magic, version, type and the payload cap (ErrorKind::Protocol).
Header parse_header(std::span<const std::uint8_t, kHeaderSize> bytes);
Bytes encode_message(MessageType type, std::span<const std::uint8_t> payload);

// Payload codecs. Decoders throw ErrorKind::Protocol on malformed input.

Bytes encode_hello(const std::string& name);
std::string decode_hello(std::span<const std::uint8_t> payload);

Bytes encode_error(const std::string& message);
std::string decode_error(std::span<const std::uint8_t> payload);

struct EstimateRequest {
    std::uint32_t t_train = 0;
    bool conditional = false;
    std::string prompt;
    LatentVideo z;
};

Bytes encode_request(const EstimateRequest& request);
EstimateRequest decode_request(std::span<const std::uint8_t> payload);

/// Tensor section: ndim u8 = 4 | M, C, H, W u32 | values.
Bytes encode_response(const LatentVideo& eps);
LatentVideo decode_response(std::span<const std::uint8_t> payload);

/// Blocking byte transport. Failures throw ErrorKind::Transport.
class ByteStream {
public:
    virtual ~ByteStream() = default;
    virtual void write_all(std::span<const std::uint8_t> bytes) = 0;
    virtual void read_exact(std::span<std::uint8_t> bytes) = 0;
};

void send_message(ByteStream& stream, MessageType type, std::span<const std::uint8_t> payload);
Message receive_message(ByteStream& stream);

}  // namespace flexti2v::wire
