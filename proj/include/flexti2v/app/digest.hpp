#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace flexti2v::app {

/// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> bytes);

}  // namespace flexti2v::app
