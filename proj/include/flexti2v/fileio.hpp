#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "flexti2v/codec.hpp"
#include "flexti2v/tensor.hpp"

namespace flexti2v {

using Bytes = std::vector<std::uint8_t>;

// Binary P6 PPM, maxval 255. Channel values map to [-1, 1] via v/127.5 - 1;
// writing inverts that with round-half-away-from-zero and clamps to [0, 255].
// The writer always emits the canonical header "P6\n<w> <h>\n255\n".

Raster parse_ppm(std::span<const std::uint8_t> bytes);
Bytes serialize_ppm(const Raster& image);
Raster read_ppm(const std::filesystem::path& path);
void write_ppm(const Raster& image, const std::filesystem::path& path);

// LTN latent container:
//   "LTN1" | version u16 = 1 | M u32 | C u32 | H u32 | W u32 | M*C*H*W f32
// all little-endian, frame-major then row-major.

inline constexpr std::uint16_t kLtnVersion = 1;
inline constexpr std::size_t kLtnHeaderSize = 22;

LatentVideo parse_ltn(std::span<const std::uint8_t> bytes);
Bytes serialize_ltn(const LatentVideo& video);
LatentVideo read_ltn(const std::filesystem::path& path);
void write_ltn(const LatentVideo& video, const std::filesystem::path& path);

Bytes read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// Little-endian helpers shared with the wire codec.
namespace le {

void put_u16(Bytes& out, std::uint16_t v);
void put_u32(Bytes& out, std::uint32_t v);
void put_u64(Bytes& out, std::uint64_t v);
void put_f32s(Bytes& out, std::span<const float> values);

std::uint16_t get_u16(const std::uint8_t* p) noexcept;
std::uint32_t get_u32(const std::uint8_t* p) noexcept;
std::uint64_t get_u64(const std::uint8_t* p) noexcept;
void get_f32s(const std::uint8_t* p, std::span<float> out) noexcept;

}  // namespace le

}  // namespace flexti2v
