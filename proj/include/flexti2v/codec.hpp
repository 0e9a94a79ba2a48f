#pragma once

#include <cstddef>
#include <vector>

#include "flexti2v/tensor.hpp"

namespace flexti2v {

/// Planar RGB image, 3 x height x width, values nominally in [-1, 1].
struct Raster {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<float> data;

    Raster() = default;
    Raster(std::size_t w, std::size_t h, float fill = 0.0f)
        : width(w), height(h), data(3 * w * h, fill) {}

    float& at(std::size_t c, std::size_t i, std::size_t j) noexcept {
        return data[(c * height + i) * width + j];
    }
    float at(std::size_t c, std::size_t i, std::size_t j) const noexcept {
        return data[(c * height + i) * width + j];
    }

    friend bool operator==(const Raster&, const Raster&) = default;
};

enum class CodecKind { Identity, Patchify };

/// Invertible stand-in for the latent encoder/decoder pair.
///
/// Identity maps the raster to a 3 x H x W latent unchanged. Patchify is a
/// space-to-depth rearrangement by `patch` (channel c*f*f + di*f + dj holds
/// pixel (c, i*f + di, j*f + dj)) followed by latent = value*scale[c] + offset[c].
/// Scales must be powers of two so the affine step is exactly invertible when
/// offsets are zero.
struct Codec {
    CodecKind kind = CodecKind::Identity;
    std::size_t patch = 1;
    std::vector<float> scale;   // empty = all ones
    std::vector<float> offset;  // empty = all zeros

    static Codec identity() { return {}; }
    static Codec patchify(std::size_t factor, std::vector<float> scale = {},
                          std::vector<float> offset = {});

    /// Latent dims produced for an image of the given size.
    Dims latent_dims(std::size_t width, std::size_t height) const;

    /// Whether decode() accepts latents of these dims.
    bool can_decode(const Dims& dims) const noexcept;

    /// Throws ErrorKind::Config on a bad factor, scale or affine length.
    void validate() const;
};

LatentFrame encode(const Raster& image, const Codec& codec);
Raster decode(const LatentFrame& latent, const Codec& codec);

}  // namespace flexti2v
