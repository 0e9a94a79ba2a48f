#include "flexti2v/codec.hpp"

#include <cmath>
#include <string>

#include "flexti2v/error.hpp"

namespace flexti2v {

namespace {

constexpr std::size_t kRgb = 3;

bool is_power_of_two(float value) {
    if (!std::isfinite(value) || value == 0.0f) return false;
    int exponent = 0;
    return std::fabs(std::frexp(value, &exponent)) == 0.5f;
}

float scale_at(const Codec& codec, std::size_t c) {
    return codec.scale.empty() ? 1.0f : codec.scale[c];
}

float offset_at(const Codec& codec, std::size_t c) {
    return codec.offset.empty() ? 0.0f : codec.offset[c];
}

}  // namespace

Codec Codec::patchify(std::size_t factor, std::vector<float> scale, std::vector<float> offset) {
    Codec codec;
    codec.kind = CodecKind::Patchify;
    codec.patch = factor;
    codec.scale = std::move(scale);
    codec.offset = std::move(offset);
    codec.validate();
    return codec;
}

void Codec::validate() const {
    if (kind == CodecKind::Identity) {
        require(scale.empty() && offset.empty(), ErrorKind::Config,
                "identity codec takes no affine parameters");
        return;
    }
    require(patch >= 1, ErrorKind::Config, "patchify factor must be >= 1");
    const std::size_t channels = kRgb * patch * patch;
    require(scale.empty() || scale.size() == channels, ErrorKind::Config,
            "codec scale needs " + std::to_string(channels) + " entries");
    require(offset.empty() || offset.size() == channels, ErrorKind::Config,
            "codec offset needs " + std::to_string(channels) + " entries");
    for (float s : scale) {
        require(is_power_of_two(s), ErrorKind::Config, "codec scale must be a power of two");
    }
    for (float o : offset) {
        require(std::isfinite(o), ErrorKind::Config, "codec offset must be finite");
    }
}

Dims Codec::latent_dims(std::size_t width, std::size_t height) const {
    if (kind == CodecKind::Identity) return {kRgb, height, width};
    if (width % patch != 0 || height % patch != 0) {
        fail(ErrorKind::Dimension, "image " + std::to_string(width) + "x" +
                                       std::to_string(height) +
                                       " not divisible by patch factor " + std::to_string(patch));
    }
    return {kRgb * patch * patch, height / patch, width / patch};
}

bool Codec::can_decode(const Dims& dims) const noexcept {
    if (kind == CodecKind::Identity) return dims.channels == kRgb;
    return dims.channels == kRgb * patch * patch;
}

LatentFrame encode(const Raster& image, const Codec& codec) {
    codec.validate();
    require(image.data.size() == kRgb * image.width * image.height, ErrorKind::Dimension,
            "raster buffer does not match its size");
    const Dims dims = codec.latent_dims(image.width, image.height);
    if (codec.kind == CodecKind::Identity) return LatentFrame(dims, image.data);

    const std::size_t f = codec.patch;
    LatentFrame latent(dims);
    for (std::size_t c = 0; c < kRgb; ++c) {
        for (std::size_t di = 0; di < f; ++di) {
            for (std::size_t dj = 0; dj < f; ++dj) {
                const std::size_t channel = (c * f + di) * f + dj;
                const float s = scale_at(codec, channel);
                const float o = offset_at(codec, channel);
                for (std::size_t i = 0; i < dims.height; ++i) {
                    for (std::size_t j = 0; j < dims.width; ++j) {
                        latent.at(channel, i, j) = image.at(c, i * f + di, j * f + dj) * s + o;
                    }
                }
            }
        }
    }
    return latent;
}

Raster decode(const LatentFrame& latent, const Codec& codec) {
    codec.validate();
    const Dims& dims = latent.dims();
    if (!codec.can_decode(dims)) {
        fail(ErrorKind::Dimension, "latent dims " + to_string(dims) + " cannot be decoded by this codec");
    }
    if (codec.kind == CodecKind::Identity) {
        Raster image(dims.width, dims.height);
        const auto values = latent.values();
        image.data.assign(values.begin(), values.end());
        return image;
    }

    const std::size_t f = codec.patch;
    Raster image(dims.width * f, dims.height * f);
    for (std::size_t c = 0; c < kRgb; ++c) {
        for (std::size_t di = 0; di < f; ++di) {
            for (std::size_t dj = 0; dj < f; ++dj) {
                const std::size_t channel = (c * f + di) * f + dj;
                const float s = scale_at(codec, channel);
                const float o = offset_at(codec, channel);
                for (std::size_t i = 0; i < dims.height; ++i) {
                    for (std::size_t j = 0; j < dims.width; ++j) {
                        image.at(c, i * f + di, j * f + dj) = (latent.at(channel, i, j) - o) / s;
                    }
                }
            }
        }
    }
    return image;
}

}  // namespace flexti2v
