#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace flexti2v {

/// Per-frame latent shape (channels, height, width).
struct Dims {
    std::size_t channels = 0;
    std::size_t height = 0;
    std::size_t width = 0;

    std::size_t plane() const noexcept { return height * width; }
    std::size_t count() const noexcept { return channels * height * width; }

    friend bool operator==(const Dims&, const Dims&) = default;
};

std::string to_string(const Dims& dims);

/// Throws ErrorKind::Dimension naming `what` when the shapes differ.
void require_same_dims(const Dims& a, const Dims& b, const char* what);

/// C x H x W latent, row-major with channel outermost.
class LatentFrame {
public:
    LatentFrame() = default;
    explicit LatentFrame(Dims dims, float fill = 0.0f);
    LatentFrame(Dims dims, std::vector<float> data);

    const Dims& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<float> values() noexcept { return data_; }
    std::span<const float> values() const noexcept { return data_; }

    float& at(std::size_t c, std::size_t i, std::size_t j) noexcept {
        return data_[(c * dims_.height + i) * dims_.width + j];
    }
    float at(std::size_t c, std::size_t i, std::size_t j) const noexcept {
        return data_[(c * dims_.height + i) * dims_.width + j];
    }

    friend bool operator==(const LatentFrame&, const LatentFrame&) = default;

private:
    Dims dims_{};
    std::vector<float> data_;
};

/// M frames of identical dims stored contiguously, frame-major.
class LatentVideo {
public:
    LatentVideo() = default;
    LatentVideo(std::size_t frames, Dims dims, float fill = 0.0f);
    LatentVideo(std::size_t frames, Dims dims, std::vector<float> data);

    std::size_t frames() const noexcept { return frames_; }
    const Dims& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<float> values() noexcept { return data_; }
    std::span<const float> values() const noexcept { return data_; }

    std::span<float> frame(std::size_t m);
    std::span<const float> frame(std::size_t m) const;

    LatentFrame frame_copy(std::size_t m) const;
    void set_frame(std::size_t m, const LatentFrame& frame);

    friend bool operator==(const LatentVideo&, const LatentVideo&) = default;

private:
    std::size_t frames_ = 0;
    Dims dims_{};
    std::vector<float> data_;
};

/// Throws ErrorKind::Dimension unless frame count and dims agree.
void require_same_shape(const LatentVideo& a, const LatentVideo& b, const char* what);

/// Clean condition latents with their target frame positions.
struct ConditionSet {
    std::vector<LatentFrame> latents;
    std::vector<std::size_t> positions;

    std::size_t size() const noexcept { return latents.size(); }
};

/// Checks N >= 1, equal counts, strictly increasing positions below
/// `frames`, shared dims. Throws ErrorKind::Config / Dimension.
void validate_conditions(const ConditionSet& conditions, std::size_t frames);

}  // namespace flexti2v
