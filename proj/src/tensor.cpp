#include "flexti2v/tensor.hpp"

#include <algorithm>

#include "flexti2v/error.hpp"

namespace flexti2v {

std::string to_string(const Dims& dims) {
    return "(" + std::to_string(dims.channels) + "," + std::to_string(dims.height) + "," +
           std::to_string(dims.width) + ")";
}

void require_same_dims(const Dims& a, const Dims& b, const char* what) {
    if (a != b) {
        fail(ErrorKind::Dimension,
             std::string(what) + ": dims " + to_string(a) + " vs " + to_string(b));
    }
}

LatentFrame::LatentFrame(Dims dims, float fill) : dims_(dims), data_(dims.count(), fill) {}

LatentFrame::LatentFrame(Dims dims, std::vector<float> data) : dims_(dims), data_(std::move(data)) {
    require(data_.size() == dims_.count(), ErrorKind::Dimension,
            "frame data has " + std::to_string(data_.size()) + " values, dims " + to_string(dims_) +
                " need " + std::to_string(dims_.count()));
}

LatentVideo::LatentVideo(std::size_t frames, Dims dims, float fill)
    : frames_(frames), dims_(dims), data_(frames * dims.count(), fill) {}

LatentVideo::LatentVideo(std::size_t frames, Dims dims, std::vector<float> data)
    : frames_(frames), dims_(dims), data_(std::move(data)) {
    require(data_.size() == frames_ * dims_.count(), ErrorKind::Dimension,
            "video data has " + std::to_string(data_.size()) + " values, expected " +
                std::to_string(frames_ * dims_.count()));
}

std::span<float> LatentVideo::frame(std::size_t m) {
    require(m < frames_, ErrorKind::Dimension,
            "frame index " + std::to_string(m) + " out of range for " + std::to_string(frames_) +
                " frames");
    return std::span<float>(data_).subspan(m * dims_.count(), dims_.count());
}

std::span<const float> LatentVideo::frame(std::size_t m) const {
    require(m < frames_, ErrorKind::Dimension,
            "frame index " + std::to_string(m) + " out of range for " + std::to_string(frames_) +
                " frames");
    return std::span<const float>(data_).subspan(m * dims_.count(), dims_.count());
}

LatentFrame LatentVideo::frame_copy(std::size_t m) const {
    const auto view = frame(m);
    return LatentFrame(dims_, std::vector<float>(view.begin(), view.end()));
}

void LatentVideo::set_frame(std::size_t m, const LatentFrame& source) {
    require_same_dims(dims_, source.dims(), "set_frame");
    const auto src = source.values();
    std::copy(src.begin(), src.end(), frame(m).begin());
}

void require_same_shape(const LatentVideo& a, const LatentVideo& b, const char* what) {
    if (a.frames() != b.frames()) {
        fail(ErrorKind::Dimension, std::string(what) + ": frame counts " +
                                       std::to_string(a.frames()) + " vs " +
                                       std::to_string(b.frames()));
    }
    require_same_dims(a.dims(), b.dims(), what);
}

void validate_conditions(const ConditionSet& conditions, std::size_t frames) {
    require(!conditions.latents.empty(), ErrorKind::Config, "at least one condition is required");
    require(conditions.latents.size() == conditions.positions.size(), ErrorKind::Config,
            "condition latents and positions differ in count");
    for (std::size_t n = 0; n < conditions.positions.size(); ++n) {
        const std::size_t p = conditions.positions[n];
        require(p < frames, ErrorKind::Config,
                "position out of range: " + std::to_string(p) + " with " +
                    std::to_string(frames) + " frames");
        if (n > 0) {
            require(conditions.positions[n - 1] < p, ErrorKind::Config,
                    "positions strictly increasing");
        }
        require_same_dims(conditions.latents.front().dims(), conditions.latents[n].dims(),
                          "condition latents");
    }
}

}  // namespace flexti2v
