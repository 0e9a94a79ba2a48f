#include "flexti2v/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "flexti2v/error.hpp"
#include "flexti2v/kernels/kernels.hpp"

namespace flexti2v {

namespace {

std::size_t distance(std::size_t a, std::size_t b) noexcept {
    return a > b ? a - b : b - a;
}

}  // namespace

void SwapSchedule::validate() const {
    require(p0 >= 0.0 && p0 <= 1.0, ErrorKind::Config, "p0 must lie in [0, 1]");
    require(t0 >= 0.0, ErrorKind::Config, "t0 must be >= 0");
    require(delta1 >= 0.0, ErrorKind::Config, "delta1 must be >= 0");
    require(delta2 >= 0.0, ErrorKind::Config, "delta2 must be >= 0");
    require(steps >= 1, ErrorKind::Config, "steps must be >= 1");
}

void frame_replace(LatentVideo& video, std::span<const LatentFrame> latents,
                   std::span<const std::size_t> positions) {
    require(latents.size() == positions.size(), ErrorKind::Config,
            "frame_replace: latents and positions differ in count");
    for (std::size_t n = 0; n < latents.size(); ++n) {
        require(positions[n] < video.frames(), ErrorKind::Config,
                "position out of range: " + std::to_string(positions[n]));
        require_same_dims(video.dims(), latents[n].dims(), "frame_replace");
    }
    for (std::size_t n = 0; n < latents.size(); ++n) video.set_frame(positions[n], latents[n]);
}

BoundIndices bound_index(std::size_t m, std::span<const std::size_t> positions) {
    require(!positions.empty(), ErrorKind::Config, "bound_index needs at least one position");
    const auto first_not_below = std::lower_bound(positions.begin(), positions.end(), m);
    if (first_not_below == positions.begin()) return BoundIndices(0);
    const auto after = static_cast<std::size_t>(first_not_below - positions.begin());
    if (first_not_below == positions.end()) return BoundIndices(positions.size() - 1);
    if (*first_not_below == m) return BoundIndices(after);
    return BoundIndices(after - 1, after);
}

double swap_window(std::size_t dist, const SwapSchedule& schedule) {
    if (!schedule.dynamic) return schedule.t0;
    return schedule.t0 - schedule.delta2 * static_cast<double>(dist);
}

bool swap_window_active(std::size_t t, double t_tilde, const SwapSchedule& schedule) {
    if (t_tilde <= 0.0) return false;
    const double step = static_cast<double>(t);
    if (schedule.direction == SwapDirection::PerAlgorithm) return step <= t_tilde;
    return step > static_cast<double>(schedule.steps) - t_tilde;
}

double swap_fraction(std::size_t m, std::size_t n, std::size_t t, const SwapSchedule& schedule,
                     std::span<const std::size_t> positions) {
    require(n < positions.size(), ErrorKind::Config,
            "condition index " + std::to_string(n) + " out of range");
    const std::size_t dist = distance(m, positions[n]);
    if (!swap_window_active(t, swap_window(dist, schedule), schedule)) return 0.0;
    if (!schedule.dynamic) return schedule.p0;
    return std::max(0.0, schedule.p0 - schedule.delta1 * static_cast<double>(dist));
}

std::size_t mask_count(double fraction, std::size_t height, std::size_t width) {
    require(fraction >= 0.0 && fraction <= 1.0, ErrorKind::Config,
            "mask fraction must lie in [0, 1]");
    const double total = static_cast<double>(height * width);
    return std::min(height * width, static_cast<std::size_t>(std::round(fraction * total)));
}

SwapMask gen_mask(double fraction, std::size_t height, std::size_t width, Rng& stream) {
    SwapMask mask{height, width, std::vector<std::uint8_t>(height * width, 0),
                  mask_count(fraction, height, width)};
    const std::size_t total = height * width;
    if (mask.ones == 0) return mask;
    if (mask.ones == total) {
        std::fill(mask.bits.begin(), mask.bits.end(), std::uint8_t{1});
        return mask;
    }
    std::vector<std::size_t> order(total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < mask.ones; ++i) {
        const std::size_t j = i + stream.below(total - i);
        std::swap(order[i], order[j]);
        mask.bits[order[i]] = 1;
    }
    return mask;
}

void patch_swap(std::span<float> frame, const LatentFrame& image, const SwapMask& mask) {
    const Dims& dims = image.dims();
    require(frame.size() == dims.count(), ErrorKind::Dimension, "patch_swap: frame size mismatch");
    require(mask.height == dims.height && mask.width == dims.width, ErrorKind::Dimension,
            "patch_swap: mask is " + std::to_string(mask.height) + "x" +
                std::to_string(mask.width) + ", latent " + to_string(dims));
    if (mask.ones == 0) return;
    kernels::masked_select(frame, image.values(), mask.bits);
}

void condition_frame(LatentVideo& video, std::size_t m, std::span<const LatentFrame> images,
                     std::span<const std::size_t> positions, std::size_t t,
                     const SwapSchedule& schedule, std::uint64_t seed) {
    require(images.size() == positions.size(), ErrorKind::Config,
            "condition images and positions differ in count");
    if (std::binary_search(positions.begin(), positions.end(), m)) return;

    const Dims& dims = video.dims();
    auto frame = video.frame(m);
    for (std::size_t n : bound_index(m, positions)) {
        const double fraction = swap_fraction(m, n, t, schedule, positions);
        if (fraction <= 0.0) continue;
        require_same_dims(dims, images[n].dims(), "apply_conditioning");
        Rng stream = derive_stream({seed, StreamPurpose::Mask, t, m, n});
        const SwapMask mask = gen_mask(fraction, dims.height, dims.width, stream);
        patch_swap(frame, images[n], mask);
    }
}

void apply_conditioning(LatentVideo& video, std::span<const LatentFrame> images,
                        std::span<const std::size_t> positions, std::size_t t,
                        const SwapSchedule& schedule, std::uint64_t seed) {
    for (std::size_t m = 0; m < video.frames(); ++m) {
        condition_frame(video, m, images, positions, t, schedule, seed);
    }
}

}  // namespace flexti2v
