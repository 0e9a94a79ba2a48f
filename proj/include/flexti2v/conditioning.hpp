#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flexti2v/rng.hpp"
#include "flexti2v/tensor.hpp"

namespace flexti2v {

/// H x W binary mask shared by all channels.
struct SwapMask {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> bits;
    std::size_t ones = 0;
};

enum class SwapDirection {
    PerAlgorithm,  // active while t <= t_tilde (low step indices)
    Inverted,      // active while t > K - t_tilde (first steps of the K..1 loop)
};

/// Distance-dependent swap fraction and step window.
struct SwapSchedule {
    double p0 = 0.3;
    double t0 = 10.0;
    double delta1 = 5e-3;
    double delta2 = 0.3;
    std::size_t steps = 20;  // K, used by the inverted window
    SwapDirection direction = SwapDirection::PerAlgorithm;
    bool dynamic = true;  // false: P0 and t0 regardless of distance

    /// Throws ErrorKind::Config on out-of-range parameters.
    void validate() const;
};

/// Condition indices a frame swaps with: one or two entries, ascending.
class BoundIndices {
public:
    BoundIndices() = default;
    explicit BoundIndices(std::size_t only) : idx_{only, 0}, count_(1) {}
    BoundIndices(std::size_t before, std::size_t after) : idx_{before, after}, count_(2) {}

    std::size_t size() const noexcept { return count_; }
    std::size_t operator[](std::size_t i) const noexcept { return idx_[i]; }
    const std::size_t* begin() const noexcept { return idx_.data(); }
    const std::size_t* end() const noexcept { return idx_.data() + count_; }

    friend bool operator==(const BoundIndices&, const BoundIndices&) = default;

private:
    std::array<std::size_t, 2> idx_{};
    std::size_t count_ = 0;
};

/// Overwrites frame positions[n] of `video` with latents[n].
void frame_replace(LatentVideo& video, std::span<const LatentFrame> latents,
                   std::span<const std::size_t> positions);

/// Nearest condition before and after frame m; only the nearest one when m
/// lies outside [p_0, p_{N-1}]; only {n} when m == p_n. `positions` sorted.
BoundIndices bound_index(std::size_t m, std::span<const std::size_t> positions);

/// Window bound t_tilde = t0 - delta2*|m - p| (t0 when dynamic control is off).
double swap_window(std::size_t distance, const SwapSchedule& schedule);

/// True when DDIM step t lies inside the swap window.
bool swap_window_active(std::size_t t, double t_tilde, const SwapSchedule& schedule);

/// Fraction of spatial positions swapped between frame m and condition n at
/// DDIM step t; 0 outside the window, clamped at 0 below.
double swap_fraction(std::size_t m, std::size_t n, std::size_t t, const SwapSchedule& schedule,
                     std::span<const std::size_t> positions);

/// Number of set bits for fraction P on an H x W grid (round half away from zero).
std::size_t mask_count(double fraction, std::size_t height, std::size_t width);

/// Exact-count uniform random mask via partial Fisher-Yates over `stream`.
SwapMask gen_mask(double fraction, std::size_t height, std::size_t width, Rng& stream);

/// Copies image values into frame where the mask is set, on every channel.
void patch_swap(std::span<float> frame, const LatentFrame& image, const SwapMask& mask);

/// Random patch swapping for one frame against its bound condition images.
/// Frames sitting on a condition position are left as they are.
void condition_frame(LatentVideo& video, std::size_t m, std::span<const LatentFrame> images,
                     std::span<const std::size_t> positions, std::size_t t,
                     const SwapSchedule& schedule, std::uint64_t seed);

/// condition_frame for every frame. Mask streams are keyed by
/// (seed, mask, t, m, n), so frame order does not affect the result.
void apply_conditioning(LatentVideo& video, std::span<const LatentFrame> images,
                        std::span<const std::size_t> positions, std::size_t t,
                        const SwapSchedule& schedule, std::uint64_t seed);

}  // namespace flexti2v
