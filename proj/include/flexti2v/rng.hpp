#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

namespace flexti2v {

// Counter-keyed random streams. Every stochastic draw in the pipeline comes
// from a stream derived from (seed, purpose, t, m, n), so results do not
// depend on the order in which frames or conditions are processed.

enum class StreamPurpose : std::uint64_t {
    InversionNoise = 1,
    Mask = 2,
    InitNoise = 3,
    StepNoise = 4,  // sigma > 0 sampling noise
};

struct StreamKey {
    std::uint64_t seed = 0;
    StreamPurpose purpose = StreamPurpose::InversionNoise;
    std::uint64_t t = 0;
    std::uint64_t m = 0;
    std::uint64_t n = 0;

    friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

/// SplitMix64 (Steele, Lea, Flood). Used for key hashing and state seeding.
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t state) noexcept : state_(state) {}

    constexpr std::uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

/// xoshiro256** generator. Value type: copying forks the stream.
/// Satisfies std::uniform_random_bit_generator.
class Rng {
public:
    using result_type = std::uint64_t;
    using State = std::array<std::uint64_t, 4>;

    explicit constexpr Rng(const State& state) noexcept : s_(state) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type next_u64() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    constexpr result_type operator()() noexcept { return next_u64(); }

    /// Uniform on (0, 1] with 53-bit resolution; never returns 0.
    double uniform_open_closed() noexcept;

    /// Unbiased integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound) noexcept;

    /// Two independent standard normals (Box-Muller).
    std::pair<double, double> gauss() noexcept;

    const State& state() const noexcept { return s_; }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    State s_;
};

/// Pure function of the key: hashes the five fields through a SplitMix64
/// chain and expands the result into a xoshiro256** state.
Rng derive_stream(const StreamKey& key) noexcept;

/// Box-Muller on explicit uniforms in (0, 1].
std::pair<double, double> box_muller(double u1, double u2) noexcept;

/// Fills `out` with standard normals, consuming gauss() pairs in order.
/// An odd trailing element discards the second normal of its pair.
void fill_gaussian(std::span<float> out, Rng& rng) noexcept;

}  // namespace flexti2v
