#include "flexti2v/rng.hpp"

#include <cmath>
#include <numbers>

namespace flexti2v {

namespace {

std::uint64_t mix(std::uint64_t x) noexcept {
    return SplitMix64(x).next();
}

}  // namespace

double Rng::uniform_open_closed() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
    // Lemire's multiply-and-reject.
    unsigned __int128 product = static_cast<unsigned __int128>(next_u64()) * bound;
    auto low = static_cast<std::uint64_t>(product);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            product = static_cast<unsigned __int128>(next_u64()) * bound;
            low = static_cast<std::uint64_t>(product);
        }
    }
    return static_cast<std::uint64_t>(product >> 64);
}

std::pair<double, double> Rng::gauss() noexcept {
    const double u1 = uniform_open_closed();
    const double u2 = uniform_open_closed();
    return box_muller(u1, u2);
}

std::pair<double, double> box_muller(double u1, double u2) noexcept {
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

Rng derive_stream(const StreamKey& key) noexcept {
    std::uint64_t h = mix(key.seed);
    h = mix(h ^ static_cast<std::uint64_t>(key.purpose));
    h = mix(h ^ key.t);
    h = mix(h ^ key.m);
    h = mix(h ^ key.n);

    SplitMix64 seeder(h);
    Rng::State state{};
    for (auto& word : state) word = seeder.next();
    return Rng(state);
}

void fill_gaussian(std::span<float> out, Rng& rng) noexcept {
    std::size_t i = 0;
    for (; i + 1 < out.size(); i += 2) {
        const auto [z0, z1] = rng.gauss();
        out[i] = static_cast<float>(z0);
        out[i + 1] = static_cast<float>(z1);
    }
    if (i < out.size()) out[i] = static_cast<float>(rng.gauss().first);
}

}  // namespace flexti2v
