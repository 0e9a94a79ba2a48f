#pragma once

// Elementwise f32 kernels behind every latent update in the sampler.
//
// Each kernel has a scalar reference and optional SIMD variants. Variants use
// exactly the scalar operation order (no FMA, no reassociation), so for any
// input all variants produce bit-identical output. Output may alias any input.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace flexti2v::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view to_string(Isa isa);

struct KernelTable {
    Isa isa;

    // out = a*x + b*y
    void (*axpby)(float* out, const float* x, const float* y, float a, float b, std::size_t n);

    // out = scale*(z - noise*eps) + dir*eps
    void (*ddim_combine)(float* out, const float* z, const float* eps, float scale, float noise,
                         float dir, std::size_t n);

    // out = uncond + s*(cond - uncond)
    void (*guidance_combine)(float* out, const float* uncond, const float* cond, float s,
                             std::size_t n);

    // out = (z - a*x0) / b
    void (*noise_residual)(float* out, const float* z, const float* x0, float a, float b,
                           std::size_t n);

    // dst[p*plane + k] = src[p*plane + k] wherever mask[k] != 0, for p < planes
    void (*masked_select)(float* dst, const float* src, const std::uint8_t* mask,
                          std::size_t plane, std::size_t planes);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the variant is not compiled in or the CPU lacks the ISA.
const KernelTable* table_for(Isa isa) noexcept;

/// Table used by the engine: the widest supported ISA unless overridden by
/// FLEXTI2V_ISA=scalar|avx2|neon or set_active().
const KernelTable& active() noexcept;

/// Returns false (and changes nothing) if the ISA is unavailable.
bool set_active(Isa isa) noexcept;

// Span front-ends on the active table. Sizes must agree (checked).

void axpby(std::span<float> out, std::span<const float> x, std::span<const float> y, float a,
           float b);
void ddim_combine(std::span<float> out, std::span<const float> z, std::span<const float> eps,
                  float scale, float noise, float dir);
void guidance_combine(std::span<float> out, std::span<const float> uncond,
                      std::span<const float> cond, float s);
void noise_residual(std::span<float> out, std::span<const float> z, std::span<const float> x0,
                    float a, float b);
void masked_select(std::span<float> dst, std::span<const float> src,
                   std::span<const std::uint8_t> mask);

namespace detail {
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;
}  // namespace detail

}  // namespace flexti2v::kernels
