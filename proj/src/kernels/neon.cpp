#include "flexti2v/kernels/kernels.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace flexti2v::kernels::detail {

#if defined(__aarch64__)

namespace {

// vmlaq/vfmaq are avoided on purpose: separate multiply and add keep the
// rounding identical to the scalar reference.

constexpr std::size_t kLanes = 4;

void axpby_neon(float* out, const float* x, const float* y, float a, float b, std::size_t n) {
    const float32x4_t va = vdupq_n_f32(a);
    const float32x4_t vb = vdupq_n_f32(b);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const float32x4_t ax = vmulq_f32(va, vld1q_f32(x + i));
        const float32x4_t by = vmulq_f32(vb, vld1q_f32(y + i));
        vst1q_f32(out + i, vaddq_f32(ax, by));
    }
    for (; i < n; ++i) {
        const float ax = a * x[i];
        const float by = b * y[i];
        out[i] = ax + by;
    }
}

void ddim_combine_neon(float* out, const float* z, const float* eps, float scale, float noise,
                       float dir, std::size_t n) {
    const float32x4_t vscale = vdupq_n_f32(scale);
    const float32x4_t vnoise = vdupq_n_f32(noise);
    const float32x4_t vdir = vdupq_n_f32(dir);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const float32x4_t e = vld1q_f32(eps + i);
        const float32x4_t residual = vsubq_f32(vld1q_f32(z + i), vmulq_f32(vnoise, e));
        const float32x4_t scaled = vmulq_f32(vscale, residual);
        vst1q_f32(out + i, vaddq_f32(scaled, vmulq_f32(vdir, e)));
    }
    for (; i < n; ++i) {
        const float e = eps[i];
        const float residual = z[i] - noise * e;
        const float scaled = scale * residual;
        const float direction = dir * e;
        out[i] = scaled + direction;
    }
}

void guidance_combine_neon(float* out, const float* uncond, const float* cond, float s,
                           std::size_t n) {
    const float32x4_t vs = vdupq_n_f32(s);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const float32x4_t u = vld1q_f32(uncond + i);
        const float32x4_t delta = vsubq_f32(vld1q_f32(cond + i), u);
        vst1q_f32(out + i, vaddq_f32(u, vmulq_f32(vs, delta)));
    }
    for (; i < n; ++i) {
        const float u = uncond[i];
        const float delta = cond[i] - u;
        out[i] = u + s * delta;
    }
}

void noise_residual_neon(float* out, const float* z, const float* x0, float a, float b,
                         std::size_t n) {
    const float32x4_t va = vdupq_n_f32(a);
    const float32x4_t vb = vdupq_n_f32(b);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const float32x4_t signal = vmulq_f32(va, vld1q_f32(x0 + i));
        vst1q_f32(out + i, vdivq_f32(vsubq_f32(vld1q_f32(z + i), signal), vb));
    }
    for (; i < n; ++i) {
        const float signal = a * x0[i];
        out[i] = (z[i] - signal) / b;
    }
}

void masked_select_neon(float* dst, const float* src, const std::uint8_t* mask, std::size_t plane,
                        std::size_t planes) {
    for (std::size_t p = 0; p < planes; ++p) {
        float* d = dst + p * plane;
        const float* s = src + p * plane;
        std::size_t k = 0;
        for (; k + kLanes <= plane; k += kLanes) {
            const uint32x4_t m = {mask[k], mask[k + 1], mask[k + 2], mask[k + 3]};
            const uint32x4_t select = vmvnq_u32(vceqq_u32(m, vdupq_n_u32(0)));
            vst1q_f32(d + k, vbslq_f32(select, vld1q_f32(s + k), vld1q_f32(d + k)));
        }
        for (; k < plane; ++k) {
            if (mask[k]) d[k] = s[k];
        }
    }
}

constexpr KernelTable kNeon{
    Isa::Neon,          axpby_neon,          ddim_combine_neon,
    guidance_combine_neon, noise_residual_neon, masked_select_neon,
};

}  // namespace

const KernelTable* neon_table() noexcept {
    return &kNeon;
}

#else

const KernelTable* neon_table() noexcept {
    return nullptr;
}

#endif

}  // namespace flexti2v::kernels::detail
