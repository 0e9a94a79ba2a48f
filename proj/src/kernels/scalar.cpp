#include "flexti2v/kernels/kernels.hpp"

namespace flexti2v::kernels {

namespace {

void axpby_scalar(float* out, const float* x, const float* y, float a, float b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float ax = a * x[i];
        const float by = b * y[i];
        out[i] = ax + by;
    }
}

void ddim_combine_scalar(float* out, const float* z, const float* eps, float scale, float noise,
                         float dir, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float e = eps[i];
        const float residual = z[i] - noise * e;
        const float scaled = scale * residual;
        const float direction = dir * e;
        out[i] = scaled + direction;
    }
}

void guidance_combine_scalar(float* out, const float* uncond, const float* cond, float s,
                             std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float u = uncond[i];
        const float delta = cond[i] - u;
        out[i] = u + s * delta;
    }
}

void noise_residual_scalar(float* out, const float* z, const float* x0, float a, float b,
                           std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        const float signal = a * x0[i];
        out[i] = (z[i] - signal) / b;
    }
}

void masked_select_scalar(float* dst, const float* src, const std::uint8_t* mask,
                          std::size_t plane, std::size_t planes) {
    for (std::size_t p = 0; p < planes; ++p) {
        float* d = dst + p * plane;
        const float* s = src + p * plane;
        for (std::size_t k = 0; k < plane; ++k) {
            if (mask[k]) d[k] = s[k];
        }
    }
}

constexpr KernelTable kScalar{
    Isa::Scalar,        axpby_scalar,          ddim_combine_scalar,
    guidance_combine_scalar, noise_residual_scalar, masked_select_scalar,
};

}  // namespace

const KernelTable& scalar_table() noexcept {
    return kScalar;
}

}  // namespace flexti2v::kernels
