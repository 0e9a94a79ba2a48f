#include "flexti2v/kernels/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define FLEXTI2V_HAVE_AVX2_VARIANT 1
#endif

namespace flexti2v::kernels::detail {

#if defined(FLEXTI2V_HAVE_AVX2_VARIANT)

namespace {

// Only the avx2 target is enabled here (not fma), so the compiler cannot
// fuse the scalar tails either.
#define FLEXTI2V_AVX2 __attribute__((target("avx2")))

constexpr std::size_t kLanes = 8;

FLEXTI2V_AVX2 void axpby_avx2(float* out, const float* x, const float* y, float a, float b,
                              std::size_t n) {
    const __m256 va = _mm256_set1_ps(a);
    const __m256 vb = _mm256_set1_ps(b);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256 ax = _mm256_mul_ps(va, _mm256_loadu_ps(x + i));
        const __m256 by = _mm256_mul_ps(vb, _mm256_loadu_ps(y + i));
        _mm256_storeu_ps(out + i, _mm256_add_ps(ax, by));
    }
    for (; i < n; ++i) {
        const float ax = a * x[i];
        const float by = b * y[i];
        out[i] = ax + by;
    }
}

FLEXTI2V_AVX2 void ddim_combine_avx2(float* out, const float* z, const float* eps, float scale,
                                     float noise, float dir, std::size_t n) {
    const __m256 vscale = _mm256_set1_ps(scale);
    const __m256 vnoise = _mm256_set1_ps(noise);
    const __m256 vdir = _mm256_set1_ps(dir);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256 e = _mm256_loadu_ps(eps + i);
        const __m256 residual = _mm256_sub_ps(_mm256_loadu_ps(z + i), _mm256_mul_ps(vnoise, e));
        const __m256 scaled = _mm256_mul_ps(vscale, residual);
        _mm256_storeu_ps(out + i, _mm256_add_ps(scaled, _mm256_mul_ps(vdir, e)));
    }
    for (; i < n; ++i) {
        const float e = eps[i];
        const float residual = z[i] - noise * e;
        const float scaled = scale * residual;
        const float direction = dir * e;
        out[i] = scaled + direction;
    }
}

FLEXTI2V_AVX2 void guidance_combine_avx2(float* out, const float* uncond, const float* cond,
                                         float s, std::size_t n) {
    const __m256 vs = _mm256_set1_ps(s);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256 u = _mm256_loadu_ps(uncond + i);
        const __m256 delta = _mm256_sub_ps(_mm256_loadu_ps(cond + i), u);
        _mm256_storeu_ps(out + i, _mm256_add_ps(u, _mm256_mul_ps(vs, delta)));
    }
    for (; i < n; ++i) {
        const float u = uncond[i];
        const float delta = cond[i] - u;
        out[i] = u + s * delta;
    }
}

FLEXTI2V_AVX2 void noise_residual_avx2(float* out, const float* z, const float* x0, float a,
                                       float b, std::size_t n) {
    const __m256 va = _mm256_set1_ps(a);
    const __m256 vb = _mm256_set1_ps(b);
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256 signal = _mm256_mul_ps(va, _mm256_loadu_ps(x0 + i));
        const __m256 diff = _mm256_sub_ps(_mm256_loadu_ps(z + i), signal);
        _mm256_storeu_ps(out + i, _mm256_div_ps(diff, vb));
    }
    for (; i < n; ++i) {
        const float signal = a * x0[i];
        out[i] = (z[i] - signal) / b;
    }
}

FLEXTI2V_AVX2 void masked_select_avx2(float* dst, const float* src, const std::uint8_t* mask,
                                      std::size_t plane, std::size_t planes) {
    const __m256i zero = _mm256_setzero_si256();
    for (std::size_t p = 0; p < planes; ++p) {
        float* d = dst + p * plane;
        const float* s = src + p * plane;
        std::size_t k = 0;
        for (; k + kLanes <= plane; k += kLanes) {
            const __m128i bytes = _mm_loadl_epi64(reinterpret_cast<const __m128i*>(mask + k));
            const __m256i wide = _mm256_cvtepu8_epi32(bytes);
            const __m256 select =
                _mm256_castsi256_ps(_mm256_xor_si256(_mm256_cmpeq_epi32(wide, zero),
                                                     _mm256_set1_epi32(-1)));
            const __m256 blended =
                _mm256_blendv_ps(_mm256_loadu_ps(d + k), _mm256_loadu_ps(s + k), select);
            _mm256_storeu_ps(d + k, blended);
        }
        for (; k < plane; ++k) {
            if (mask[k]) d[k] = s[k];
        }
    }
}

#undef FLEXTI2V_AVX2

constexpr KernelTable kAvx2{
    Isa::Avx2,          axpby_avx2,          ddim_combine_avx2,
    guidance_combine_avx2, noise_residual_avx2, masked_select_avx2,
};

}  // namespace

const KernelTable* avx2_table() noexcept {
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported ? &kAvx2 : nullptr;
}

#else

const KernelTable* avx2_table() noexcept {
    return nullptr;
}

#endif

}  // namespace flexti2v::kernels::detail
