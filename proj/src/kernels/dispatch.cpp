#include <atomic>
#include <cstdlib>
#include <string>

#include "flexti2v/error.hpp"
#include "flexti2v/kernels/kernels.hpp"

namespace flexti2v::kernels {

std::string_view to_string(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
        case Isa::Neon: return "neon";
    }
    return "unknown";
}

const KernelTable* table_for(Isa isa) noexcept {
    switch (isa) {
        case Isa::Scalar: return &scalar_table();
        case Isa::Avx2: return detail::avx2_table();
        case Isa::Neon: return detail::neon_table();
    }
    return nullptr;
}

namespace {

const KernelTable* select_initial() noexcept {
    if (const char* forced = std::getenv("FLEXTI2V_ISA")) {
        const std::string_view name(forced);
        for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
            if (name == to_string(isa)) {
                if (const KernelTable* table = table_for(isa)) return table;
            }
        }
    }
    for (Isa isa : {Isa::Avx2, Isa::Neon}) {
        if (const KernelTable* table = table_for(isa)) return table;
    }
    return &scalar_table();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
    static std::atomic<const KernelTable*> slot{select_initial()};
    return slot;
}

void check_sizes(std::size_t out, std::size_t a, std::size_t b) {
    require(out == a && out == b, ErrorKind::Dimension,
            "kernel operands differ in length: " + std::to_string(out) + ", " +
                std::to_string(a) + ", " + std::to_string(b));
}

}  // namespace

const KernelTable& active() noexcept {
    return *active_slot().load(std::memory_order_relaxed);
}

bool set_active(Isa isa) noexcept {
    const KernelTable* table = table_for(isa);
    if (!table) return false;
    active_slot().store(table, std::memory_order_relaxed);
    return true;
}

void axpby(std::span<float> out, std::span<const float> x, std::span<const float> y, float a,
           float b) {
    check_sizes(out.size(), x.size(), y.size());
    active().axpby(out.data(), x.data(), y.data(), a, b, out.size());
}

void ddim_combine(std::span<float> out, std::span<const float> z, std::span<const float> eps,
                  float scale, float noise, float dir) {
    check_sizes(out.size(), z.size(), eps.size());
    active().ddim_combine(out.data(), z.data(), eps.data(), scale, noise, dir, out.size());
}

void guidance_combine(std::span<float> out, std::span<const float> uncond,
                      std::span<const float> cond, float s) {
    check_sizes(out.size(), uncond.size(), cond.size());
    active().guidance_combine(out.data(), uncond.data(), cond.data(), s, out.size());
}

void noise_residual(std::span<float> out, std::span<const float> z, std::span<const float> x0,
                    float a, float b) {
    check_sizes(out.size(), z.size(), x0.size());
    active().noise_residual(out.data(), z.data(), x0.data(), a, b, out.size());
}

void masked_select(std::span<float> dst, std::span<const float> src,
                   std::span<const std::uint8_t> mask) {
    check_sizes(dst.size(), src.size(), src.size());
    require(!mask.empty() && dst.size() % mask.size() == 0, ErrorKind::Dimension,
            "mask plane does not tile the tensor");
    active().masked_select(dst.data(), src.data(), mask.data(), mask.size(),
                           dst.size() / mask.size());
}

}  // namespace flexti2v::kernels
