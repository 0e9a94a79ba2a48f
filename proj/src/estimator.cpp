#include "flexti2v/estimator.hpp"

#include <cmath>
#include <string>

#include "flexti2v/error.hpp"
#include "flexti2v/kernels/kernels.hpp"

namespace flexti2v {

float dummy_denoise_value(float z, std::size_t t_train, bool conditional) noexcept {
    const double gain = conditional ? 1.0 : 0.5;
    const double bias = 0.01 * (static_cast<double>(t_train % 7) - 3.0);
    return static_cast<float>(std::tanh(static_cast<double>(z)) * gain + bias);
}

LatentVideo dummy_denoise(const LatentVideo& z, std::size_t t_train, bool conditional) {
    LatentVideo out(z.frames(), z.dims());
    const auto in = z.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < in.size(); ++i) {
        dst[i] = dummy_denoise_value(in[i], t_train, conditional);
    }
    return out;
}

LatentVideo DummyEstimator::estimate(const LatentVideo& z, std::size_t t_train,
                                     const PromptSpec& /*prompt*/, bool conditional) {
    return dummy_denoise(z, t_train, conditional);
}

LatentVideo oracle_estimate(const NoiseSchedule& schedule, const LatentVideo& z_t,
                            std::size_t t_train, const LatentVideo& target) {
    require_same_shape(z_t, target, "oracle_estimate");
    const double ab = schedule.alpha_bar(t_train);
    require(ab < 1.0, ErrorKind::Domain,
            "oracle estimate undefined at t=" + std::to_string(t_train) + " (alpha_bar == 1)");
    LatentVideo out(z_t.frames(), z_t.dims());
    kernels::noise_residual(out.values(), z_t.values(), target.values(),
                            static_cast<float>(std::sqrt(ab)),
                            static_cast<float>(std::sqrt(1.0 - ab)));
    return out;
}

LatentVideo OracleEstimator::estimate(const LatentVideo& z, std::size_t t_train,
                                      const PromptSpec& /*prompt*/, bool /*conditional*/) {
    return oracle_estimate(schedule_, z, t_train, target_);
}

}  // namespace flexti2v
