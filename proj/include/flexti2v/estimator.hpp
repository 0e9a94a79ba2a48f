#pragma once

#include <cstddef>
#include <string>

#include "flexti2v/schedule.hpp"
#include "flexti2v/tensor.hpp"

namespace flexti2v {

struct PromptSpec {
    std::string text;
    std::string negative;  // empty: plain unconditional query
};

/// Noise predictor eps_theta(z_t, t) for a whole latent video.
class NoiseEstimator {
public:
    virtual ~NoiseEstimator() = default;

    virtual LatentVideo estimate(const LatentVideo& z, std::size_t t_train,
                                 const PromptSpec& prompt, bool conditional) = 0;

    /// False for estimators that must not be combined via CFG (the oracle).
    virtual bool supports_guidance() const { return true; }

    /// True when the estimator reads the prompt text.
    virtual bool requires_prompt() const { return true; }
};

/// Deterministic stand-in for a trained network:
///   eps = tanh(z) * (0.5 + 0.5*conditional) + 0.01*((t mod 7) - 3)
/// evaluated in binary64 from the f32 input and rounded once to f32.
float dummy_denoise_value(float z, std::size_t t_train, bool conditional) noexcept;
LatentVideo dummy_denoise(const LatentVideo& z, std::size_t t_train, bool conditional);

class DummyEstimator final : public NoiseEstimator {
public:
    LatentVideo estimate(const LatentVideo& z, std::size_t t_train, const PromptSpec& prompt,
                         bool conditional) override;
};

/// Exact noise relative to a known clean target:
///   eps = (z_t - sqrt(ab_t)*z0) / sqrt(1 - ab_t)
/// Throws ErrorKind::Domain when ab_t == 1.
LatentVideo oracle_estimate(const NoiseSchedule& schedule, const LatentVideo& z_t,
                            std::size_t t_train, const LatentVideo& target);

class OracleEstimator final : public NoiseEstimator {
public:
    OracleEstimator(const NoiseSchedule& schedule, LatentVideo target)
        : schedule_(schedule), target_(std::move(target)) {}

    LatentVideo estimate(const LatentVideo& z, std::size_t t_train, const PromptSpec& prompt,
                         bool conditional) override;

    bool supports_guidance() const override { return false; }
    bool requires_prompt() const override { return false; }

    const LatentVideo& target() const noexcept { return target_; }

private:
    const NoiseSchedule& schedule_;
    LatentVideo target_;
};

}  // namespace flexti2v
