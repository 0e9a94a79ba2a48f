#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "flexti2v/conditioning.hpp"
#include "flexti2v/estimator.hpp"
#include "flexti2v/rng.hpp"
#include "flexti2v/schedule.hpp"
#include "flexti2v/tensor.hpp"

namespace flexti2v {

struct EngineConfig {
    std::size_t frames = 16;  // M
    std::size_t steps = 20;   // K
    double p0 = 0.3;
    double t0 = 10.0;
    double delta1 = 5e-3;
    double delta2 = 0.3;
    double guidance_scale = 9.0;
    double sigma = 0.0;
    std::uint64_t seed = 0;

    bool enable_frame_replace = true;
    bool enable_rps = true;
    bool enable_dynamic_control = true;
    bool hard_replace_output = false;
    // Draw one inversion noise per condition and reuse it at every step.
    bool reuse_inversion_noise = false;
    SwapDirection direction = SwapDirection::PerAlgorithm;

    void validate() const;
    SwapSchedule swap_schedule() const;
};

/// Instrumentation hooks, called synchronously from run_flexti2v.
class StepObserver {
public:
    virtual ~StepObserver() = default;
    virtual void on_init(const LatentVideo& /*z*/) {}
    /// After frame replacement at DDIM step k with that step's inverted conditions.
    virtual void on_frame_replaced(std::size_t /*k*/, const LatentVideo& /*z_hat*/,
                                   std::span<const LatentFrame> /*inverted*/) {}
    virtual void on_conditioned(std::size_t /*k*/, const LatentVideo& /*z_hat*/) {}
    /// Latent after the DDIM update from step k to k-1.
    virtual void on_step(std::size_t /*k*/, const LatentVideo& /*z_prev*/) {}
};

struct RunResult {
    LatentVideo video;
    std::vector<double> step_ms;  // in execution order, k = K..1
    double total_ms = 0.0;
    std::size_t estimator_calls = 0;
};

/// M copies of the inverted first condition.
LatentVideo init_noise(const LatentFrame& first_inverted, std::size_t frames);

/// uncond + s*(cond - uncond)
LatentVideo cfg_combine(const LatentVideo& eps_uncond, const LatentVideo& eps_cond, double scale);

/// Standard-normal frame drawn from the stream for `key`.
LatentFrame draw_noise(const StreamKey& key, const Dims& dims);

/// Whether a run with this estimator and scale issues two queries per step.
bool guidance_used(const NoiseEstimator& estimator, double guidance_scale);

/// One noise prediction; with guidance, unconditional then conditional
/// queries combined by cfg_combine. Adds the query count to `calls`.
LatentVideo estimate_noise(NoiseEstimator& estimator, const LatentVideo& z, std::size_t t_train,
                           const PromptSpec& prompt, double guidance_scale, std::size_t& calls);

/// Condition latents re-noised to training timestep tau_k of DDIM step k.
std::vector<LatentFrame> invert_conditions(const NoiseSchedule& schedule,
                                           const ConditionSet& conditions, std::size_t k,
                                           std::size_t t_train, const EngineConfig& config);

/// Full conditioned sampling loop over DDIM steps K..1.
RunResult run_flexti2v(const EngineConfig& config, const ConditionSet& conditions,
                       const PromptSpec& prompt, NoiseEstimator& estimator,
                       const NoiseSchedule& schedule, const TimestepMap& timesteps,
                       StepObserver* observer = nullptr);

}  // namespace flexti2v
