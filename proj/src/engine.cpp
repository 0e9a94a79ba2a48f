#include "flexti2v/engine.hpp"

#include <chrono>
#include <cmath>
#include <string>

#include "flexti2v/error.hpp"
#include "flexti2v/kernels/kernels.hpp"

namespace flexti2v {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void require_finite(const LatentVideo& eps, std::size_t t_train) {
    for (float v : eps.values()) {
        if (!std::isfinite(v)) {
            fail(ErrorKind::Domain,
                 "estimator returned non-finite values at t=" + std::to_string(t_train));
        }
    }
}

}  // namespace

void EngineConfig::validate() const {
    require(frames >= 1, ErrorKind::Config, "frames must be >= 1");
    require(steps >= 1, ErrorKind::Config, "steps must be >= 1");
    require(guidance_scale >= 0.0, ErrorKind::Config, "guidance_scale must be >= 0");
    require(sigma >= 0.0, ErrorKind::Config, "sigma must be >= 0");
    swap_schedule().validate();
}

SwapSchedule EngineConfig::swap_schedule() const {
    SwapSchedule schedule;
    schedule.p0 = p0;
    schedule.t0 = t0;
    schedule.delta1 = delta1;
    schedule.delta2 = delta2;
    schedule.steps = steps;
    schedule.direction = direction;
    schedule.dynamic = enable_dynamic_control;
    return schedule;
}

LatentVideo init_noise(const LatentFrame& first_inverted, std::size_t frames) {
    require(frames >= 1, ErrorKind::Config, "frames must be >= 1");
    LatentVideo video(frames, first_inverted.dims());
    for (std::size_t m = 0; m < frames; ++m) video.set_frame(m, first_inverted);
    return video;
}

LatentVideo cfg_combine(const LatentVideo& eps_uncond, const LatentVideo& eps_cond, double scale) {
    require_same_shape(eps_uncond, eps_cond, "cfg_combine");
    LatentVideo out(eps_uncond.frames(), eps_uncond.dims());
    kernels::guidance_combine(out.values(), eps_uncond.values(), eps_cond.values(),
                              static_cast<float>(scale));
    return out;
}

LatentFrame draw_noise(const StreamKey& key, const Dims& dims) {
    Rng stream = derive_stream(key);
    LatentFrame eps(dims);
    fill_gaussian(eps.values(), stream);
    return eps;
}

bool guidance_used(const NoiseEstimator& estimator, double guidance_scale) {
    return estimator.supports_guidance() && guidance_scale != 1.0;
}

LatentVideo estimate_noise(NoiseEstimator& estimator, const LatentVideo& z, std::size_t t_train,
                           const PromptSpec& prompt, double guidance_scale, std::size_t& calls) {
    if (!guidance_used(estimator, guidance_scale)) {
        LatentVideo eps = estimator.estimate(z, t_train, prompt, true);
        ++calls;
        require_same_shape(z, eps, "estimator output");
        require_finite(eps, t_train);
        return eps;
    }
    LatentVideo uncond = estimator.estimate(z, t_train, prompt, false);
    ++calls;
    LatentVideo cond = estimator.estimate(z, t_train, prompt, true);
    ++calls;
    require_same_shape(z, uncond, "estimator output");
    require_same_shape(z, cond, "estimator output");
    require_finite(uncond, t_train);
    require_finite(cond, t_train);
    return cfg_combine(uncond, cond, guidance_scale);
}

std::vector<LatentFrame> invert_conditions(const NoiseSchedule& schedule,
                                           const ConditionSet& conditions, std::size_t k,
                                           std::size_t t_train, const EngineConfig& config) {
    std::vector<LatentFrame> inverted;
    inverted.reserve(conditions.size());
    const std::uint64_t noise_step = config.reuse_inversion_noise ? 0 : k;
    for (std::size_t n = 0; n < conditions.size(); ++n) {
        const LatentFrame& clean = conditions.latents[n];
        const LatentFrame eps =
            draw_noise({config.seed, StreamPurpose::InversionNoise, noise_step, 0, n}, clean.dims());
        inverted.push_back(invert(schedule, clean, t_train, eps));
    }
    return inverted;
}

RunResult run_flexti2v(const EngineConfig& config, const ConditionSet& conditions,
                       const PromptSpec& prompt, NoiseEstimator& estimator,
                       const NoiseSchedule& schedule, const TimestepMap& timesteps,
                       StepObserver* observer) {
    const auto run_start = Clock::now();
    config.validate();
    validate_conditions(conditions, config.frames);
    require(timesteps.steps() == config.steps, ErrorKind::Config,
            "timestep map has " + std::to_string(timesteps.steps()) + " steps, config " +
                std::to_string(config.steps));
    require(timesteps.tau(config.steps) <= schedule.train_steps(), ErrorKind::Config,
            "timestep map exceeds the schedule");
    if (estimator.requires_prompt() && guidance_used(estimator, config.guidance_scale)) {
        require(!prompt.text.empty(), ErrorKind::Config, "prompt text must be nonempty");
    }
    // sigma applies to every step but the terminal one, where 1 - alpha_bar(0) = 0.
    for (std::size_t k = config.steps; k >= 2; --k) {
        ddim_coefficients(schedule, timesteps.tau(k), timesteps.tau(k - 1), config.sigma);
    }

    const SwapSchedule swap = config.swap_schedule();
    const std::size_t K = config.steps;
    const Dims dims = conditions.latents.front().dims();

    RunResult result;
    {
        const std::uint64_t init_step = config.reuse_inversion_noise ? 0 : K;
        const StreamPurpose purpose = config.reuse_inversion_noise ? StreamPurpose::InversionNoise
                                                                   : StreamPurpose::InitNoise;
        const LatentFrame eps = draw_noise({config.seed, purpose, init_step, 0, 0}, dims);
        const LatentFrame first = invert(schedule, conditions.latents.front(), timesteps.tau(K), eps);
        result.video = init_noise(first, config.frames);
    }
    if (observer) observer->on_init(result.video);

    LatentVideo& z = result.video;
    for (std::size_t k = K; k >= 1; --k) {
        const auto step_start = Clock::now();
        const std::size_t t = timesteps.tau(k);
        const std::size_t t_prev = timesteps.tau(k - 1);
        try {
            const std::vector<LatentFrame> inverted =
                invert_conditions(schedule, conditions, k, t, config);

            if (config.enable_frame_replace) {
                frame_replace(z, inverted, conditions.positions);
                if (observer) observer->on_frame_replaced(k, z, inverted);
            }
            if (config.enable_rps) {
                apply_conditioning(z, inverted, conditions.positions, k, swap, config.seed);
                if (observer) observer->on_conditioned(k, z);
            }

            const LatentVideo eps_hat = estimate_noise(estimator, z, t, prompt,
                                                       config.guidance_scale,
                                                       result.estimator_calls);
            const double sigma = k >= 2 ? config.sigma : 0.0;
            if (sigma > 0.0) {
                LatentVideo noise(z.frames(), dims);
                for (std::size_t m = 0; m < z.frames(); ++m) {
                    const LatentFrame eps =
                        draw_noise({config.seed, StreamPurpose::StepNoise, k, m, 0}, dims);
                    noise.set_frame(m, eps);
                }
                z = ddim_step(schedule, z, eps_hat, t, t_prev, sigma, &noise);
            } else {
                z = ddim_step(schedule, z, eps_hat, t, t_prev, 0.0);
            }
        } catch (const Error& e) {
            throw e.with_context("step " + std::to_string(k) + " (t=" + std::to_string(t) + ")");
        }
        if (observer) observer->on_step(k, z);
        result.step_ms.push_back(elapsed_ms(step_start));
    }

    if (config.hard_replace_output) frame_replace(z, conditions.latents, conditions.positions);
    result.total_ms = elapsed_ms(run_start);
    return result;
}

}  // namespace flexti2v
