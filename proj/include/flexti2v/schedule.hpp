#pragma once

#include <cstddef>
#include <vector>

#include "flexti2v/tensor.hpp"

namespace flexti2v {

/// Variance schedule over training timesteps 1..T. Index 0 holds the clean
/// level: alpha_bar(0) == 1.
class NoiseSchedule {
public:
    /// Scaled-linear betas: (sqrt(b0) + (t-1)/(T-1) * (sqrt(b1) - sqrt(b0)))^2.
    static NoiseSchedule scaled_linear(double beta_start, double beta_end, std::size_t train_steps);

    /// Explicit betas for t = 1..betas.size(); each must lie in (0, 1).
    static NoiseSchedule from_betas(std::vector<double> betas);

    std::size_t train_steps() const noexcept { return betas_.size(); }

    double beta(std::size_t t) const;
    double alpha(std::size_t t) const;
    double alpha_bar(std::size_t t) const;

    const std::vector<double>& betas() const noexcept { return betas_; }

private:
    explicit NoiseSchedule(std::vector<double> betas);

    std::vector<double> betas_;
    std::vector<double> alpha_bars_;  // size T + 1, [0] = 1
};

inline constexpr double kDefaultBetaStart = 8.5e-4;
inline constexpr double kDefaultBetaEnd = 1.2e-2;
inline constexpr std::size_t kDefaultTrainSteps = 1000;

NoiseSchedule default_schedule();

/// DDIM sub-sequence tau_1 < ... < tau_K, tau_k = k * (T div K).
class TimestepMap {
public:
    static TimestepMap uniform(std::size_t train_steps, std::size_t steps);

    std::size_t steps() const noexcept { return taus_.size(); }

    /// Training timestep for DDIM step k in 1..K; k == 0 maps to 0.
    std::size_t tau(std::size_t k) const;

    const std::vector<std::size_t>& taus() const noexcept { return taus_; }

private:
    explicit TimestepMap(std::vector<std::size_t> taus) : taus_(std::move(taus)) {}

    std::vector<std::size_t> taus_;
};

/// Forward-diffusion closed form: sqrt(ab_t)*x0 + sqrt(1 - ab_t)*eps.
LatentFrame invert(const NoiseSchedule& schedule, const LatentFrame& x0, std::size_t t,
                   const LatentFrame& eps);

/// f32 coefficients of the DDIM update, computed in binary64 then rounded:
///   z_prev = scale*(z_t - noise*eps) + dir*eps + sigma*eps'
struct DdimCoefficients {
    float scale;  // sqrt(ab_prev) / sqrt(ab_t)
    float noise;  // sqrt(1 - ab_t)
    float dir;    // sqrt(1 - ab_prev - sigma^2)
    float sigma;
};

/// Throws ErrorKind::Config unless t > t_prev, sigma >= 0 and
/// sigma^2 <= 1 - ab_prev.
DdimCoefficients ddim_coefficients(const NoiseSchedule& schedule, std::size_t t,
                                   std::size_t t_prev, double sigma);

/// One DDIM update over a whole video. `eps_prime` is required iff sigma > 0.
LatentVideo ddim_step(const NoiseSchedule& schedule, const LatentVideo& z_t,
                      const LatentVideo& eps_hat, std::size_t t, std::size_t t_prev, double sigma,
                      const LatentVideo* eps_prime = nullptr);

}  // namespace flexti2v
