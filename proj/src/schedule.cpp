#include "flexti2v/schedule.hpp"

#include <cmath>
#include <string>

#include "flexti2v/error.hpp"
#include "flexti2v/kernels/kernels.hpp"

namespace flexti2v {

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
    require(!betas_.empty(), ErrorKind::Config, "schedule needs at least one training step");
    alpha_bars_.reserve(betas_.size() + 1);
    alpha_bars_.push_back(1.0);
    double product = 1.0;
    for (std::size_t i = 0; i < betas_.size(); ++i) {
        const double b = betas_[i];
        require(b > 0.0 && b < 1.0, ErrorKind::Config,
                "beta_" + std::to_string(i + 1) + " outside (0, 1)");
        product *= 1.0 - b;
        alpha_bars_.push_back(product);
    }
}

NoiseSchedule NoiseSchedule::scaled_linear(double beta_start, double beta_end,
                                           std::size_t train_steps) {
    require(train_steps >= 1, ErrorKind::Config, "train_steps must be >= 1");
    require(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0, ErrorKind::Config,
            "beta range must satisfy 0 < beta_start <= beta_end < 1");
    const double lo = std::sqrt(beta_start);
    const double hi = std::sqrt(beta_end);
    std::vector<double> betas(train_steps);
    for (std::size_t t = 1; t <= train_steps; ++t) {
        const double frac = train_steps == 1
                                ? 0.0
                                : static_cast<double>(t - 1) / static_cast<double>(train_steps - 1);
        const double root = lo + frac * (hi - lo);
        betas[t - 1] = root * root;
    }
    return NoiseSchedule(std::move(betas));
}

NoiseSchedule NoiseSchedule::from_betas(std::vector<double> betas) {
    return NoiseSchedule(std::move(betas));
}

double NoiseSchedule::beta(std::size_t t) const {
    require(t >= 1 && t <= betas_.size(), ErrorKind::Config,
            "timestep " + std::to_string(t) + " outside 1.." + std::to_string(betas_.size()));
    return betas_[t - 1];
}

double NoiseSchedule::alpha(std::size_t t) const {
    return 1.0 - beta(t);
}

double NoiseSchedule::alpha_bar(std::size_t t) const {
    require(t < alpha_bars_.size(), ErrorKind::Config,
            "timestep " + std::to_string(t) + " outside 0.." + std::to_string(betas_.size()));
    return alpha_bars_[t];
}

NoiseSchedule default_schedule() {
    return NoiseSchedule::scaled_linear(kDefaultBetaStart, kDefaultBetaEnd, kDefaultTrainSteps);
}

TimestepMap TimestepMap::uniform(std::size_t train_steps, std::size_t steps) {
    require(steps >= 1, ErrorKind::Config, "sampling steps must be >= 1");
    require(steps <= train_steps, ErrorKind::Config,
            "sampling steps " + std::to_string(steps) + " exceed training steps " +
                std::to_string(train_steps));
    const std::size_t stride = train_steps / steps;
    std::vector<std::size_t> taus(steps);
    for (std::size_t k = 1; k <= steps; ++k) taus[k - 1] = k * stride;
    return TimestepMap(std::move(taus));
}

std::size_t TimestepMap::tau(std::size_t k) const {
    if (k == 0) return 0;
    require(k <= taus_.size(), ErrorKind::Config,
            "step " + std::to_string(k) + " outside 1.." + std::to_string(taus_.size()));
    return taus_[k - 1];
}

LatentFrame invert(const NoiseSchedule& schedule, const LatentFrame& x0, std::size_t t,
                   const LatentFrame& eps) {
    require_same_dims(x0.dims(), eps.dims(), "invert");
    const double ab = schedule.alpha_bar(t);
    LatentFrame out(x0.dims());
    kernels::axpby(out.values(), x0.values(), eps.values(), static_cast<float>(std::sqrt(ab)),
                   static_cast<float>(std::sqrt(1.0 - ab)));
    return out;
}

DdimCoefficients ddim_coefficients(const NoiseSchedule& schedule, std::size_t t,
                                   std::size_t t_prev, double sigma) {
    require(t > t_prev, ErrorKind::Config,
            "ddim step needs t > t_prev (got " + std::to_string(t) + ", " +
                std::to_string(t_prev) + ")");
    require(sigma >= 0.0, ErrorKind::Config, "sigma must be >= 0");
    const double ab_t = schedule.alpha_bar(t);
    const double ab_prev = schedule.alpha_bar(t_prev);
    const double dir_sq = 1.0 - ab_prev - sigma * sigma;
    require(dir_sq >= 0.0, ErrorKind::Config,
            "sigma^2 exceeds 1 - alpha_bar at t_prev=" + std::to_string(t_prev));
    return {
        static_cast<float>(std::sqrt(ab_prev) / std::sqrt(ab_t)),
        static_cast<float>(std::sqrt(1.0 - ab_t)),
        static_cast<float>(std::sqrt(dir_sq)),
        static_cast<float>(sigma),
    };
}

LatentVideo ddim_step(const NoiseSchedule& schedule, const LatentVideo& z_t,
                      const LatentVideo& eps_hat, std::size_t t, std::size_t t_prev, double sigma,
                      const LatentVideo* eps_prime) {
    require_same_shape(z_t, eps_hat, "ddim_step");
    const DdimCoefficients c = ddim_coefficients(schedule, t, t_prev, sigma);
    if (sigma > 0.0) {
        require(eps_prime != nullptr, ErrorKind::Config, "sigma > 0 needs sampling noise");
        require_same_shape(z_t, *eps_prime, "ddim_step noise");
    }

    LatentVideo out(z_t.frames(), z_t.dims());
    kernels::ddim_combine(out.values(), z_t.values(), eps_hat.values(), c.scale, c.noise, c.dir);
    if (sigma > 0.0) {
        kernels::axpby(out.values(), out.values(), eps_prime->values(), 1.0f, c.sigma);
    }
    return out;
}

}  // namespace flexti2v
