#include "flexti2v/app/metrics.hpp"

#include <cmath>
#include <limits>
#include <span>

#include "flexti2v/error.hpp"

namespace flexti2v::app {

namespace {

double mean_squared_difference(std::span<const float> a, std::span<const float> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += d * d;
    }
    return a.empty() ? 0.0 : sum / static_cast<double>(a.size());
}

}  // namespace

Metrics compute_metrics(const LatentVideo& video, const ConditionSet& conditions) {
    validate_conditions(conditions, video.frames());
    require_same_dims(video.dims(), conditions.latents.front().dims(), "metrics");

    Metrics metrics;
    double mse_sum = 0.0;
    for (std::size_t n = 0; n < conditions.size(); ++n) {
        mse_sum += mean_squared_difference(video.frame(conditions.positions[n]),
                                           conditions.latents[n].values());
    }
    metrics.mse_at_conditions = mse_sum / static_cast<double>(conditions.size());
    metrics.psnr_at_conditions =
        metrics.mse_at_conditions == 0.0
            ? std::numeric_limits<double>::infinity()
            : 10.0 * std::log10(kPsnrPeak * kPsnrPeak / metrics.mse_at_conditions);

    if (video.frames() >= 2) {
        double energy = 0.0;
        for (std::size_t m = 0; m + 1 < video.frames(); ++m) {
            energy += mean_squared_difference(video.frame(m + 1), video.frame(m));
        }
        metrics.temporal_energy = energy / static_cast<double>(video.frames() - 1);
    }
    return metrics;
}

}  // namespace flexti2v::app
