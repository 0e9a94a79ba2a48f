#pragma once

#include "flexti2v/tensor.hpp"

namespace flexti2v::app {

/// Desk-scale fidelity and motion proxies in latent space.
struct Metrics {
    double mse_at_conditions = 0.0;   // mean over n of MSE(frame p_n, clean condition n)
    double psnr_at_conditions = 0.0;  // 10 log10(peak^2 / mse), +inf at mse == 0
    double temporal_energy = 0.0;     // mean over m of MSE(frame m+1, frame m)
};

inline constexpr double kPsnrPeak = 2.0;

Metrics compute_metrics(const LatentVideo& video, const ConditionSet& conditions);

}  // namespace flexti2v::app
