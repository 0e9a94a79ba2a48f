#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "flexti2v/app/config.hpp"
#include "flexti2v/app/metrics.hpp"
#include "flexti2v/error.hpp"
#include "flexti2v/estimator.hpp"
#include "flexti2v/schedule.hpp"

namespace flexti2v::app {

struct ManifestEntry {
    std::string file;  // relative to the output directory
    std::string sha256;
    std::size_t bytes = 0;
};

struct RunReport {
    std::vector<double> step_ms;
    double total_ms = 0.0;
    std::size_t estimator_calls = 0;
    Metrics metrics;
    std::vector<ManifestEntry> manifest;
};

/// Reads every condition file; PPM inputs go through the configured codec.
ConditionSet load_conditions(const RunConfig& config);

/// Builds the configured estimator. FLEXTI2V_WORKER, when set, replaces the
/// endpoint of a remote estimator.
std::unique_ptr<NoiseEstimator> make_estimator(const RunConfig& config,
                                               const NoiseSchedule& schedule,
                                               const ConditionSet& conditions);

/// Runs the sampler and writes frame_NNN.ppm, latents.ltn, metrics.json and
/// report.json into the output directory. Nothing is written if the run fails.
RunReport run(const RunConfig& config);

std::string report_json(const RunReport& report, const RunConfig& config);

/// CSV with columns m,n,t,P,t_tilde,active for every frame, condition and
/// DDIM step. `active` is 1 when the engine performs that swap.
std::string inspect_schedule(const RunConfig& config);

/// Process exit status for an error: 2 config, 3 engine, 4 transport.
int exit_code(ErrorKind kind);

/// Entry point of the flexti2v command line tool.
int main_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace flexti2v::app
