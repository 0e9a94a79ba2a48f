#include "flexti2v/app/runner.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <ostream>
#include <sstream>

#include "flexti2v/app/digest.hpp"
#include "flexti2v/engine.hpp"
#include "flexti2v/error.hpp"
#include "flexti2v/fileio.hpp"
#include "flexti2v/kernels/kernels.hpp"
#include "flexti2v/remote.hpp"

namespace flexti2v::app {

namespace {

using json = nlohmann::json;

std::string frame_name(std::size_t m) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03zu.ppm", m);
    return name;
}

std::string format_real(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value);
    return buffer;
}

json number_or_inf(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return value;
}

std::vector<std::size_t> positions_of(const RunConfig& config) {
    std::vector<std::size_t> positions;
    for (const auto& entry : config.conditions) positions.push_back(entry.position);
    return positions;
}

}  // namespace

ConditionSet load_conditions(const RunConfig& config) {
    ConditionSet set;
    for (const auto& entry : config.conditions) {
        if (entry.format == ConditionFormat::Ppm) {
            set.latents.push_back(encode(read_ppm(entry.path), config.codec));
        } else {
            const LatentVideo video = read_ltn(entry.path);
            if (video.frames() != 1) {
                fail(ErrorKind::Config, entry.path.string() + ": condition LTN must hold 1 frame, has " +
                                            std::to_string(video.frames()));
            }
            set.latents.push_back(video.frame_copy(0));
        }
        set.positions.push_back(entry.position);
    }
    validate_conditions(set, config.engine.frames);
    return set;
}

std::unique_ptr<NoiseEstimator> make_estimator(const RunConfig& config,
                                               const NoiseSchedule& schedule,
                                               const ConditionSet& conditions) {
    switch (config.estimator.kind) {
        case EstimatorKind::Dummy: return std::make_unique<DummyEstimator>();
        case EstimatorKind::Oracle: {
            LatentVideo target = read_ltn(config.estimator.argument);
            if (target.frames() != config.engine.frames ||
                target.dims() != conditions.latents.front().dims()) {
                fail(ErrorKind::Config, "oracle target shape (" + std::to_string(target.frames()) +
                                            "," + to_string(target.dims()) +
                                            ") does not match the run");
            }
            return std::make_unique<OracleEstimator>(schedule, std::move(target));
        }
        case EstimatorKind::Remote: {
            std::string endpoint = config.estimator.argument;
            if (const char* forced = std::getenv("FLEXTI2V_WORKER"); forced && *forced) {
                endpoint = forced;
            }
            return connect_remote(endpoint);
        }
    }
    fail(ErrorKind::Config, "unknown estimator");
}

RunReport run(const RunConfig& config) {
    validate(config);
    const ConditionSet conditions = load_conditions(config);
    const Dims dims = conditions.latents.front().dims();
    if (config.emit.frames && !config.codec.can_decode(dims)) {
        fail(ErrorKind::Config, "emit.frames: latent dims " + to_string(dims) +
                                    " cannot be decoded by the configured codec");
    }

    const NoiseSchedule schedule =
        NoiseSchedule::scaled_linear(config.beta_start, config.beta_end, config.train_steps);
    const TimestepMap timesteps = TimestepMap::uniform(config.train_steps, config.engine.steps);
    auto estimator = make_estimator(config, schedule, conditions);

    RunResult result = run_flexti2v(config.engine, conditions, config.prompt, *estimator, schedule,
                                    timesteps);
    if (auto* remote = dynamic_cast<RemoteEstimator*>(estimator.get())) remote->shutdown();

    RunReport report;
    report.step_ms = result.step_ms;
    report.total_ms = result.total_ms;
    report.estimator_calls = result.estimator_calls;
    report.metrics = compute_metrics(result.video, conditions);

    std::vector<std::pair<std::string, Bytes>> files;
    if (config.emit.frames) {
        for (std::size_t m = 0; m < result.video.frames(); ++m) {
            files.emplace_back(frame_name(m),
                               serialize_ppm(decode(result.video.frame_copy(m), config.codec)));
        }
    }
    if (config.emit.latents) files.emplace_back("latents.ltn", serialize_ltn(result.video));
    if (config.emit.metrics) {
        const json metrics = {
            {"mse_at_conditions", report.metrics.mse_at_conditions},
            {"psnr_at_conditions", number_or_inf(report.metrics.psnr_at_conditions)},
            {"temporal_energy", report.metrics.temporal_energy},
        };
        const std::string text = metrics.dump(2) + "\n";
        files.emplace_back("metrics.json", Bytes(text.begin(), text.end()));
    }

    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    if (ec) fail(ErrorKind::Io, "cannot create " + config.output_dir.string() + ": " + ec.message());
    for (const auto& [name, bytes] : files) {
        write_file_atomic(config.output_dir / name, bytes);
        report.manifest.push_back({name, sha256_hex(bytes), bytes.size()});
    }
    const std::string text = report_json(report, config);
    write_file_atomic(config.output_dir / "report.json", Bytes(text.begin(), text.end()));
    return report;
}

std::string report_json(const RunReport& report, const RunConfig& config) {
    json doc;
    doc["frames"] = config.engine.frames;
    doc["steps"] = config.engine.steps;
    doc["seed"] = config.engine.seed;
    doc["kernels"] = std::string(kernels::to_string(kernels::active().isa));
    doc["estimator_calls"] = report.estimator_calls;
    doc["metrics"] = {
        {"mse_at_conditions", report.metrics.mse_at_conditions},
        {"psnr_at_conditions", number_or_inf(report.metrics.psnr_at_conditions)},
        {"temporal_energy", report.metrics.temporal_energy},
    };
    if (config.emit.timing) {
        double sum = 0.0;
        for (double ms : report.step_ms) sum += ms;
        doc["timing"] = {
            {"step_ms", report.step_ms},
            {"mean_step_ms", report.step_ms.empty() ? 0.0 : sum / report.step_ms.size()},
            {"total_ms", report.total_ms},
        };
    }
    json manifest = json::array();
    for (const auto& entry : report.manifest) {
        manifest.push_back({{"file", entry.file}, {"sha256", entry.sha256}, {"bytes", entry.bytes}});
    }
    doc["manifest"] = manifest;
    return doc.dump(2) + "\n";
}

std::string inspect_schedule(const RunConfig& config) {
    validate(config);
    const SwapSchedule swap = config.engine.swap_schedule();
    swap.validate();
    const std::vector<std::size_t> positions = positions_of(config);

    std::ostringstream csv;
    csv << "m,n,t,P,t_tilde,active\n";
    for (std::size_t m = 0; m < config.engine.frames; ++m) {
        const BoundIndices bound = bound_index(m, positions);
        const bool on_condition = std::binary_search(positions.begin(), positions.end(), m);
        for (std::size_t n = 0; n < positions.size(); ++n) {
            const std::size_t dist = m > positions[n] ? m - positions[n] : positions[n] - m;
            const double t_tilde = swap_window(dist, swap);
            const bool bounded = std::find(bound.begin(), bound.end(), n) != bound.end();
            for (std::size_t t = 1; t <= config.engine.steps; ++t) {
                const double p = swap_fraction(m, n, t, swap, positions);
                const bool active =
                    config.engine.enable_rps && bounded && !on_condition && p > 0.0;
                csv << m << ',' << n << ',' << t << ',' << format_real(p) << ','
                    << format_real(t_tilde) << ',' << (active ? 1 : 0) << '\n';
            }
        }
    }
    return csv.str();
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config:
        case ErrorKind::Parse: return 2;
        case ErrorKind::Transport:
        case ErrorKind::Protocol: return 4;
        case ErrorKind::Dimension:
        case ErrorKind::Domain:
        case ErrorKind::Io:
        case ErrorKind::Worker: return 3;
    }
    return 3;
}

int main_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App cli{"Training-free image-conditioned video latent sampler"};
    cli.name("flexti2v");
    cli.require_subcommand(1);

    std::string config_path;
    std::string preset_name;
    std::string out_dir;
    std::uint64_t seed = 0;

    auto* run_cmd = cli.add_subcommand("run", "Run the sampler and write outputs");
    run_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
    run_cmd->add_option("--preset", preset_name,
                        "Condition placement: animation|rewind|interpolate|outpaint");
    run_cmd->add_option("--out", out_dir, "Output directory (overrides config)");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "Random seed (overrides config)");

    auto* inspect_cmd =
        cli.add_subcommand("inspect-schedule", "Print the swap schedule table as CSV");
    inspect_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
    inspect_cmd->add_option("--preset", preset_name, "Condition placement preset");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream help;
        const int code = cli.exit(e, help, help);
        (code == 0 ? out : err) << help.str();
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig config = load_config(config_path);
        if (!preset_name.empty()) {
            const auto preset = parse_preset(preset_name);
            if (!preset) fail(ErrorKind::Config, "--preset: unknown preset '" + preset_name + "'");
            apply_preset(config, *preset);
        }
        if (inspect_cmd->parsed()) {
            out << inspect_schedule(config);
            return 0;
        }
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (seed_opt->count() > 0) config.engine.seed = seed;
        const RunReport report = run(config);
        out << report_json(report, config);
        return 0;
    } catch (const Error& e) {
        const json message = {{"status", std::string(to_string(e.kind()))}, {"message", e.what()}};
        err << message.dump() << '\n';
        return exit_code(e.kind());
    }
}

}  // namespace flexti2v::app
