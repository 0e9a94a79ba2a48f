#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexti2v/codec.hpp"
#include "flexti2v/engine.hpp"
#include "flexti2v/estimator.hpp"

namespace flexti2v::app {

enum class ConditionFormat { Ppm, Ltn };

struct ConditionEntry {
    std::filesystem::path path;
    std::size_t position = 0;
    ConditionFormat format = ConditionFormat::Ppm;
};

enum class EstimatorKind { Dummy, Oracle, Remote };

struct EstimatorSpec {
    EstimatorKind kind = EstimatorKind::Dummy;
    std::string argument;  // oracle target path or remote endpoint
};

struct EmitFlags {
    bool frames = true;
    bool latents = true;
    bool metrics = true;
    bool timing = true;
};

/// Validated run description. Defaults reproduce the published sampler
/// settings (M=16, K=20, P0=0.3, t0=10, delta1=5e-3, delta2=0.3, guidance 9).
struct RunConfig {
    EngineConfig engine;
    double beta_start = kDefaultBetaStart;
    double beta_end = kDefaultBetaEnd;
    std::size_t train_steps = kDefaultTrainSteps;
    std::vector<ConditionEntry> conditions;
    Codec codec;
    PromptSpec prompt;
    EstimatorSpec estimator;
    std::filesystem::path output_dir = "out";
    EmitFlags emit;
};

/// Parses and validates a JSON config. Relative paths resolve against
/// `base_dir`. Errors name the offending key (ErrorKind::Parse for malformed
/// JSON or a non-object document, ErrorKind::Config for everything else).
RunConfig parse_config(std::span<const std::uint8_t> bytes,
                       const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

enum class Preset { Animation, Rewind, Interpolate, Outpaint };

std::optional<Preset> parse_preset(std::string_view name);

/// Condition positions for a preset with M frames: animation {0},
/// rewind {M-1}, interpolate {0, M-1}, outpaint {floor(M/2) - 1}.
std::vector<std::size_t> preset_positions(Preset preset, std::size_t frames);

/// Rewrites condition positions; the condition count must match the preset.
void apply_preset(RunConfig& config, Preset preset);

/// Re-checks cross-field constraints (positions, ranges) after overrides.
void validate(const RunConfig& config);

}  // namespace flexti2v::app
