#include "flexti2v/app/config.hpp"

#include <json.hpp>
#include <set>

#include "flexti2v/error.hpp"
#include "flexti2v/fileio.hpp"

namespace flexti2v::app {

namespace {

using json = nlohmann::json;

[[noreturn]] void key_fail(const std::string& key, const std::string& constraint) {
    fail(ErrorKind::Config, key + ": " + constraint);
}

void reject_unknown(const json& object, const std::set<std::string>& known,
                    const std::string& where) {
    for (const auto& item : object.items()) {
        if (!known.contains(item.key())) key_fail(where + item.key(), "unknown key");
    }
}

template <typename T>
T get_as(const json& value, const std::string& key, const char* type_name) {
    try {
        return value.get<T>();
    } catch (const json::exception&) {
        key_fail(key, std::string("expected ") + type_name);
    }
}

double get_number(const json& value, const std::string& key) {
    if (!value.is_number()) key_fail(key, "expected a number");
    return value.get<double>();
}

std::uint64_t get_unsigned(const json& value, const std::string& key) {
    if (!value.is_number_unsigned()) key_fail(key, "expected a non-negative integer");
    return value.get<std::uint64_t>();
}

bool get_bool(const json& value, const std::string& key) {
    if (!value.is_boolean()) key_fail(key, "expected true or false");
    return value.get<bool>();
}

std::string get_string(const json& value, const std::string& key) {
    if (!value.is_string()) key_fail(key, "expected a string");
    return value.get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& path) {
    std::filesystem::path p(path);
    return p.is_absolute() || base.empty() ? p : base / p;
}

ConditionFormat infer_format(const std::filesystem::path& path, const std::string& key) {
    const auto ext = path.extension().string();
    if (ext == ".ppm") return ConditionFormat::Ppm;
    if (ext == ".ltn") return ConditionFormat::Ltn;
    key_fail(key, "cannot infer format from extension; set \"format\" to ppm or ltn");
}

std::vector<ConditionEntry> parse_conditions(const json& value, const std::filesystem::path& base) {
    if (!value.is_array()) key_fail("conditions", "expected an array");
    std::vector<ConditionEntry> entries;
    for (std::size_t i = 0; i < value.size(); ++i) {
        const std::string where = "conditions[" + std::to_string(i) + "]";
        const json& item = value[i];
        if (!item.is_object()) key_fail(where, "expected an object");
        reject_unknown(item, {"path", "position", "format"}, where + ".");
        if (!item.contains("path")) key_fail(where + ".path", "required");
        if (!item.contains("position")) key_fail(where + ".position", "required");

        ConditionEntry entry;
        entry.path = resolve(base, get_string(item["path"], where + ".path"));
        entry.position = get_unsigned(item["position"], where + ".position");
        if (item.contains("format")) {
            const std::string format = get_string(item["format"], where + ".format");
            if (format == "ppm") {
                entry.format = ConditionFormat::Ppm;
            } else if (format == "ltn") {
                entry.format = ConditionFormat::Ltn;
            } else {
                key_fail(where + ".format", "must be ppm or ltn");
            }
        } else {
            entry.format = infer_format(entry.path, where + ".format");
        }
        if (!std::filesystem::exists(entry.path)) {
            key_fail(where + ".path", "file does not exist: " + entry.path.string());
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<float> get_floats(const json& value, const std::string& key) {
    if (!value.is_array()) key_fail(key, "expected an array of numbers");
    std::vector<float> out;
    for (const auto& v : value) out.push_back(static_cast<float>(get_number(v, key)));
    return out;
}

Codec parse_codec(const json& value) {
    if (!value.is_object()) key_fail("codec", "expected an object");
    reject_unknown(value, {"kind", "patch", "scale", "offset"}, "codec.");
    const std::string kind = value.contains("kind") ? get_string(value["kind"], "codec.kind")
                                                    : std::string("identity");
    Codec codec;
    if (kind == "identity") {
        if (value.contains("patch") || value.contains("scale") || value.contains("offset")) {
            key_fail("codec", "identity codec takes no patch/scale/offset");
        }
        return codec;
    }
    if (kind != "patchify") key_fail("codec.kind", "must be identity or patchify");
    codec.kind = CodecKind::Patchify;
    codec.patch = value.contains("patch") ? get_unsigned(value["patch"], "codec.patch") : 2;
    if (value.contains("scale")) codec.scale = get_floats(value["scale"], "codec.scale");
    if (value.contains("offset")) codec.offset = get_floats(value["offset"], "codec.offset");
    try {
        codec.validate();
    } catch (const Error& e) {
        throw e.with_context("codec");
    }
    return codec;
}

EstimatorSpec parse_estimator(const std::string& text, const std::filesystem::path& base) {
    if (text == "dummy") return {EstimatorKind::Dummy, {}};
    if (text.starts_with("oracle:")) {
        const auto path = resolve(base, text.substr(7));
        if (text.size() == 7) key_fail("estimator", "oracle needs a target path");
        if (!std::filesystem::exists(path)) {
            key_fail("estimator", "oracle target does not exist: " + path.string());
        }
        return {EstimatorKind::Oracle, path.string()};
    }
    if (text.starts_with("remote:")) {
        if (text.size() == 7) key_fail("estimator", "remote needs an endpoint");
        return {EstimatorKind::Remote, text.substr(7)};
    }
    key_fail("estimator", "must be dummy, oracle:<path> or remote:<endpoint>");
}

EmitFlags parse_emit(const json& value) {
    if (!value.is_object()) key_fail("emit", "expected an object");
    reject_unknown(value, {"frames", "latents", "metrics", "timing"}, "emit.");
    EmitFlags emit;
    if (value.contains("frames")) emit.frames = get_bool(value["frames"], "emit.frames");
    if (value.contains("latents")) emit.latents = get_bool(value["latents"], "emit.latents");
    if (value.contains("metrics")) emit.metrics = get_bool(value["metrics"], "emit.metrics");
    if (value.contains("timing")) emit.timing = get_bool(value["timing"], "emit.timing");
    return emit;
}

const std::set<std::string> kTopLevelKeys = {
    "prompt", "negative_prompt", "frames", "steps", "p0", "t0", "delta1", "delta2",
    "guidance_scale", "sigma", "seed", "beta_start", "beta_end", "train_steps",
    "enable_frame_replace", "enable_rps", "enable_dynamic_control", "hard_replace_output",
    "reuse_inversion_noise", "swap_direction", "conditions", "codec", "estimator", "output_dir",
    "emit",
};

}  // namespace

RunConfig parse_config(std::span<const std::uint8_t> bytes, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        fail(ErrorKind::Parse, std::string("malformed config JSON: ") + e.what());
    }
    if (!doc.is_object()) fail(ErrorKind::Parse, "config must be a JSON object");
    reject_unknown(doc, kTopLevelKeys, "");

    RunConfig config;
    EngineConfig& engine = config.engine;
    if (doc.contains("prompt")) config.prompt.text = get_string(doc["prompt"], "prompt");
    if (doc.contains("negative_prompt")) {
        config.prompt.negative = get_string(doc["negative_prompt"], "negative_prompt");
    }
    if (doc.contains("frames")) engine.frames = get_unsigned(doc["frames"], "frames");
    if (doc.contains("steps")) engine.steps = get_unsigned(doc["steps"], "steps");
    if (doc.contains("p0")) engine.p0 = get_number(doc["p0"], "p0");
    if (doc.contains("t0")) engine.t0 = get_number(doc["t0"], "t0");
    if (doc.contains("delta1")) engine.delta1 = get_number(doc["delta1"], "delta1");
    if (doc.contains("delta2")) engine.delta2 = get_number(doc["delta2"], "delta2");
    if (doc.contains("guidance_scale")) {
        engine.guidance_scale = get_number(doc["guidance_scale"], "guidance_scale");
    }
    if (doc.contains("sigma")) engine.sigma = get_number(doc["sigma"], "sigma");
    if (doc.contains("seed")) engine.seed = get_unsigned(doc["seed"], "seed");
    if (doc.contains("beta_start")) config.beta_start = get_number(doc["beta_start"], "beta_start");
    if (doc.contains("beta_end")) config.beta_end = get_number(doc["beta_end"], "beta_end");
    if (doc.contains("train_steps")) {
        config.train_steps = get_unsigned(doc["train_steps"], "train_steps");
    }
    if (doc.contains("enable_frame_replace")) {
        engine.enable_frame_replace = get_bool(doc["enable_frame_replace"], "enable_frame_replace");
    }
    if (doc.contains("enable_rps")) engine.enable_rps = get_bool(doc["enable_rps"], "enable_rps");
    if (doc.contains("enable_dynamic_control")) {
        engine.enable_dynamic_control =
            get_bool(doc["enable_dynamic_control"], "enable_dynamic_control");
    }
    if (doc.contains("hard_replace_output")) {
        engine.hard_replace_output = get_bool(doc["hard_replace_output"], "hard_replace_output");
    }
    if (doc.contains("reuse_inversion_noise")) {
        engine.reuse_inversion_noise =
            get_bool(doc["reuse_inversion_noise"], "reuse_inversion_noise");
    }
    if (doc.contains("swap_direction")) {
        const std::string direction = get_string(doc["swap_direction"], "swap_direction");
        if (direction == "per-alg1") {
            engine.direction = SwapDirection::PerAlgorithm;
        } else if (direction == "inverted") {
            engine.direction = SwapDirection::Inverted;
        } else {
            key_fail("swap_direction", "must be per-alg1 or inverted");
        }
    }
    if (!doc.contains("conditions")) key_fail("conditions", "required");
    config.conditions = parse_conditions(doc["conditions"], base_dir);
    if (doc.contains("codec")) config.codec = parse_codec(doc["codec"]);
    if (!doc.contains("estimator")) key_fail("estimator", "required");
    config.estimator = parse_estimator(get_string(doc["estimator"], "estimator"), base_dir);
    if (doc.contains("output_dir")) {
        config.output_dir = resolve(base_dir, get_string(doc["output_dir"], "output_dir"));
    } else {
        config.output_dir = resolve(base_dir, "out");
    }
    if (doc.contains("emit")) config.emit = parse_emit(doc["emit"]);

    validate(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    const Bytes bytes = read_file(path);
    return parse_config(bytes, path.parent_path());
}

void validate(const RunConfig& config) {
    const EngineConfig& engine = config.engine;
    if (engine.frames < 1) key_fail("frames", "must be >= 1");
    if (engine.steps < 1) key_fail("steps", "must be >= 1");
    if (engine.p0 < 0.0 || engine.p0 > 1.0) key_fail("p0", "must lie in [0, 1]");
    if (engine.t0 < 0.0) key_fail("t0", "must be >= 0");
    if (engine.delta1 < 0.0) key_fail("delta1", "must be >= 0");
    if (engine.delta2 < 0.0) key_fail("delta2", "must be >= 0");
    if (engine.guidance_scale < 0.0) key_fail("guidance_scale", "must be >= 0");
    if (engine.sigma < 0.0) key_fail("sigma", "must be >= 0");
    if (config.train_steps < 1) key_fail("train_steps", "must be >= 1");
    if (engine.steps > config.train_steps) key_fail("steps", "must not exceed train_steps");
    if (!(config.beta_start > 0.0 && config.beta_start <= config.beta_end &&
          config.beta_end < 1.0)) {
        key_fail("beta_start", "need 0 < beta_start <= beta_end < 1");
    }
    if (config.conditions.empty()) key_fail("conditions", "at least one condition is required");
    for (std::size_t n = 0; n < config.conditions.size(); ++n) {
        const std::size_t p = config.conditions[n].position;
        const std::string key = "conditions[" + std::to_string(n) + "].position";
        if (p >= engine.frames) key_fail(key, "position out of range");
        if (n > 0 && config.conditions[n - 1].position >= p) {
            key_fail(key, "positions strictly increasing");
        }
    }
    const bool text_needed = config.estimator.kind != EstimatorKind::Oracle;
    if (text_needed && config.prompt.text.empty()) key_fail("prompt", "must be nonempty");
}

std::optional<Preset> parse_preset(std::string_view name) {
    if (name == "animation") return Preset::Animation;
    if (name == "rewind") return Preset::Rewind;
    if (name == "interpolate") return Preset::Interpolate;
    if (name == "outpaint") return Preset::Outpaint;
    return std::nullopt;
}

std::vector<std::size_t> preset_positions(Preset preset, std::size_t frames) {
    require(frames >= 1, ErrorKind::Config, "frames must be >= 1");
    switch (preset) {
        case Preset::Animation: return {0};
        case Preset::Rewind: return {frames - 1};
        case Preset::Interpolate:
            require(frames >= 2, ErrorKind::Config, "interpolate needs at least 2 frames");
            return {0, frames - 1};
        case Preset::Outpaint: return {frames >= 2 ? frames / 2 - 1 : 0};
    }
    return {};
}

void apply_preset(RunConfig& config, Preset preset) {
    const auto positions = preset_positions(preset, config.engine.frames);
    if (config.conditions.size() != positions.size()) {
        key_fail("conditions", "preset needs exactly " + std::to_string(positions.size()) +
                                   " condition(s), config has " +
                                   std::to_string(config.conditions.size()));
    }
    for (std::size_t n = 0; n < positions.size(); ++n) config.conditions[n].position = positions[n];
    validate(config);
}

}  // namespace flexti2v::app
