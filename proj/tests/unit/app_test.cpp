#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "flexti2v/app/config.hpp"
#include "flexti2v/app/digest.hpp"
#include "flexti2v/app/metrics.hpp"
#include "flexti2v/app/runner.hpp"
#include "flexti2v/error.hpp"
#include "flexti2v/fileio.hpp"
#include "test_util.hpp"

using namespace flexti2v;
using namespace flexti2v::app;
using nlohmann::json;
using testutil::error_kind;
using testutil::error_message;

namespace fs = std::filesystem;

namespace {

Bytes text(const std::string& s) { return Bytes(s.begin(), s.end()); }

void write_text(const fs::path& path, const std::string& s) { std::ofstream(path) << s; }

// Writes a small gradient PPM and returns its path.
fs::path make_ppm(const testutil::TempDir& dir, const std::string& name, int shade) {
    Raster r(8, 8);
    for (std::size_t k = 0; k < r.data.size(); ++k) {
        r.data[k] = static_cast<float>(((k * 7 + shade) % 255)) / 127.5f - 1.0f;
    }
    const fs::path path = dir / name;
    write_ppm(r, path);
    return path;
}

struct Workspace {
    testutil::TempDir dir{"app"};
    fs::path a;
    fs::path b;

    Workspace() {
        a = make_ppm(dir, "a.ppm", 10);
        b = make_ppm(dir, "b.ppm", 90);
    }

    fs::path config(const json& doc, const std::string& name = "config.json") const {
        const fs::path path = dir / name;
        write_text(path, doc.dump());
        return path;
    }

    json two_conditions() const {
        return {{"prompt", "a red kite"},
                {"conditions", json::array({{{"path", "a.ppm"}, {"position", 0}},
                                            {{"path", "b.ppm"}, {"position", 15}}})},
                {"estimator", "dummy"}};
    }
};

struct Cli {
    int code;
    std::string out;
    std::string err;
};

Cli cli(std::vector<std::string> args) {
    args.insert(args.begin(), "flexti2v");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out;
    std::ostringstream err;
    const int code = main_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::map<std::string, std::string> digests(const fs::path& dir) {
    std::map<std::string, std::string> result;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename() == "report.json") continue;
        result[e.path().filename().string()] = sha256_hex(read_file(e.path()));
    }
    return result;
}

}  // namespace

TEST_CASE("minimal config takes the published defaults") {
    Workspace ws;
    const json doc = {{"prompt", "x"},
                      {"conditions", json::array({{{"path", "a.ppm"}, {"position", 0}}})},
                      {"estimator", "dummy"}};
    const RunConfig c = parse_config(text(doc.dump()), ws.dir.path());
    CHECK(c.engine.frames == 16);
    CHECK(c.engine.steps == 20);
    CHECK(c.engine.p0 == 0.3);
    CHECK(c.engine.t0 == 10.0);
    CHECK(c.engine.delta1 == 0.005);
    CHECK(c.engine.delta2 == 0.3);
    CHECK(c.engine.guidance_scale == 9.0);
    CHECK(c.engine.sigma == 0.0);
    CHECK(c.train_steps == 1000);
    CHECK(c.conditions.size() == 1);
    CHECK(c.conditions[0].path == ws.a);
    CHECK(c.conditions[0].format == ConditionFormat::Ppm);
    CHECK(c.estimator.kind == EstimatorKind::Dummy);
    CHECK(c.engine.direction == SwapDirection::PerAlgorithm);
}

TEST_CASE("config options are read") {
    Workspace ws;
    json doc = ws.two_conditions();
    doc["steps"] = 10;
    doc["frames"] = 24;
    doc["seed"] = 7;
    doc["swap_direction"] = "inverted";
    doc["enable_rps"] = false;
    doc["negative_prompt"] = "blurry";
    doc["codec"] = {{"kind", "patchify"}, {"patch", 2}};
    doc["estimator"] = "remote:stdio:worker";
    doc["emit"] = {{"timing", false}};
    const RunConfig c = parse_config(text(doc.dump()), ws.dir.path());
    CHECK(c.engine.steps == 10);
    CHECK(c.engine.frames == 24);
    CHECK(c.engine.seed == 7);
    CHECK(c.engine.direction == SwapDirection::Inverted);
    CHECK_FALSE(c.engine.enable_rps);
    CHECK(c.prompt.negative == "blurry");
    CHECK(c.codec.kind == CodecKind::Patchify);
    CHECK(c.estimator.kind == EstimatorKind::Remote);
    CHECK(c.estimator.argument == "stdio:worker");
    CHECK_FALSE(c.emit.timing);
    CHECK(c.emit.frames);
}

TEST_CASE("config validation errors") {
    Workspace ws;
    auto parse = [&](const json& doc) { return parse_config(text(doc.dump()), ws.dir.path()); };

    json dup = ws.two_conditions();
    dup["conditions"][1]["position"] = 0;
    dup["conditions"][0]["position"] = 5;
    dup["conditions"][1]["position"] = 5;
    CHECK(error_message([&] { parse(dup); }).find("positions strictly increasing") != std::string::npos);
    CHECK(error_kind([&] { parse(dup); }) == ErrorKind::Config);

    json range = ws.two_conditions();
    range["conditions"][1]["position"] = 16;
    CHECK(error_message([&] { parse(range); }).find("position out of range") != std::string::npos);

    json unknown = ws.two_conditions();
    unknown["stpes"] = 3;
    CHECK(error_message([&] { parse(unknown); }).find("stpes: unknown key") != std::string::npos);

    json type = ws.two_conditions();
    type["steps"] = "twenty";
    CHECK(error_message([&] { parse(type); }).find("steps") != std::string::npos);

    json missing = ws.two_conditions();
    missing["conditions"][0]["path"] = "nope.ppm";
    CHECK(error_kind([&] { parse(missing); }) == ErrorKind::Config);

    json no_prompt = ws.two_conditions();
    no_prompt.erase("prompt");
    CHECK(error_kind([&] { parse(no_prompt); }) == ErrorKind::Config);

    json too_many_steps = ws.two_conditions();
    too_many_steps["steps"] = 2000;
    CHECK(error_kind([&] { parse(too_many_steps); }) == ErrorKind::Config);

    json bad_p0 = ws.two_conditions();
    bad_p0["p0"] = 2.0;
    CHECK(error_message([&] { parse(bad_p0); }).find("p0") != std::string::npos);

    json bad_estimator = ws.two_conditions();
    bad_estimator["estimator"] = "magic";
    CHECK(error_kind([&] { parse(bad_estimator); }) == ErrorKind::Config);

    CHECK(error_kind([&] { parse_config(text("{ not json"), ws.dir.path()); }) == ErrorKind::Parse);
    CHECK(error_kind([&] { parse_config(text("[]"), ws.dir.path()); }) == ErrorKind::Parse);

    json no_estimator = ws.two_conditions();
    no_estimator.erase("estimator");
    CHECK(error_message([&] { parse(no_estimator); }).find("estimator: required") != std::string::npos);
}

TEST_CASE("presets place conditions") {
    CHECK(parse_preset("animation") == Preset::Animation);
    CHECK_FALSE(parse_preset("cinema").has_value());
    CHECK(preset_positions(Preset::Animation, 16) == std::vector<std::size_t>{0});
    CHECK(preset_positions(Preset::Rewind, 16) == std::vector<std::size_t>{15});
    CHECK(preset_positions(Preset::Interpolate, 16) == std::vector<std::size_t>{0, 15});
    CHECK(preset_positions(Preset::Outpaint, 16) == std::vector<std::size_t>{7});
    CHECK(preset_positions(Preset::Outpaint, 9) == std::vector<std::size_t>{3});

    Workspace ws;
    RunConfig c = parse_config(text(ws.two_conditions().dump()), ws.dir.path());
    CHECK(error_kind([&] { apply_preset(c, Preset::Animation); }) == ErrorKind::Config);
    apply_preset(c, Preset::Interpolate);
    CHECK(c.conditions[1].position == 15);
}

TEST_CASE("metrics") {
    const Dims dims{1, 2, 2};
    ConditionSet conds{{LatentFrame(dims, 1.0f)}, {1}};
    LatentVideo video(3, dims, 0.0f);
    video.set_frame(1, conds.latents[0]);
    Metrics m = compute_metrics(video, conds);
    CHECK(m.mse_at_conditions == 0.0);
    CHECK(std::isinf(m.psnr_at_conditions));
    CHECK(m.temporal_energy == doctest::Approx(1.0));

    const LatentVideo constant(4, dims, 0.25f);
    CHECK(compute_metrics(constant, conds).temporal_energy == 0.0);

    LatentVideo two(2, dims, 0.0f);
    two.set_frame(1, LatentFrame(dims, 1.0f));
    CHECK(compute_metrics(two, ConditionSet{{LatentFrame(dims)}, {0}}).temporal_energy == 1.0);

    const LatentVideo half(2, dims, 0.5f);
    m = compute_metrics(half, ConditionSet{{LatentFrame(dims)}, {0}});
    CHECK(m.mse_at_conditions == 0.25);
    CHECK(m.psnr_at_conditions == doctest::Approx(10.0 * std::log10(4.0 / 0.25)));
}

TEST_CASE("sha256 digest") {
    CHECK(sha256_hex(text("abc")) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex({}) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("exit codes") {
    CHECK(exit_code(ErrorKind::Config) == 2);
    CHECK(exit_code(ErrorKind::Parse) == 2);
    CHECK(exit_code(ErrorKind::Dimension) == 3);
    CHECK(exit_code(ErrorKind::Domain) == 3);
    CHECK(exit_code(ErrorKind::Worker) == 3);
    CHECK(exit_code(ErrorKind::Transport) == 4);
    CHECK(exit_code(ErrorKind::Protocol) == 4);
}

TEST_CASE("run writes frames, latents, metrics and a manifest") {
    Workspace ws;
    const fs::path out = ws.dir / "out";
    const Cli r = cli({"run", "--config", ws.config(ws.two_conditions()).string(), "--out", out.string()});
    REQUIRE(r.code == 0);
    for (int m = 0; m < 16; ++m) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03d.ppm", m);
        CHECK(fs::exists(out / name));
    }
    const LatentVideo latents = read_ltn(out / "latents.ltn");
    CHECK(latents.frames() == 16);
    CHECK(latents.dims() == Dims{3, 8, 8});

    const json report = json::parse(r.out);
    CHECK(report["estimator_calls"] == 40);
    CHECK(report["manifest"].size() == 18);
    for (const auto& entry : report["manifest"]) {
        const fs::path file = out / entry["file"].get<std::string>();
        CHECK(sha256_hex(read_file(file)) == entry["sha256"]);
    }
    CHECK(json::parse(read_file(out / "report.json")) == report);
    const json metrics = json::parse(read_file(out / "metrics.json"));
    CHECK(metrics.contains("mse_at_conditions"));
    CHECK(metrics.contains("temporal_energy"));
}

TEST_CASE("identical invocations give identical digests") {
    Workspace ws;
    const fs::path config = ws.config(ws.two_conditions());
    REQUIRE(cli({"run", "--config", config.string(), "--out", (ws.dir / "o1").string()}).code == 0);
    REQUIRE(cli({"run", "--config", config.string(), "--out", (ws.dir / "o2").string()}).code == 0);
    REQUIRE(cli({"run", "--config", config.string(), "--out", (ws.dir / "o3").string(), "--seed", "5"}).code == 0);
    const auto d1 = digests(ws.dir / "o1");
    CHECK(d1.size() == 18);
    CHECK(d1 == digests(ws.dir / "o2"));
    const auto d3 = digests(ws.dir / "o3");
    CHECK(d3.at("latents.ltn") != d1.at("latents.ltn"));
    CHECK(d3.at("frame_007.ppm") != d1.at("frame_007.ppm"));
}

TEST_CASE("oracle config recovers the conditions") {
    Workspace ws;
    const Codec identity;
    LatentVideo target(16, {3, 8, 8}, testutil::normals(16 * 192, 4));
    target.set_frame(0, encode(read_ppm(ws.a), identity));
    target.set_frame(15, encode(read_ppm(ws.b), identity));
    write_ltn(target, ws.dir / "target.ltn");

    json doc = ws.two_conditions();
    doc.erase("prompt");
    doc["estimator"] = "oracle:target.ltn";
    doc["hard_replace_output"] = true;
    const RunConfig config = parse_config(text(doc.dump()), ws.dir.path());
    RunConfig c = config;
    c.output_dir = ws.dir / "oracle_out";
    const RunReport report = run(c);
    CHECK(report.metrics.mse_at_conditions <= 1e-6);
    CHECK(report.estimator_calls == 20);
}

TEST_CASE("ltn conditions and all presets") {
    Workspace ws;
    write_ltn(LatentVideo(1, {3, 8, 8}, testutil::normals(192, 9)), ws.dir / "c.ltn");
    json doc = {{"prompt", "p"},
                {"conditions", json::array({{{"path", "c.ltn"}, {"position", 0}}})},
                {"estimator", "dummy"},
                {"hard_replace_output", true}};
    const fs::path config = ws.config(doc);
    for (const char* preset : {"animation", "rewind", "outpaint"}) {
        CAPTURE(preset);
        const fs::path out = ws.dir / preset;
        const Cli r = cli({"run", "--config", config.string(), "--preset", preset, "--out", out.string()});
        REQUIRE(r.code == 0);
        CHECK(json::parse(r.out)["metrics"]["mse_at_conditions"] == 0.0);
        CHECK(json::parse(r.out)["metrics"]["psnr_at_conditions"] == "inf");
    }
    const Cli bad = cli({"run", "--config", config.string(), "--preset", "interpolate"});
    CHECK(bad.code == 2);
    const Cli unknown = cli({"run", "--config", config.string(), "--preset", "cinema"});
    CHECK(unknown.code == 2);
}

TEST_CASE("inspect-schedule table") {
    Workspace ws;
    const Cli r = cli({"inspect-schedule", "--config", ws.config(ws.two_conditions()).string()});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "m,n,t,P,t_tilde,active");
    std::set<std::string> rows;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        rows.insert(line);
        ++count;
    }
    CHECK(count == 16 * 2 * 20);
    CHECK(rows.contains("15,0,5,0.225,5.5,0"));  // frame 15 is itself a condition
    CHECK(rows.contains("15,0,6,0,5.5,0"));
    CHECK(rows.contains("0,0,5,0.3,10,0"));
    CHECK(rows.contains("7,0,7,0.265,7.9,1"));
    CHECK(rows.contains("7,0,8,0,7.9,0"));
}

TEST_CASE("dead remote endpoint leaves nothing behind") {
    Workspace ws;
    json doc = ws.two_conditions();
    doc["estimator"] = "remote:tcp:127.0.0.1:1";
    const fs::path out = ws.dir / "dead";
    const Cli r = cli({"run", "--config", ws.config(doc).string(), "--out", out.string()});
    CHECK(r.code == 4);
    const json err = json::parse(r.err);
    CHECK(err["status"] == "transport failure");
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("worker failure mid-run leaves nothing behind") {
    Workspace ws;
    json doc = ws.two_conditions();
    doc["estimator"] = std::string("remote:stdio:'") + WIRE_PEER_PATH + "' error";
    const fs::path out = ws.dir / "failed";
    const Cli r = cli({"run", "--config", ws.config(doc).string(), "--out", out.string()});
    CHECK(r.code == 3);
    CHECK(json::parse(r.err)["message"].get<std::string>().find("oom") != std::string::npos);
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("remote worker run matches the in-process run") {
    Workspace ws;
    const fs::path local_out = ws.dir / "local";
    const fs::path remote_out = ws.dir / "remote";
    REQUIRE(cli({"run", "--config", ws.config(ws.two_conditions(), "l.json").string(), "--out", local_out.string()}).code == 0);

    json doc = ws.two_conditions();
    doc["estimator"] = "remote:tcp:127.0.0.1:1";
    ::setenv("FLEXTI2V_WORKER", (std::string("stdio:'") + WIRE_PEER_PATH + "'").c_str(), 1);
    const Cli r = cli({"run", "--config", ws.config(doc, "r.json").string(), "--out", remote_out.string()});
    ::unsetenv("FLEXTI2V_WORKER");
    REQUIRE(r.code == 0);
    CHECK(digests(local_out) == digests(remote_out));
}

TEST_CASE("command line binary") {
    Workspace ws;
    const std::string bin = FLEXTI2V_CLI_PATH;
    auto status = [](const std::string& cmd) {
        const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    };
    CHECK(status(bin + " --help") == 0);
    CHECK(status(bin) == 2);
    CHECK(status(bin + " run") == 2);
    CHECK(status(bin + " run --config /nonexistent.json") == 3);

    json bad = ws.two_conditions();
    bad["frames"] = 0;
    CHECK(status(bin + " run --config " + ws.config(bad).string()) == 2);

    const fs::path out = ws.dir / "bin_out";
    CHECK(status(bin + " run --config " + ws.config(ws.two_conditions(), "ok.json").string() + " --out " +
                 out.string()) == 0);
    CHECK(fs::exists(out / "latents.ltn"));
}
