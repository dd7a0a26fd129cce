#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "colloidsim/config.hpp"
#include "colloidsim/csv_io.hpp"
#include "colloidsim/errors.hpp"
#include "colloidsim/svg_plot.hpp"
#include "colloidsim/version.hpp"

using namespace colloidsim;
namespace fs = std::filesystem;

namespace {

const fs::path kSourceDir = COLLOIDSIM_SOURCE_DIR;
const fs::path kBinaryDir = COLLOIDSIM_BINARY_DIR;

fs::path scratch_dir() {
    const fs::path dir = kBinaryDir / "test_scratch";
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args, const fs::path& outdir, std::string* stdout_text = nullptr) {
    const fs::path bin = kBinaryDir / "colloidsim";
    const fs::path log = scratch_dir() / "cli_stdout.txt";
    const std::string cmd = "COLLOIDSIM_OUTDIR='" + outdir.string() + "' '" + bin.string() +
                            "' " + args + " > '" + log.string() + "' 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    if (stdout_text) *stdout_text = read_file(log);
    return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("config parser accepts the shipped default config") {
    const RunConfig cfg = RunConfig::load(kSourceDir / "configs" / "default.cfg");
    CHECK(cfg.plan.n_cycles == 15);
    CHECK(cfg.plan.bell.levels() == 201);
    CHECK(cfg.plan.food.levels() == 301);
    CHECK(cfg.plan.bell_test.levels() == 1001);
    CHECK(cfg.device_a.r_on == doctest::Approx(3.8e4));
    CHECK(cfg.device_a.r_off == doctest::Approx(1.6e6));
    CHECK(cfg.device_b.k_pot == doctest::Approx(cfg.device_a.k_pot));
    CHECK(cfg.output.csv);
}

TEST_CASE("unknown keys and sections are rejected with a location") {
    const fs::path p = scratch_dir() / "bad_key.cfg";
    std::string text = read_file(kSourceDir / "configs" / "default.cfg");
    text += "\nwhims = 3\n";
    write_file(p, text);
    CHECK_THROWS_AS(RunConfig::load(p), config_error);

    const fs::path p2 = scratch_dir() / "bad_section.cfg";
    write_file(p2, read_file(kSourceDir / "configs" / "default.cfg") + "\n[mystery]\nx = 1\n");
    CHECK_THROWS_AS(RunConfig::load(p2), config_error);

    try {
        RunConfig::load(p2);
    } catch (const config_error& e) {
        CHECK(e.line > 0);
        CHECK(std::string(e.what()).find("mystery") != std::string::npos);
    }
}

TEST_CASE("config parse errors carry line and column") {
    const fs::path p = scratch_dir() / "syntax.cfg";
    write_file(p, "[plan]\nn_cycles 15\n");
    try {
        ConfigFile::parse_file(p);
        FAIL("expected config_error");
    } catch (const config_error& e) {
        CHECK(e.line == 2);
        CHECK(e.col >= 1);
    }

    write_file(p, "stray = 1\n");
    CHECK_THROWS_AS(ConfigFile::parse_file(p), config_error);
    write_file(p, "[plan]\nk = 1\nk = 2\n");
    CHECK_THROWS_AS(ConfigFile::parse_file(p), config_error);
}

TEST_CASE("environment label is excluded from the config hash") {
    std::string text = read_file(kSourceDir / "configs" / "default.cfg");
    const auto pos = text.find("environment = ambient");
    REQUIRE(pos != std::string::npos);
    std::string nitrogen = text;
    nitrogen.replace(pos, std::string("environment = ambient").size(),
                     "environment = nitrogen");
    const auto h1 = config_hash_of(ConfigFile::parse_string(text));
    const auto h2 = config_hash_of(ConfigFile::parse_string(nitrogen));
    CHECK(h1 == h2);

    std::string tweaked = text;
    const auto seed_pos = tweaked.find("seed = ");
    REQUIRE(seed_pos != std::string::npos);
    tweaked.insert(seed_pos + 7, "9");
    CHECK(config_hash_of(ConfigFile::parse_string(tweaked)) != h1);
}

TEST_CASE("device defaults file round trip") {
    const DeviceParams p = default_device_params();
    const fs::path path = scratch_dir() / "device_roundtrip.toml";
    write_file(path, device_defaults_text(p, {std::string(kToolVersion), 0}));
    const DeviceParams q = load_device_defaults(path);
    CHECK(q.r_on == p.r_on);
    CHECK(q.r_off == p.r_off);
    CHECK(q.v_th_pot == doctest::Approx(p.v_th_pot).epsilon(1e-8));
    CHECK(q.k_pot == doctest::Approx(p.k_pot).epsilon(1e-8));
    CHECK(q.tau_decay == doctest::Approx(p.tau_decay).epsilon(1e-8));
    CHECK(q.w_init == doctest::Approx(p.w_init).epsilon(1e-8));
}

TEST_CASE("shipped defaults file matches the compiled defaults") {
    const DeviceParams file = load_device_defaults(kSourceDir / "params" / "default-colloid.toml");
    const DeviceParams code = default_device_params();
    CHECK(file.r_on == doctest::Approx(code.r_on).epsilon(1e-9));
    CHECK(file.r_off == doctest::Approx(code.r_off).epsilon(1e-9));
    CHECK(file.v_th_pot == doctest::Approx(code.v_th_pot).epsilon(1e-9));
    CHECK(file.v_th_dep == doctest::Approx(code.v_th_dep).epsilon(1e-9));
    CHECK(file.k_pot == doctest::Approx(code.k_pot).epsilon(1e-9));
    CHECK(file.k_dep == doctest::Approx(code.k_dep).epsilon(1e-9));
    CHECK(file.alpha == doctest::Approx(code.alpha).epsilon(1e-9));
    CHECK(file.tau_decay == doctest::Approx(code.tau_decay).epsilon(1e-9));
    CHECK(file.w_init == doctest::Approx(code.w_init).epsilon(1e-9));
}

TEST_CASE("bundled reference data file matches the compiled table") {
    const ReferenceTrace file = load_reference_trace(kSourceDir / "data" / "reference_trace.csv");
    const ReferenceTrace code = ReferenceTrace::bundled();
    CHECK(file.baseline_r_b == doctest::Approx(code.baseline_r_b));
    CHECK(file.final_r_b == doctest::Approx(code.final_r_b));
    for (std::size_t i = 0; i < code.after_bell.size(); ++i) {
        CHECK(file.after_bell[i] == doctest::Approx(code.after_bell[i]));
        CHECK(file.after_food[i] == doctest::Approx(code.after_food[i]));
    }
}

TEST_CASE("csv writers emit the pinned schemas") {
    std::vector<CycleRecord> records{{1, 1e6, 2e5, 1.1e6, 3e5}, {2, 9e5, 1e5, 1.0e6, 2e5}};
    const RunMetadata meta{std::string(kToolVersion), 0xabcdef};

    const std::string cycles = cycles_csv(records, meta);
    CHECK(cycles.find("cycle,r_a_after_bell_ohm,r_b_after_bell_ohm,r_a_after_food_ohm,"
                      "r_b_after_food_ohm\n") != std::string::npos);
    CHECK(cycles.find("# tool_version=") != std::string::npos);
    CHECK(cycles.find("# config_hash=") != std::string::npos);
    CHECK(cycles.find("1,1000000,200000,1100000,300000\n") != std::string::npos);

    const std::string longform = records_csv(records, meta);
    CHECK(longform.find("cycle,phase,r_a_ohm,r_b_ohm\n") != std::string::npos);
    CHECK(longform.find("1,bell,1000000,200000\n") != std::string::npos);
    CHECK(longform.find("1,food,1100000,300000\n") != std::string::npos);

    const std::string bt = bell_test_csv({4.2e4, true}, 1e5, meta);
    CHECK(bt.find("r_b_ohm,salivation_threshold_ohm,salivation\n") != std::string::npos);
    CHECK(bt.find("42000,100000,true\n") != std::string::npos);

    const fs::path p = scratch_dir() / "cycles_roundtrip.csv";
    write_file(p, cycles);
    const auto loaded = load_cycles_csv(p);
    REQUIRE(loaded.size() == records.size());
    CHECK(loaded[1].r_b_after_food == records[1].r_b_after_food);
}

TEST_CASE("svg plot is deterministic and well formed") {
    std::vector<CycleRecord> records{{1, 1e6, 2.6e5, 1.1e6, 1.1e5}, {2, 9e5, 1.8e5, 1.0e6, 1.2e5}};
    const RunMetadata meta{std::string(kToolVersion), 1};
    const std::string svg = cycles_svg(records, meta);
    CHECK(svg == cycles_svg(records, meta));
    CHECK(svg.find("<svg") == 0);
    CHECK(svg.find("width=\"800\" height=\"500\"") != std::string::npos);
    CHECK(svg.find("polyline") != std::string::npos);
    CHECK(svg.find("after bell") != std::string::npos);
    CHECK(svg.find("after food") != std::string::npos);
}

TEST_CASE("cli: bandgap formatting and exit codes") {
    std::string out;
    CHECK(run_cli("bandgap 370", scratch_dir(), &out) == 0);
    CHECK(out == "3.351\n");
    CHECK(run_cli("bandgap 620", scratch_dir(), &out) == 0);
    CHECK(out == "2.000\n");
    CHECK(run_cli("bandgap 371", scratch_dir(), &out) == 0);
    CHECK(out == "3.342\n");
    CHECK(run_cli("bandgap -5", scratch_dir()) == 2);
    CHECK(run_cli("bandgap pancake", scratch_dir()) == 2);
}

TEST_CASE("cli: condition produces the artifact set and is reproducible") {
    const fs::path cfg = kSourceDir / "configs" / "default.cfg";
    const fs::path out1 = scratch_dir() / "run1";
    const fs::path out2 = scratch_dir() / "run2";
    fs::remove_all(out1);
    fs::remove_all(out2);

    REQUIRE(run_cli("condition '" + cfg.string() + "'", out1) == 0);
    REQUIRE(run_cli("condition '" + cfg.string() + "'", out2) == 0);

    const std::string cycles1 = read_file(out1 / "cycles.csv");
    CHECK(cycles1 == read_file(out2 / "cycles.csv"));
    CHECK(read_file(out1 / "bell_test.csv") == read_file(out2 / "bell_test.csv"));
    CHECK(read_file(out1 / "cycles.svg") == read_file(out2 / "cycles.svg"));

    // 15 data rows after the metadata and header.
    int data_rows = 0;
    std::stringstream ss(cycles1);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#' && line[0] != 'c') ++data_rows;
    CHECK(data_rows == 15);

    CHECK(read_file(out1 / "bell_test.csv").find("true") != std::string::npos);
}

TEST_CASE("cli: config errors exit 2, missing calibration section exits 2") {
    const fs::path bad = scratch_dir() / "broken.cfg";
    write_file(bad, "[plan\n");
    CHECK(run_cli("condition '" + bad.string() + "'", scratch_dir()) == 2);
    CHECK(run_cli("calibrate '" + (kSourceDir / "configs" / "default.cfg").string() + "'",
                  scratch_dir()) == 2);
}

TEST_CASE("cli: simulate writes the trace schema") {
    const fs::path out = scratch_dir() / "sim";
    fs::remove_all(out);
    REQUIRE(run_cli("simulate '" + (kSourceDir / "configs" / "default.cfg").string() +
                        "' --sweep food",
                    out) == 0);
    const std::string trace = read_file(out / "trace.csv");
    CHECK(trace.find("t_s,v_drive_v,i_a_a,i_b_a,r_a_ohm,r_b_ohm,w_a,w_b\n") != std::string::npos);
    // Sample A sits outside the food circuit: its current column is zero.
    std::stringstream ss(trace);
    std::string line;
    int checked = 0;
    while (std::getline(ss, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 't') continue;
        double t, v, ia;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &v, &ia) == 3);
        CHECK(ia == 0.0);
        if (++checked > 50) break;
    }
    CHECK(checked > 0);
}

TEST_CASE("cli: plot re-renders a cycles csv") {
    const fs::path out = scratch_dir() / "plotrun";
    fs::remove_all(out);
    REQUIRE(run_cli("condition '" + (kSourceDir / "configs" / "default.cfg").string() + "'",
                    out) == 0);
    const fs::path svg = scratch_dir() / "replot.svg";
    REQUIRE(run_cli("plot '" + (out / "cycles.csv").string() + "' '" + svg.string() + "'",
                    scratch_dir()) == 0);
    CHECK(read_file(svg).find("<svg") == 0);
}

TEST_CASE("cli: calibrate on the shipped config reaches the loss budget") {
    const fs::path out = scratch_dir() / "calib";
    fs::remove_all(out);
    std::string stdout_text;
    const auto t0 = std::chrono::steady_clock::now();
    REQUIRE(run_cli("calibrate '" + (kSourceDir / "configs" / "calibrate.cfg").string() + "'",
                    out, &stdout_text) == 0);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    CHECK(secs < 60);

    double loss = 1e9;
    REQUIRE(std::sscanf(stdout_text.c_str(), "loss = %lf", &loss) == 1);
    CHECK(loss <= 0.15);
    CHECK(fs::exists(out / "fit.txt"));
    const DeviceParams fitted = load_device_defaults(out / "calibrated-device.toml");
    CHECK(fitted.r_on == doctest::Approx(3.8e4));
}

TEST_CASE("cli: calibrate budget case records converged=false") {
    // max_evals = 1 exhausts the budget immediately but still succeeds.
    std::string text = read_file(kSourceDir / "configs" / "calibrate.cfg");
    const auto pos = text.find("max_evals = ");
    REQUIRE(pos != std::string::npos);
    const auto eol = text.find('\n', pos);
    text.replace(pos, eol - pos, "max_evals = 1");
    // The copy lives elsewhere; anchor the config-relative paths.
    const std::string anchor = kSourceDir.string() + "/";
    for (auto at = text.find("../"); at != std::string::npos; at = text.find("../"))
        text.replace(at, 3, anchor);
    const fs::path cfg = scratch_dir() / "calib_budget.cfg";
    write_file(cfg, text);

    const fs::path out = scratch_dir() / "calib_budget";
    fs::remove_all(out);
    REQUIRE(run_cli("calibrate '" + cfg.string() + "'", out) == 0);
    CHECK(read_file(out / "fit.txt").find("converged = false") != std::string::npos);
}

TEST_CASE("cli: cascade demo emits firing records") {
    const fs::path out = scratch_dir() / "cascade";
    fs::remove_all(out);
    REQUIRE(run_cli("cascade '" + (kSourceDir / "configs" / "cascade.cfg").string() + "'",
                    out) == 0);
    const std::string firing = read_file(out / "firing.csv");
    CHECK(firing.find("round,cell,s1,s2,m_fires,w_cm\n") != std::string::npos);
    CHECK(firing.find("true") != std::string::npos);
}
