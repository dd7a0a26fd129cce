#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "colloidsim/config.hpp"
#include "colloidsim/csv_io.hpp"
#include "colloidsim/errors.hpp"
#include "colloidsim/svg_plot.hpp"
#include "colloidsim/version.hpp"

namespace fs = std::filesystem;
using namespace colloidsim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSim = 3;

fs::path output_dir(const OutputOptions& opts) {
    if (const char* env = std::getenv("COLLOIDSIM_OUTDIR"); env && *env) return fs::path(env);
    return fs::path(opts.directory);
}

RunMetadata metadata_for(const RunConfig& cfg) {
    return RunMetadata{std::string(kToolVersion), cfg.config_hash};
}

int cmd_condition(const std::string& config_path) {
    RunConfig cfg = RunConfig::load(config_path);
    const RunMetadata meta = metadata_for(cfg);
    const fs::path dir = output_dir(cfg.output);

    Bench bench = Bench::create(cfg.plan, cfg.device_a, cfg.device_b);
    const auto records = run_conditioning(cfg.plan, bench);
    const auto bell_test = test_bell_only(cfg.plan, bench);

    if (cfg.output.csv) {
        write_file(dir / "cycles.csv", cycles_csv(records, meta));
        write_file(dir / "bell_test.csv",
                   bell_test_csv(bell_test, cfg.plan.salivation_threshold, meta));
    }
    if (cfg.output.svg) write_file(dir / "cycles.svg", cycles_svg(records, meta));

    std::printf("cycles: %zu, final r_b_after_bell = %s ohm, bell test r_b = %s ohm, salivation = %s\n",
                records.size(), format_number(records.back().r_b_after_bell).c_str(),
                format_number(bell_test.r_b).c_str(), bell_test.salivation ? "true" : "false");
    return kExitOk;
}

int cmd_calibrate(const std::string& config_path) {
    RunConfig cfg = RunConfig::load(config_path);
    if (!cfg.calibration)
        throw config_error("config has no [calibration] section", 1, 1);
    const RunMetadata meta = metadata_for(cfg);
    const fs::path dir = output_dir(cfg.output);

    const ReferenceTrace ref = load_reference_trace(cfg.calibration->reference_path);
    const FitResult fr = fit(cfg.calibration->fit, cfg.plan, ref, cfg.device_a);

    write_file(dir / "fit.txt", fit_result_text(fr, meta));
    write_file(dir / "calibrated-device.toml", device_defaults_text(fr.params, meta));
    std::printf("loss = %s (evals = %d, converged = %s)\n", format_number(fr.loss).c_str(),
                fr.evals_used, fr.converged ? "true" : "false");
    return kExitOk;
}

int cmd_bandgap(const std::string& arg) {
    char* end = nullptr;
    const double lambda = std::strtod(arg.c_str(), &end);
    if (end != arg.c_str() + arg.size() || !(lambda > 0.0)) {
        std::fprintf(stderr, "bandgap: expected a positive wavelength in nm\n");
        return kExitConfig;
    }
    const double ev = optical_band_gap(lambda);
    // Four significant digits.
    int decimals = 3 - static_cast<int>(std::floor(std::log10(ev)));
    if (decimals < 0) decimals = 0;
    std::printf("%.*f\n", decimals, ev);
    return kExitOk;
}

int cmd_simulate(const std::string& config_path, const std::string& sweep_name) {
    RunConfig cfg = RunConfig::load(config_path);
    const RunMetadata meta = metadata_for(cfg);
    const fs::path dir = output_dir(cfg.output);

    const SweepSpec* spec = nullptr;
    if (sweep_name == "bell") spec = &cfg.plan.bell;
    else if (sweep_name == "food") spec = &cfg.plan.food;
    else if (sweep_name == "bell_test") spec = &cfg.plan.bell_test;
    else throw config_error("unknown sweep '" + sweep_name + "'", 1, 1);

    Bench bench = Bench::create(cfg.plan, cfg.device_a, cfg.device_b);
    const DeviceSlot pre_a = bench.dev_a;
    const DeviceSlot pre_b = bench.dev_b;
    const Trace tr = run_sweep(cfg.plan, bench, *spec);
    write_file(dir / "trace.csv",
               trace_csv(tr, spec->waveform(), pre_a, pre_b, cfg.plan.dt, meta));
    std::printf("trace rows: %zu\n", tr.rows());
    return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& svg_path) {
    const auto records = load_cycles_csv(csv_path);
    // Re-plots carry the tool version; the hash of the originating run lives
    // in the input CSV.
    RunMetadata meta{std::string(kToolVersion), 0};
    write_file(svg_path, cycles_svg(records, meta));
    return kExitOk;
}

int cmd_cascade(const std::string& config_path) {
    RunConfig cfg = RunConfig::load(config_path);
    if (!cfg.cascade) throw config_error("config has no [cascade] section", 1, 1);
    const RunMetadata meta = metadata_for(cfg);
    const fs::path dir = output_dir(cfg.output);
    const CascadeOptions& cas = *cfg.cascade;

    std::vector<PavlovCell> cells;
    for (int i = 0; i < cas.cells; ++i) {
        PavlovCell cell;
        cell.syn_um.params = cfg.device_a;
        cell.syn_um.params.w_init = cas.w_init_um;
        cell.syn_um.state = {cas.w_init_um};
        cell.syn_cm.params = cfg.device_a;
        cell.syn_cm.params.w_init = cas.w_init_cm;
        cell.syn_cm.state = {cas.w_init_cm};
        cell.stim_v = cas.stim_v;
        cell.motor_threshold = cas.motor_threshold;
        cell.read_fraction = cas.read_fraction;
        cell.validate_initial();
        cells.push_back(cell);
    }
    CascadeNetwork net(std::move(cells), cas.edges);

    std::vector<StimulusPattern> external(static_cast<std::size_t>(cas.cells));
    for (auto& p : external) p.duration = cas.duration;
    for (int c : cas.external_s1) {
        if (c < 0 || c >= cas.cells) throw config_error("external_s1 cell out of range", 1, 1);
        external[static_cast<std::size_t>(c)].s1_active = true;
    }
    for (int c : cas.external_s2) {
        if (c < 0 || c >= cas.cells) throw config_error("external_s2 cell out of range", 1, 1);
        external[static_cast<std::size_t>(c)].s2_active = true;
    }

    std::vector<FiringRecord> all;
    for (int round = 1; round <= cas.rounds; ++round) {
        const auto recs = net.run_round(external, round);
        all.insert(all.end(), recs.begin(), recs.end());
    }
    write_file(dir / "firing.csv", firing_csv(all, meta));
    std::printf("rounds: %d, cells: %d\n", cas.rounds, cas.cells);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"colloidsim: two-sample memristive conditioning bench simulator"};
    app.require_subcommand(1);

    std::string config_path, sweep_name = "bell", csv_path, svg_path, lambda_arg;

    auto* condition = app.add_subcommand("condition", "run the full conditioning experiment");
    condition->add_option("config", config_path, "experiment config file")->required();

    auto* calibrate = app.add_subcommand("calibrate", "fit device parameters to a reference");
    calibrate->add_option("config", config_path, "experiment config file")->required();

    auto* bandgap = app.add_subcommand("bandgap", "photon-energy band gap from a wavelength");
    bandgap->add_option("nm", lambda_arg, "wavelength in nanometers")->required();

    auto* simulate = app.add_subcommand("simulate", "raw transient of one sweep");
    simulate->add_option("config", config_path, "experiment config file")->required();
    simulate->add_option("--sweep", sweep_name, "bell | food | bell_test");

    auto* plot = app.add_subcommand("plot", "render a cycles.csv as an SVG");
    plot->add_option("csv", csv_path, "cycles.csv produced by condition")->required();
    plot->add_option("svg", svg_path, "output SVG path")->required();

    auto* cascade = app.add_subcommand("cascade", "evaluate a declared cell cascade");
    cascade->add_option("config", config_path, "experiment config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (condition->parsed()) return cmd_condition(config_path);
        if (calibrate->parsed()) return cmd_calibrate(config_path);
        if (bandgap->parsed()) return cmd_bandgap(lambda_arg);
        if (simulate->parsed()) return cmd_simulate(config_path, sweep_name);
        if (plot->parsed()) return cmd_plot(csv_path, svg_path);
        if (cascade->parsed()) return cmd_cascade(config_path);
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const validation_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const solver_error& e) {
        std::fprintf(stderr, "simulation error: %s\n", e.what());
        return kExitSim;
    } catch (const topology_error& e) {
        std::fprintf(stderr, "simulation error: %s\n", e.what());
        return kExitSim;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitSim;
    }
    return kExitOk;
}
