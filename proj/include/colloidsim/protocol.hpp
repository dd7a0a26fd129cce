#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "colloidsim/transient.hpp"

namespace colloidsim {

enum class Environment { ambient, nitrogen };

/// DC staircase specification: levels v_start, v_start+v_step, ..., v_end,
/// each held for dwell seconds.
struct SweepSpec {
    double v_start = 0.0;
    double v_end = 10.0;
    double v_step = 0.05;
    double dwell = 0.1;  // s per level
    DriveTarget target = DriveTarget::bell;

    void validate() const;
    int levels() const;
    double duration() const;
    Waveform waveform() const;
};

/// The full conditioning experiment: per-cycle bell (strong drive to A) then
/// food (mild drive to B), repeated n_cycles times, with non-perturbing
/// resistance probes after every phase.
struct ExperimentPlan {
    int n_cycles = 15;
    SweepSpec bell{0.0, 10.0, 0.05, 0.1, DriveTarget::bell};
    SweepSpec food{0.0, 3.0, 0.01, 0.1, DriveTarget::food};
    SweepSpec bell_test{0.0, 10.0, 0.01, 0.1, DriveTarget::bell};
    double probe_v = 0.1;            // V
    double probe_dwell = 1e-3;       // s
    double salivation_threshold = 1e5;  // ohm
    Environment environment = Environment::ambient;  // bookkeeping label only
    std::uint64_t seed = 1;
    double noise_amplitude = 0.0;    // relative probe noise; 0 disables
    double inter_cycle_idle_s = 0.0;
    double line_r = 1.0;             // ohm
    double line_l = 1e-6;            // henry
    double dt = 5e-3;                // s, transient step
    double solver_tol = 1e-9;
    int max_newton_iters = 20;

    void validate(const DeviceParams& dev_a, const DeviceParams& dev_b) const;
    TransientConfig solver_config(double t_end) const;
};

/// The bench: both sample states plus the probe-noise stream.
struct Bench {
    DeviceSlot dev_a;
    DeviceSlot dev_b;
    std::mt19937_64 rng;

    static Bench create(const ExperimentPlan& plan, const DeviceParams& a, const DeviceParams& b);
};

struct CycleRecord {
    int cycle_idx = 0;  // 1-based
    double r_a_after_bell = 0.0;
    double r_b_after_bell = 0.0;
    double r_a_after_food = 0.0;
    double r_b_after_food = 0.0;
};

struct BellTestResult {
    double r_b = 0.0;
    bool salivation = false;
};

/// Runs one staircase sweep on the netlist for spec.target and returns the
/// full trace. Device states persist; the sample left out of the circuit
/// still relaxes (volatile decay) for the sweep duration.
Trace run_sweep(const ExperimentPlan& plan, Bench& bench, const SweepSpec& spec);

/// Non-perturbing resistance reading of one sample (target must be probe_a
/// or probe_b), with the optional measurement-noise model applied.
double probe_device(const ExperimentPlan& plan, Bench& bench, DriveTarget probe_target);

/// n_cycles of bell -> probe both -> food -> probe both. States carry across
/// cycles; returns one record per cycle, indices 1..n_cycles.
std::vector<CycleRecord> run_conditioning(const ExperimentPlan& plan, Bench& bench);

/// Bell-only test sweep followed by a probe of sample B and the salivation
/// decision.
BellTestResult test_bell_only(const ExperimentPlan& plan, Bench& bench);

/// True iff r_b is strictly below the threshold.
bool detect_salivation(double r_b, double threshold);

}  // namespace colloidsim
