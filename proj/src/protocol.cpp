#include "colloidsim/protocol.hpp"

#include <cmath>

#include "colloidsim/errors.hpp"

namespace colloidsim {

void SweepSpec::validate() const {
    if (!(v_step > 0.0)) throw validation_error("sweep: v_step must be > 0");
    if (!(dwell > 0.0)) throw validation_error("sweep: dwell must be > 0");
    const double span = v_end - v_start;
    if (span < 0.0) throw validation_error("sweep: v_end must be >= v_start");
    const double n = span / v_step;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, std::abs(n)))
        throw validation_error("sweep: (v_end - v_start) must be a multiple of v_step");
}

int SweepSpec::levels() const {
    validate();
    return static_cast<int>(std::llround((v_end - v_start) / v_step)) + 1;
}

double SweepSpec::duration() const { return levels() * dwell; }

Waveform SweepSpec::waveform() const {
    const int n = levels();
    std::vector<std::pair<double, double>> bp;
    bp.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) bp.emplace_back(i * dwell, v_start + i * v_step);
    return Waveform::staircase(std::move(bp));
}

void ExperimentPlan::validate(const DeviceParams& dev_a, const DeviceParams& dev_b) const {
    dev_a.validate();
    dev_b.validate();
    if (n_cycles < 1) throw validation_error("plan: n_cycles must be >= 1");
    bell.validate();
    food.validate();
    bell_test.validate();
    if (!(probe_v > 0.0) || !(probe_dwell > 0.0))
        throw validation_error("plan: probe settings must be positive");
    const double r_on = std::max(dev_a.r_on, dev_b.r_on);
    const double r_off = std::min(dev_a.r_off, dev_b.r_off);
    if (!(salivation_threshold > r_on) || !(salivation_threshold < r_off))
        throw validation_error("plan: salivation_threshold must lie inside (r_on, r_off)");
    if (!(noise_amplitude >= 0.0)) throw validation_error("plan: noise_amplitude must be >= 0");
    if (!(inter_cycle_idle_s >= 0.0))
        throw validation_error("plan: inter_cycle_idle_s must be >= 0");
    if (!(line_r > 0.0) || !(line_l > 0.0))
        throw validation_error("plan: line_r and line_l must be positive");
    solver_config(bell.duration());  // validates dt/tol
}

TransientConfig ExperimentPlan::solver_config(double t_end) const {
    TransientConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.solver_tol = solver_tol;
    cfg.max_newton_iters = max_newton_iters;
    cfg.validate();
    return cfg;
}

Bench Bench::create(const ExperimentPlan& plan, const DeviceParams& a, const DeviceParams& b) {
    plan.validate(a, b);
    Bench bench;
    bench.dev_a = {a, {a.w_init}};
    bench.dev_b = {b, {b.w_init}};
    bench.rng.seed(plan.seed);
    return bench;
}

namespace {

// Time passes for the sample left out of the circuit: pure relaxation, same
// integrator as the in-circuit path so dt-refinement behaves uniformly.
void decay_off_circuit(DeviceSlot& dev, double duration, double dt) {
    const auto n = static_cast<std::size_t>(std::llround(duration / dt));
    for (std::size_t i = 0; i < n; ++i) dev.state = step_state(dev.params, dev.state, 0.0, dt);
}

}  // namespace

Trace run_sweep(const ExperimentPlan& plan, Bench& bench, const SweepSpec& spec) {
    spec.validate();
    Netlist nl = build_pavlov_netlist(plan.line_r, plan.line_l, bench.dev_a.params,
                                      bench.dev_b.params, spec.target);
    std::vector<DeviceSlot*> slots;
    if (drive_includes_a(spec.target)) slots.push_back(&bench.dev_a);
    if (drive_includes_b(spec.target)) slots.push_back(&bench.dev_b);

    // transient() wants a contiguous span; stage states in and out.
    std::vector<DeviceSlot> staged;
    staged.reserve(slots.size());
    for (auto* s : slots) staged.push_back(*s);
    Trace tr = transient(nl, staged, spec.waveform(), plan.solver_config(spec.duration()));
    for (std::size_t i = 0; i < slots.size(); ++i) *slots[i] = staged[i];

    if (!drive_includes_a(spec.target)) decay_off_circuit(bench.dev_a, spec.duration(), plan.dt);
    if (!drive_includes_b(spec.target)) decay_off_circuit(bench.dev_b, spec.duration(), plan.dt);
    return tr;
}

double probe_device(const ExperimentPlan& plan, Bench& bench, DriveTarget probe_target) {
    if (probe_target != DriveTarget::probe_a && probe_target != DriveTarget::probe_b)
        throw validation_error("probe_device: target must be probe_a or probe_b");
    Netlist nl = build_pavlov_netlist(plan.line_r, plan.line_l, bench.dev_a.params,
                                      bench.dev_b.params, probe_target);
    DeviceSlot& probed = probe_target == DriveTarget::probe_a ? bench.dev_a : bench.dev_b;
    DeviceSlot& other = probe_target == DriveTarget::probe_a ? bench.dev_b : bench.dev_a;

    std::vector<DeviceSlot> staged{probed};
    double r = measure_resistance(nl, staged, 0, plan.probe_v, plan.probe_dwell, plan.solver_tol);
    probed = staged[0];
    decay_off_circuit(other, plan.probe_dwell, plan.probe_dwell);

    if (plan.noise_amplitude > 0.0) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        r *= 1.0 + plan.noise_amplitude * gauss(bench.rng);
        if (!(r > 0.0)) r = probed.params.r_on;  // noise floor
    }
    return r;
}

std::vector<CycleRecord> run_conditioning(const ExperimentPlan& plan, Bench& bench) {
    plan.validate(bench.dev_a.params, bench.dev_b.params);
    std::vector<CycleRecord> records;
    records.reserve(static_cast<std::size_t>(plan.n_cycles));
    for (int cycle = 1; cycle <= plan.n_cycles; ++cycle) {
        CycleRecord rec;
        rec.cycle_idx = cycle;
        run_sweep(plan, bench, plan.bell);
        rec.r_a_after_bell = probe_device(plan, bench, DriveTarget::probe_a);
        rec.r_b_after_bell = probe_device(plan, bench, DriveTarget::probe_b);
        run_sweep(plan, bench, plan.food);
        rec.r_a_after_food = probe_device(plan, bench, DriveTarget::probe_a);
        rec.r_b_after_food = probe_device(plan, bench, DriveTarget::probe_b);
        if (plan.inter_cycle_idle_s > 0.0) {
            decay_off_circuit(bench.dev_a, plan.inter_cycle_idle_s, plan.dt);
            decay_off_circuit(bench.dev_b, plan.inter_cycle_idle_s, plan.dt);
        }
        records.push_back(rec);
    }
    return records;
}

BellTestResult test_bell_only(const ExperimentPlan& plan, Bench& bench) {
    run_sweep(plan, bench, plan.bell_test);
    BellTestResult out;
    out.r_b = probe_device(plan, bench, DriveTarget::probe_b);
    out.salivation = detect_salivation(out.r_b, plan.salivation_threshold);
    return out;
}

bool detect_salivation(double r_b, double threshold) {
    if (!(r_b > 0.0) || !(threshold > 0.0))
        throw validation_error("detect_salivation: resistances must be positive");
    return r_b < threshold;
}

}  // namespace colloidsim
