#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "colloidsim/errors.hpp"
#include "colloidsim/transient.hpp"

using namespace colloidsim;

namespace {

Netlist divider_netlist(double r1, double r2) {
    Netlist nl;
    nl.name = "divider";
    nl.node_count = 2;
    nl.elements = {
        {ElementKind::voltage_source, "V1", 1, 0, 0.0, -1},
        {ElementKind::resistor, "R1", 1, 2, r1, -1},
        {ElementKind::resistor, "R2", 2, 0, r2, -1},
    };
    return nl;
}

Netlist rl_netlist(double r, double l) {
    Netlist nl;
    nl.name = "rl";
    nl.node_count = 2;
    nl.elements = {
        {ElementKind::voltage_source, "V1", 1, 0, 0.0, -1},
        {ElementKind::resistor, "R1", 1, 2, r, -1},
        {ElementKind::inductor, "L1", 2, 0, l, -1},
    };
    return nl;
}

Netlist single_device_netlist() {
    Netlist nl;
    nl.name = "single";
    nl.node_count = 1;
    nl.device_count = 1;
    nl.elements = {
        {ElementKind::voltage_source, "V1", 1, 0, 0.0, -1},
        {ElementKind::memristor, "M1", 1, 0, 0.0, 0},
    };
    return nl;
}

double max_kcl_residual(const Netlist& nl, const Trace& tr, std::size_t row) {
    std::vector<double> sums(static_cast<std::size_t>(nl.node_count) + 1, 0.0);
    for (std::size_t i = 0; i < nl.elements.size(); ++i) {
        const double cur = tr.branch_i[i][row];
        sums[static_cast<std::size_t>(nl.elements[i].node_pos)] += cur;
        sums[static_cast<std::size_t>(nl.elements[i].node_neg)] -= cur;
    }
    double resid = 0.0;
    for (int n = 1; n <= nl.node_count; ++n)
        resid = std::max(resid, std::abs(sums[static_cast<std::size_t>(n)]));
    return resid;
}

}  // namespace

TEST_CASE("resistor divider node voltage is exact") {
    TransientConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 1.0;
    const Trace tr = transient(divider_netlist(1e6, 1e6), {}, Waveform::constant(10.0), cfg);
    for (std::size_t row = 0; row < tr.rows(); ++row)
        CHECK(std::abs(tr.node_v[1][row] - 5.0) <= 1e-9 * 5.0);
}

TEST_CASE("RL step response matches the closed form") {
    const double r = 100.0, l = 1.0, v = 10.0;
    const double tau = l / r;
    TransientConfig cfg;
    cfg.dt = tau / 100.0;
    cfg.t_end = 3.0 * tau;
    const Trace tr = transient(rl_netlist(r, l), {}, Waveform::constant(v), cfg);

    const double i_exact = (v / r) * (1.0 - std::exp(-3.0));
    const double i_sim = tr.branch_i[2].back();
    CHECK(std::abs(i_sim - i_exact) / i_exact < 0.005);
    // Inductor current starts from rest.
    CHECK(tr.branch_i[2].front() == doctest::Approx(0.0));
}

TEST_CASE("KCL residual stays at solver precision") {
    const double r = 100.0, l = 1.0;
    TransientConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_end = 0.03;
    const Netlist nl = rl_netlist(r, l);
    const Trace tr = transient(nl, {}, Waveform::constant(10.0), cfg);
    for (std::size_t row = 0; row < tr.rows(); ++row) {
        double i_max = 0.0;
        for (std::size_t e = 0; e < nl.elements.size(); ++e)
            i_max = std::max(i_max, std::abs(tr.branch_i[e][row]));
        CHECK(max_kcl_residual(nl, tr, row) <= 1e-9 * i_max);
    }
}

TEST_CASE("bell and food topologies have the stated shape") {
    const DeviceParams dev;
    const Netlist bell = build_pavlov_netlist(1.0, 1e-6, dev, dev, DriveTarget::bell);
    CHECK(bell.node_count == 4);
    CHECK(bell.elements.size() == 5);
    CHECK(bell.device_count == 2);

    const Netlist food = build_pavlov_netlist(1.0, 1e-6, dev, dev, DriveTarget::food);
    CHECK(food.node_count == 1);
    CHECK(food.elements.size() == 2);
    CHECK(food.device_count == 1);
}

TEST_CASE("bell topology is symmetric under swapping identical samples") {
    const DeviceParams dev;
    const Netlist nl = build_pavlov_netlist(1.0, 1e-6, dev, dev, DriveTarget::bell);
    std::vector<DeviceSlot> devs{{dev, {0.3}}, {dev, {0.3}}};
    TransientConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 2.0;
    const Trace tr = transient(nl, devs, Waveform::constant(8.0), cfg);
    // Same series current, equal parameters and states: the two samples see
    // identical voltages and evolve identically (to solver rounding).
    for (std::size_t row = 0; row < tr.rows(); ++row)
        CHECK(tr.device_w[0][row] == doctest::Approx(tr.device_w[1][row]).epsilon(1e-7));
}

TEST_CASE("measure_resistance round trip and probe drift") {
    DeviceParams dev;
    const Netlist probe = build_pavlov_netlist(1.0, 1e-6, dev, dev, DriveTarget::probe_b);
    std::vector<DeviceSlot> devs{{dev, {0.0}}};
    const double r0 = measure_resistance(probe, devs, 0, 0.1, 1e-3);
    CHECK(r0 == doctest::Approx(1.6e6).epsilon(1e-12));
    // Ohm's law round trip at the endpoint.
    devs[0].state.w = 1.0;
    CHECK(measure_resistance(probe, devs, 0, 0.1, 1e-3) ==
          doctest::Approx(3.8e4).epsilon(1e-6));

    // Repeated probing moves the reading only by decay over the probe time.
    devs[0].state.w = 0.6;
    const double first = measure_resistance(probe, devs, 0, 0.1, 1e-3);
    double last = first;
    for (int i = 0; i < 9; ++i) last = measure_resistance(probe, devs, 0, 0.1, 1e-3);
    CHECK(std::abs(last - first) / first < 1e-3);

    // A probe at or above a threshold is rejected as perturbing.
    CHECK_THROWS_AS(measure_resistance(probe, devs, 0, dev.v_th_pot, 1e-3), validation_error);
}

TEST_CASE("pinched hysteresis under a supra-threshold sinusoid") {
    DeviceParams dev;
    const Netlist nl = single_device_netlist();
    std::vector<DeviceSlot> devs{{dev, {0.3}}};
    const double period = 4.0;
    const double amplitude = 2.0 * dev.v_th_pot;
    TransientConfig cfg;
    cfg.dt = period / 4000.0;
    cfg.t_end = period;
    const Trace tr = transient(nl, devs, Waveform::sine(amplitude, 1.0 / period), cfg);

    double v_max = 0.0, i_max = 0.0;
    for (std::size_t row = 0; row < tr.rows(); ++row) {
        const double v = tr.node_v[0][row];
        const double i = tr.branch_i[1][row];
        v_max = std::max(v_max, std::abs(v));
        i_max = std::max(i_max, std::abs(i));
        if (std::abs(v) <= 1e-12) CHECK(std::abs(i) <= 1e-12);
    }
    // The loop is traversed once; shoelace area must be significant.
    double area2 = 0.0;
    for (std::size_t row = 0; row + 1 < tr.rows(); ++row) {
        area2 += tr.node_v[0][row] * tr.branch_i[1][row + 1] -
                 tr.node_v[0][row + 1] * tr.branch_i[1][row];
    }
    CHECK(std::abs(area2) / 2.0 > 1e-6 * v_max * i_max);
}

TEST_CASE("staircase potentiation strictly lowers resistance") {
    DeviceParams dev;
    const Netlist nl = single_device_netlist();
    std::vector<DeviceSlot> devs{{dev, {0.2}}};
    std::vector<std::pair<double, double>> bp;
    for (int i = 0; i <= 200; ++i) bp.emplace_back(i * 0.1, i * 0.05);
    TransientConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 201 * 0.1;
    const Trace tr = transient(nl, devs, Waveform::staircase(bp), cfg);

    for (std::size_t row = 1; row < tr.rows(); ++row) {
        const double v = tr.node_v[0][row];
        const double w = tr.device_w[0][row - 1];
        if (v >= 2.0 * dev.v_th_pot && w < 0.9)
            CHECK(tr.device_r[0][row] < tr.device_r[0][row - 1]);
    }
    CHECK(tr.device_r[0].back() < tr.device_r[0].front());
}

TEST_CASE("passivity: dissipated power is non-negative at every step") {
    DeviceParams dev;
    const Netlist nl = build_pavlov_netlist(1.0, 1e-6, dev, dev, DriveTarget::bell);
    std::vector<DeviceSlot> devs{{dev, {0.1}}, {dev, {0.1}}};
    TransientConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 5.0;
    const Trace tr = transient(nl, devs, Waveform::constant(9.0), cfg);
    for (std::size_t row = 0; row < tr.rows(); ++row) {
        double dissipated = 0.0;
        for (std::size_t e = 0; e < nl.elements.size(); ++e) {
            if (nl.elements[e].kind == ElementKind::resistor)
                dissipated += tr.branch_i[e][row] * tr.branch_i[e][row] * nl.elements[e].value;
            if (nl.elements[e].kind == ElementKind::memristor) {
                // i^2 * R via the recorded device resistance of that row.
                const int slot = nl.elements[e].device_index;
                dissipated += tr.branch_i[e][row] * tr.branch_i[e][row] *
                              tr.device_r[static_cast<std::size_t>(slot)][row];
            }
        }
        CHECK(dissipated >= 0.0);
    }
}

TEST_CASE("topology errors are reported with the offending node") {
    // Node 2 floats: only reachable through nothing.
    Netlist nl;
    nl.name = "floating";
    nl.node_count = 2;
    nl.elements = {
        {ElementKind::voltage_source, "V1", 1, 0, 0.0, -1},
        {ElementKind::resistor, "R1", 1, 0, 100.0, -1},
    };
    TransientConfig cfg;
    CHECK_THROWS_AS(transient(nl, {}, Waveform::constant(1.0), cfg), topology_error);

    Netlist bad;
    bad.name = "bad";
    bad.node_count = 1;
    bad.elements = {
        {ElementKind::voltage_source, "V1", 1, 0, 0.0, -1},
        {ElementKind::resistor, "R1", 1, 5, 100.0, -1},
    };
    CHECK_THROWS_AS(bad.validate(), topology_error);

    Netlist nonpos;
    nonpos.name = "nonpos";
    nonpos.node_count = 1;
    nonpos.elements = {
        {ElementKind::voltage_source, "V1", 1, 0, 0.0, -1},
        {ElementKind::resistor, "R1", 1, 0, -5.0, -1},
    };
    CHECK_THROWS_AS(nonpos.validate(), topology_error);
}

TEST_CASE("transient config validation") {
    TransientConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
    cfg.dt = 0.1;
    cfg.t_end = 0.05;
    CHECK_THROWS_AS(cfg.validate(), validation_error);
}
