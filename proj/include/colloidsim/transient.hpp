#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "colloidsim/netlist.hpp"
#include "colloidsim/waveform.hpp"

namespace colloidsim {

struct TransientConfig {
    double dt = 5e-3;           // s
    double t_end = 1.0;         // s
    double solver_tol = 1e-9;   // relative KCL residual bound
    int max_newton_iters = 20;  // reserved for a fully implicit mode

    void validate() const;
};

/// One memristor's parameters plus live state.
struct DeviceSlot {
    DeviceParams params;
    MemristorState state;
};

/// Solver output on a uniform grid t = 0, dt, ..., t_end. Row k holds the
/// network solution at t_k (solved with states frozen from t_{k-1}) and the
/// device states advanced to t_k.
struct Trace {
    std::vector<double> time;
    std::vector<std::string> node_names;    // "v1".."vN"
    std::vector<std::string> branch_names;  // "i(<element>)"
    std::vector<std::string> device_names;  // element names of memristors
    std::vector<std::vector<double>> node_v;    // [node][row]
    std::vector<std::vector<double>> branch_i;  // [element][row]
    std::vector<std::vector<double>> device_w;  // [slot][row]
    std::vector<std::vector<double>> device_r;  // [slot][row]

    std::size_t rows() const { return time.size(); }
};

/// Transient simulation by operator splitting: at each step the linear MNA
/// system is solved with memristor resistances frozen at the current state
/// (inductors via backward-Euler companion: conductance dt/L plus history
/// current source), then each memristor advances via step_state under its
/// solved terminal voltage. Throws topology_error on a singular system and
/// solver_error on non-finite solutions or KCL residuals above
/// solver_tol * max branch current.
Trace transient(const Netlist& netlist, std::span<DeviceSlot> devices, const Waveform& drive,
                const TransientConfig& cfg);

/// Reads a device's resistance with a non-perturbing DC probe: builds the
/// solve for one step of length probe_duration at probe_v and returns
/// probe_v / I through the device. The probed state only moves by decay over
/// the probe duration. probe_v must sit below both of the device's
/// thresholds, otherwise the probe is rejected as perturbing.
double measure_resistance(const Netlist& probe_netlist, std::span<DeviceSlot> devices,
                          int device_index, double probe_v, double probe_duration,
                          double solver_tol = 1e-9);

}  // namespace colloidsim
