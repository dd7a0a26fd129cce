#pragma once

namespace colloidsim {

/// One colloid sample modeled as a voltage-controlled memristor with a single
/// internal state w in [0,1]. Higher w means lower resistance (a stronger
/// synapse). Positive drive above v_th_pot potentiates, negative drive below
/// -v_th_dep depresses, and the state relaxes toward w = 0 with time constant
/// tau_decay (forgetting).
struct DeviceParams {
    double r_on = 3.8e4;       // ohm, low-resistance limit
    double r_off = 1.6e6;      // ohm, high-resistance limit
    double v_th_pot = 2.6;     // V, potentiation threshold (> 0)
    double v_th_dep = 1.5;     // V, depression threshold (> 0, for negative drive)
    double k_pot = 0.5;        // 1/s, potentiation rate
    double k_dep = 0.05;       // 1/s, depression rate
    double alpha = 2.0;        // overdrive exponent (>= 1)
    double tau_decay = 100.0;  // s, volatile relaxation constant
    double w_init = 0.015;     // initial state

    /// Throws validation_error unless 0 < r_on < r_off, thresholds and
    /// tau_decay are positive, rates are non-negative, alpha >= 1 and
    /// w_init is in [0,1].
    void validate() const;
};

/// Shipped calibrated defaults; mirrors params/default-colloid.toml.
DeviceParams default_device_params();

struct MemristorState {
    double w = 0.0;
};

/// Boundary window 1 - (2w-1)^2; zero at w = 0 and w = 1.
double window(double w);

/// Log-interpolated resistance map R(w) = r_off * (r_on/r_off)^w.
/// Strictly decreasing in w; spans [r_on, r_off].
double resistance(const DeviceParams& p, double w);

/// Instantaneous dw/dt at state w under terminal voltage v:
///   pot(v)*window(w) - dep(v)*window(w) - w/tau_decay
/// with pot(v) = k_pot*(v/v_th_pot - 1)^alpha for v >= v_th_pot (else 0) and
/// dep(v) = k_dep*(-v/v_th_dep - 1)^alpha for v <= -v_th_dep (else 0).
double state_rate(const DeviceParams& p, double w, double v);

/// Advances the state by one step of length dt under constant voltage v.
/// Drive terms are explicit, the decay term implicit, and the result is
/// clamped to [0,1]; first-order accurate in dt.
MemristorState step_state(const DeviceParams& p, MemristorState s, double v, double dt);

/// Photon-energy band gap estimate in eV: 1240 / lambda_nm.
double optical_band_gap(double lambda_nm);

}  // namespace colloidsim
