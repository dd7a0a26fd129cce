#include "colloidsim/device.hpp"

#include <algorithm>
#include <cmath>

#include "colloidsim/errors.hpp"

namespace colloidsim {

void DeviceParams::validate() const {
    if (!(r_on > 0.0) || !(r_off > r_on))
        throw validation_error("device: need 0 < r_on < r_off");
    if (!(v_th_pot > 0.0) || !(v_th_dep > 0.0))
        throw validation_error("device: thresholds must be positive");
    if (!(k_pot >= 0.0) || !(k_dep >= 0.0))
        throw validation_error("device: rates must be non-negative");
    if (!(alpha >= 1.0))
        throw validation_error("device: alpha must be >= 1");
    if (!(tau_decay > 0.0))
        throw validation_error("device: tau_decay must be positive");
    if (!(w_init >= 0.0) || !(w_init <= 1.0))
        throw validation_error("device: w_init must be in [0,1]");
}

DeviceParams default_device_params() { return DeviceParams{}; }

double window(double w) {
    const double u = 2.0 * w - 1.0;
    return 1.0 - u * u;
}

double resistance(const DeviceParams& p, double w) {
    p.validate();
    if (!(w >= 0.0) || !(w <= 1.0))
        throw validation_error("resistance: w must be in [0,1]");
    return p.r_off * std::pow(p.r_on / p.r_off, w);
}

namespace {

double pot_rate(const DeviceParams& p, double v) {
    if (v < p.v_th_pot) return 0.0;
    return p.k_pot * std::pow(v / p.v_th_pot - 1.0, p.alpha);
}

double dep_rate(const DeviceParams& p, double v) {
    if (v > -p.v_th_dep) return 0.0;
    return p.k_dep * std::pow(-v / p.v_th_dep - 1.0, p.alpha);
}

}  // namespace

double state_rate(const DeviceParams& p, double w, double v) {
    p.validate();
    if (!(w >= 0.0) || !(w <= 1.0))
        throw validation_error("state_rate: w must be in [0,1]");
    const double f = window(w);
    return (pot_rate(p, v) - dep_rate(p, v)) * f - w / p.tau_decay;
}

MemristorState step_state(const DeviceParams& p, MemristorState s, double v, double dt) {
    p.validate();
    if (!(dt > 0.0)) throw validation_error("step_state: dt must be > 0");
    // Drive explicit, decay implicit: unconditionally bounded for any dt.
    const double drive = (pot_rate(p, v) - dep_rate(p, v)) * window(s.w);
    double w = (s.w + dt * drive) / (1.0 + dt / p.tau_decay);
    return {std::clamp(w, 0.0, 1.0)};
}

double optical_band_gap(double lambda_nm) {
    if (!(lambda_nm > 0.0))
        throw validation_error("optical_band_gap: wavelength must be positive");
    return 1240.0 / lambda_nm;
}

}  // namespace colloidsim
