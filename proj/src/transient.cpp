#include "colloidsim/transient.hpp"

#include <cmath>
#include <cstdlib>

#include "colloidsim/errors.hpp"

namespace colloidsim {

void TransientConfig::validate() const {
    if (!(dt > 0.0)) throw validation_error("transient: dt must be > 0");
    if (!(t_end >= dt)) throw validation_error("transient: t_end must be >= dt");
    if (!(solver_tol > 0.0)) throw validation_error("transient: solver_tol must be > 0");
    if (max_newton_iters < 1) throw validation_error("transient: max_newton_iters must be >= 1");
}

namespace {

// Dense MNA workspace. Unknowns: node voltages 1..N, then one current per
// voltage source. Inductors use the Norton companion (no extra unknown).
struct Mna {
    int n_nodes = 0;
    int n_unknowns = 0;
    std::vector<double> a;    // n_unknowns x n_unknowns, row-major
    std::vector<double> rhs;
    std::vector<double> x;
    std::vector<int> src_index;  // per element: source unknown slot or -1

    explicit Mna(const Netlist& nl) {
        n_nodes = nl.node_count;
        int n_src = 0;
        src_index.assign(nl.elements.size(), -1);
        for (std::size_t i = 0; i < nl.elements.size(); ++i)
            if (nl.elements[i].kind == ElementKind::voltage_source)
                src_index[i] = n_nodes + n_src++;
        n_unknowns = n_nodes + n_src;
        a.assign(static_cast<std::size_t>(n_unknowns) * n_unknowns, 0.0);
        rhs.assign(static_cast<std::size_t>(n_unknowns), 0.0);
        x.assign(static_cast<std::size_t>(n_unknowns), 0.0);
    }

    double& at(int r, int c) { return a[static_cast<std::size_t>(r) * n_unknowns + c]; }

    void clear() {
        std::fill(a.begin(), a.end(), 0.0);
        std::fill(rhs.begin(), rhs.end(), 0.0);
    }

    // Conductance stamp between nodes p and n (1-based; 0 = ground).
    void stamp_g(int p, int n, double g) {
        if (p > 0) at(p - 1, p - 1) += g;
        if (n > 0) at(n - 1, n - 1) += g;
        if (p > 0 && n > 0) {
            at(p - 1, n - 1) -= g;
            at(n - 1, p - 1) -= g;
        }
    }

    // Current i injected from p to n through the element (history sources).
    void stamp_i(int p, int n, double i) {
        if (p > 0) rhs[static_cast<std::size_t>(p - 1)] -= i;
        if (n > 0) rhs[static_cast<std::size_t>(n - 1)] += i;
    }

    void stamp_source(int slot, int p, int n, double volts) {
        if (p > 0) {
            at(p - 1, slot) += 1.0;
            at(slot, p - 1) += 1.0;
        }
        if (n > 0) {
            at(n - 1, slot) -= 1.0;
            at(slot, n - 1) -= 1.0;
        }
        rhs[static_cast<std::size_t>(slot)] = volts;
    }

    // Gaussian elimination with partial pivoting. On a vanishing pivot,
    // reports the node (or source) the pivot column belongs to.
    void solve(const Netlist& nl) {
        const int n = n_unknowns;
        for (int k = 0; k < n; ++k) {
            int piv = k;
            double best = std::abs(at(k, k));
            for (int r = k + 1; r < n; ++r) {
                const double v = std::abs(at(r, k));
                if (v > best) {
                    best = v;
                    piv = r;
                }
            }
            if (!(best > 1e-300)) {
                if (k < n_nodes)
                    throw topology_error("singular MNA matrix at node " + std::to_string(k + 1) +
                                         " (netlist '" + nl.name + "')");
                throw topology_error("singular MNA matrix at source branch (netlist '" + nl.name +
                                     "')");
            }
            if (piv != k) {
                for (int c = k; c < n; ++c) std::swap(at(piv, c), at(k, c));
                std::swap(rhs[static_cast<std::size_t>(piv)], rhs[static_cast<std::size_t>(k)]);
            }
            const double d = at(k, k);
            for (int r = k + 1; r < n; ++r) {
                const double f = at(r, k) / d;
                if (f == 0.0) continue;
                for (int c = k; c < n; ++c) at(r, c) -= f * at(k, c);
                rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(k)];
            }
        }
        for (int r = n - 1; r >= 0; --r) {
            double s = rhs[static_cast<std::size_t>(r)];
            for (int c = r + 1; c < n; ++c) s -= at(r, c) * x[static_cast<std::size_t>(c)];
            x[static_cast<std::size_t>(r)] = s / at(r, r);
        }
    }
};

struct StepScratch {
    std::vector<double> g_mem;       // frozen memristor conductances, per element
    std::vector<double> l_hist;      // inductor history currents, per element
    std::vector<double> branch_i;    // per element
    std::vector<double> node_sum;    // KCL accumulator
};

}  // namespace

Trace transient(const Netlist& netlist, std::span<DeviceSlot> devices, const Waveform& drive,
                const TransientConfig& cfg) {
    netlist.validate();
    cfg.validate();
    if (static_cast<int>(devices.size()) < netlist.device_count)
        throw validation_error("transient: fewer device slots than the netlist expects");
    for (const auto& d : devices) d.params.validate();

    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
    if (n_steps < 1) throw validation_error("transient: t_end shorter than one step");

    Trace tr;
    tr.time.reserve(n_steps + 1);
    for (int n = 1; n <= netlist.node_count; ++n) tr.node_names.push_back("v" + std::to_string(n));
    for (const auto& e : netlist.elements) tr.branch_names.push_back("i(" + e.name + ")");
    tr.device_names.assign(static_cast<std::size_t>(netlist.device_count), {});
    for (const auto& e : netlist.elements)
        if (e.kind == ElementKind::memristor)
            tr.device_names[static_cast<std::size_t>(e.device_index)] = e.name;
    tr.node_v.assign(static_cast<std::size_t>(netlist.node_count), {});
    tr.branch_i.assign(netlist.elements.size(), {});
    tr.device_w.assign(static_cast<std::size_t>(netlist.device_count), {});
    tr.device_r.assign(static_cast<std::size_t>(netlist.device_count), {});

    Mna mna(netlist);
    StepScratch sc;
    sc.g_mem.assign(netlist.elements.size(), 0.0);
    sc.l_hist.assign(netlist.elements.size(), 0.0);
    sc.branch_i.assign(netlist.elements.size(), 0.0);
    sc.node_sum.assign(static_cast<std::size_t>(netlist.node_count) + 1, 0.0);

    for (std::size_t k = 0; k <= n_steps; ++k) {
        const double t = static_cast<double>(k) * cfg.dt;
        const double v_drive = drive.at(t);
        // Row 0 is the initial condition: inductor currents start at zero, so
        // inductors stamp as open branches carrying their (zero) history.
        const bool initial = (k == 0);

        mna.clear();
        for (std::size_t i = 0; i < netlist.elements.size(); ++i) {
            const Element& e = netlist.elements[i];
            switch (e.kind) {
                case ElementKind::resistor:
                    mna.stamp_g(e.node_pos, e.node_neg, 1.0 / e.value);
                    break;
                case ElementKind::memristor: {
                    const DeviceSlot& d = devices[static_cast<std::size_t>(e.device_index)];
                    sc.g_mem[i] = 1.0 / resistance(d.params, d.state.w);
                    mna.stamp_g(e.node_pos, e.node_neg, sc.g_mem[i]);
                    break;
                }
                case ElementKind::inductor: {
                    const double g = initial ? 0.0 : cfg.dt / e.value;
                    if (g > 0.0) mna.stamp_g(e.node_pos, e.node_neg, g);
                    mna.stamp_i(e.node_pos, e.node_neg, sc.l_hist[i]);
                    break;
                }
                case ElementKind::voltage_source:
                    mna.stamp_source(mna.src_index[i], e.node_pos, e.node_neg, v_drive);
                    break;
            }
        }
        mna.solve(netlist);
        for (double v : mna.x)
            if (!std::isfinite(v)) throw solver_error("non-finite MNA solution", k);

        auto node_voltage = [&](int n) -> double {
            return n == 0 ? 0.0 : mna.x[static_cast<std::size_t>(n - 1)];
        };

        // Branch currents (node_pos -> node_neg) and KCL residual check.
        double i_max = 0.0;
        double g_max = 0.0;
        double v_max = 0.0;
        for (int n = 1; n <= netlist.node_count; ++n)
            v_max = std::max(v_max, std::abs(node_voltage(n)));
        std::fill(sc.node_sum.begin(), sc.node_sum.end(), 0.0);
        for (std::size_t i = 0; i < netlist.elements.size(); ++i) {
            const Element& e = netlist.elements[i];
            const double dv = node_voltage(e.node_pos) - node_voltage(e.node_neg);
            double cur = 0.0;
            switch (e.kind) {
                case ElementKind::resistor:
                    cur = dv / e.value;
                    g_max = std::max(g_max, 1.0 / e.value);
                    break;
                case ElementKind::memristor:
                    cur = dv * sc.g_mem[i];
                    g_max = std::max(g_max, sc.g_mem[i]);
                    break;
                case ElementKind::inductor:
                    cur = (initial ? 0.0 : cfg.dt / e.value * dv) + sc.l_hist[i];
                    if (!initial) g_max = std::max(g_max, cfg.dt / e.value);
                    break;
                case ElementKind::voltage_source:
                    cur = mna.x[static_cast<std::size_t>(mna.src_index[i])];
                    break;
            }
            sc.branch_i[i] = cur;
            i_max = std::max(i_max, std::abs(cur));
            sc.node_sum[static_cast<std::size_t>(e.node_pos)] += cur;
            sc.node_sum[static_cast<std::size_t>(e.node_neg)] -= cur;
        }
        double resid = 0.0;
        for (int n = 1; n <= netlist.node_count; ++n)
            resid = std::max(resid, std::abs(sc.node_sum[static_cast<std::size_t>(n)]));
        // Current scale: actual branch currents, floored by the conductance
        // scale so quiescent steps do not compare noise against noise.
        const double i_scale = std::max(i_max, g_max * v_max);
        if (i_scale > 0.0 && resid > cfg.solver_tol * i_scale)
            throw solver_error("KCL residual above tolerance", k);

        // Advance states over the step that just ended at t: memristors under
        // their solved terminal voltage, inductor histories to i(t).
        if (!initial) {
            for (std::size_t i = 0; i < netlist.elements.size(); ++i) {
                const Element& e = netlist.elements[i];
                if (e.kind == ElementKind::memristor) {
                    DeviceSlot& d = devices[static_cast<std::size_t>(e.device_index)];
                    const double dv = node_voltage(e.node_pos) - node_voltage(e.node_neg);
                    d.state = step_state(d.params, d.state, dv, cfg.dt);
                } else if (e.kind == ElementKind::inductor) {
                    sc.l_hist[i] = sc.branch_i[i];
                }
            }
        }

        tr.time.push_back(t);
        for (int n = 1; n <= netlist.node_count; ++n)
            tr.node_v[static_cast<std::size_t>(n - 1)].push_back(node_voltage(n));
        for (std::size_t i = 0; i < netlist.elements.size(); ++i)
            tr.branch_i[i].push_back(sc.branch_i[i]);
        for (const auto& e : netlist.elements) {
            if (e.kind != ElementKind::memristor) continue;
            const DeviceSlot& d = devices[static_cast<std::size_t>(e.device_index)];
            tr.device_w[static_cast<std::size_t>(e.device_index)].push_back(d.state.w);
            tr.device_r[static_cast<std::size_t>(e.device_index)].push_back(
                resistance(d.params, d.state.w));
        }
    }
    return tr;
}

double measure_resistance(const Netlist& probe_netlist, std::span<DeviceSlot> devices,
                          int device_index, double probe_v, double probe_duration,
                          double solver_tol) {
    if (!(probe_v > 0.0)) throw validation_error("measure_resistance: probe_v must be positive");
    if (device_index < 0 || device_index >= static_cast<int>(devices.size()))
        throw validation_error("measure_resistance: bad device index");
    const DeviceParams& p = devices[static_cast<std::size_t>(device_index)].params;
    if (probe_v >= p.v_th_pot || probe_v >= p.v_th_dep)
        throw validation_error("measure_resistance: probe voltage would perturb the device");

    std::size_t mem_element = probe_netlist.elements.size();
    for (std::size_t i = 0; i < probe_netlist.elements.size(); ++i)
        if (probe_netlist.elements[i].kind == ElementKind::memristor &&
            probe_netlist.elements[i].device_index == device_index)
            mem_element = i;
    if (mem_element == probe_netlist.elements.size())
        throw validation_error("measure_resistance: device not present in probe netlist");

    TransientConfig cfg;
    cfg.dt = probe_duration;
    cfg.t_end = probe_duration;
    cfg.solver_tol = solver_tol;
    Trace tr = transient(probe_netlist, devices, Waveform::constant(probe_v), cfg);
    const double i = tr.branch_i[mem_element].back();
    if (!(std::abs(i) > 0.0)) throw solver_error("probe current vanished", 1);
    return probe_v / i;
}

}  // namespace colloidsim
