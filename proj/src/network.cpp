#include "colloidsim/network.hpp"

#include <algorithm>
#include <cmath>

#include "colloidsim/errors.hpp"

namespace colloidsim {

void PavlovCell::validate() const {
    syn_um.params.validate();
    syn_cm.params.validate();
    if (!(motor_threshold > 0.0))
        throw validation_error("cell: motor_threshold must be positive");
    if (!(stim_v > 0.0)) throw validation_error("cell: stim_v must be positive");
    if (!(read_fraction > 0.0) || !(read_fraction < 1.0))
        throw validation_error("cell: read_fraction must be in (0,1)");
    if (!(pattern_dt > 0.0)) throw validation_error("cell: pattern_dt must be positive");
    if (!(read_fraction * stim_v < syn_cm.params.v_th_pot))
        throw validation_error("cell: read-level drive must stay below the C->M threshold");
}

void PavlovCell::validate_initial() const {
    validate();
    // Naive cell semantics: C alone must not excite M, U alone must.
    const double i_cm = stim_v / resistance(syn_cm.params, syn_cm.state.w);
    const double i_um = stim_v / resistance(syn_um.params, syn_um.state.w);
    if (!(i_cm < motor_threshold))
        throw validation_error("cell: initial C->M current already reaches motor_threshold");
    if (!(i_um >= motor_threshold))
        throw validation_error("cell: initial U->M current below motor_threshold");
}

PavlovCell PavlovCell::defaults(const DeviceParams& base) {
    PavlovCell cell;
    cell.syn_um.params = base;
    cell.syn_um.params.w_init = 0.95;
    cell.syn_um.state = {0.95};
    cell.syn_cm.params = base;
    cell.syn_cm.params.w_init = 0.05;
    cell.syn_cm.state = {0.05};
    cell.validate_initial();
    return cell;
}

void StimulusPattern::validate() const {
    if (!(duration > 0.0)) throw validation_error("pattern: duration must be positive");
}

StimResult stimulate(PavlovCell& cell, const StimulusPattern& pattern) {
    cell.validate();
    pattern.validate();

    const double v_um = pattern.s1_active ? cell.stim_v : 0.0;
    double v_cm = 0.0;
    if (pattern.s1_active && pattern.s2_active)
        v_cm = cell.stim_v;  // paired drive potentiates C->M
    else if (pattern.s2_active)
        v_cm = cell.read_fraction * cell.stim_v;

    const auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(pattern.duration / cell.pattern_dt)));
    const double dt = pattern.duration / static_cast<double>(n);

    StimResult out;
    for (std::size_t k = 0; k < n; ++k) {
        const double i = v_um / resistance(cell.syn_um.params, cell.syn_um.state.w) +
                         v_cm / resistance(cell.syn_cm.params, cell.syn_cm.state.w);
        out.peak_current = std::max(out.peak_current, i);
        cell.syn_um.state = step_state(cell.syn_um.params, cell.syn_um.state, v_um, dt);
        cell.syn_cm.state = step_state(cell.syn_cm.params, cell.syn_cm.state, v_cm, dt);
    }
    out.m_fires = out.peak_current >= cell.motor_threshold;
    return out;
}

CascadeNetwork::CascadeNetwork(std::vector<PavlovCell> cells, std::vector<CascadeEdge> edges)
    : cells_(std::move(cells)), edges_(std::move(edges)) {
    const int n = static_cast<int>(cells_.size());
    for (const auto& e : edges_) {
        if (e.upstream < 0 || e.upstream >= n || e.downstream < 0 || e.downstream >= n)
            throw topology_error("cascade: edge references an unknown cell");
        if (e.upstream == e.downstream)
            throw topology_error("cascade: self-loop on cell " + std::to_string(e.upstream));
    }

    // Kahn's algorithm; leftovers mean a cycle.
    std::vector<int> indeg(static_cast<std::size_t>(n), 0);
    for (const auto& e : edges_) ++indeg[static_cast<std::size_t>(e.downstream)];
    std::vector<int> ready;
    for (int i = 0; i < n; ++i)
        if (indeg[static_cast<std::size_t>(i)] == 0) ready.push_back(i);
    order_.clear();
    for (std::size_t head = 0; head < ready.size(); ++head) {
        const int c = ready[head];
        order_.push_back(c);
        for (const auto& e : edges_)
            if (e.upstream == c && --indeg[static_cast<std::size_t>(e.downstream)] == 0)
                ready.push_back(e.downstream);
    }
    if (static_cast<int>(order_.size()) != n)
        throw topology_error("cascade: edge graph contains a cycle");
}

std::vector<FiringRecord> CascadeNetwork::run_round(const std::vector<StimulusPattern>& external,
                                                    int round_idx) {
    if (external.size() != cells_.size())
        throw validation_error("cascade: one external pattern per cell required");
    std::vector<char> fired(cells_.size(), 0);
    std::vector<FiringRecord> records(cells_.size());

    for (int c : order_) {
        StimulusPattern pat = external[static_cast<std::size_t>(c)];
        for (const auto& e : edges_) {
            if (e.downstream != c || !fired[static_cast<std::size_t>(e.upstream)]) continue;
            if (e.role == EdgeRole::drives_s1) pat.s1_active = true;
            else pat.s2_active = true;
        }
        const StimResult res = stimulate(cells_[static_cast<std::size_t>(c)], pat);
        fired[static_cast<std::size_t>(c)] = res.m_fires ? 1 : 0;
        records[static_cast<std::size_t>(c)] = {round_idx, c, pat.s1_active, pat.s2_active,
                                                res.m_fires,
                                                cells_[static_cast<std::size_t>(c)].syn_cm.state.w};
    }
    return records;
}

}  // namespace colloidsim
