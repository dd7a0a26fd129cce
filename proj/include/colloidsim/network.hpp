#pragma once

#include <vector>

#include "colloidsim/transient.hpp"

namespace colloidsim {

/// Abstract reflex cell: unconditional neuron U and conditional neuron C
/// each project onto motor neuron M through one memristive synapse. M fires
/// when the total current into it reaches motor_threshold. A firing
/// pre-neuron applies stim_v across its synapse; C alone applies only a
/// read-level fraction of stim_v (sub-threshold for the kinetics), while
/// paired stimulation puts the full amplitude across C->M so its weight
/// grows.
struct PavlovCell {
    DeviceSlot syn_um;       // U -> M, initialized strong
    DeviceSlot syn_cm;       // C -> M, initialized weak
    double motor_threshold = 2e-5;  // A
    double stim_v = 6.0;            // V
    double read_fraction = 0.3;     // of stim_v, applied by C alone
    double pattern_dt = 0.01;       // s, integration step within a pattern

    void validate() const;
    /// validate() plus the untrained-cell current relations: C alone below
    /// motor_threshold at stim_v, U alone at or above it.
    void validate_initial() const;
    /// Cell with both synapses drawn from the given device parameters,
    /// U->M initialized strong and C->M weak.
    static PavlovCell defaults(const DeviceParams& base);
};

struct StimulusPattern {
    bool s1_active = false;  // unconditional
    bool s2_active = false;  // conditional
    double duration = 1.0;   // s

    void validate() const;
};

struct StimResult {
    bool m_fires = false;
    double peak_current = 0.0;  // A, max total current into M over the pattern
};

/// Applies one stimulus pattern, advancing both synapse states in place.
StimResult stimulate(PavlovCell& cell, const StimulusPattern& pattern);

enum class EdgeRole { drives_s1, drives_s2 };

struct CascadeEdge {
    int upstream = 0;
    int downstream = 0;
    EdgeRole role = EdgeRole::drives_s1;
};

struct FiringRecord {
    int round = 0;
    int cell = 0;
    bool s1 = false;
    bool s2 = false;
    bool m_fires = false;
    double w_cm = 0.0;
};

/// Cells wired so an upstream M firing activates the designated stimulus
/// line of its downstream cell within the same pattern round. Evaluation
/// order is a topological sort; cyclic graphs are rejected at construction.
class CascadeNetwork {
public:
    CascadeNetwork(std::vector<PavlovCell> cells, std::vector<CascadeEdge> edges);

    /// Runs one synchronous round: externally supplied patterns (one per
    /// cell) are OR-ed with upstream-driven activations, cells evaluated in
    /// topological order. Returns one record per cell.
    std::vector<FiringRecord> run_round(const std::vector<StimulusPattern>& external,
                                        int round_idx);

    const std::vector<PavlovCell>& cells() const { return cells_; }
    const std::vector<int>& evaluation_order() const { return order_; }

private:
    std::vector<PavlovCell> cells_;
    std::vector<CascadeEdge> edges_;
    std::vector<int> order_;
};

}  // namespace colloidsim
