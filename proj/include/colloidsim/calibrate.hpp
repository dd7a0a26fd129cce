#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "colloidsim/protocol.hpp"

namespace colloidsim {

/// Reference resistance trajectory of sample B over the 15-cycle bench run:
/// baseline before conditioning, the after-bell and after-food readings per
/// cycle, and the final after-bell value. All ohms.
struct ReferenceTrace {
    double baseline_r_b = 1.6e6;
    std::array<double, 15> after_bell{};
    std::array<double, 15> after_food{};
    double final_r_b = 3.8e4;

    void validate() const;
    /// The bundled bench measurements (mirrors data/reference_trace.csv).
    static ReferenceTrace bundled();
};

/// RMS over log10(R_sim / R_ref) with a fixed accumulation order: the 15
/// after-bell entries, the 15 after-food entries, then baseline (31 equal
/// weights).
double loss_from_readings(double baseline_sim, std::span<const double> bell_sim,
                          std::span<const double> food_sim, const ReferenceTrace& ref);

/// Runs the conditioning protocol with both samples set to `params` and
/// scores the outcome against `ref`. Simulation failures are reported as
/// +infinity with the reason in `diagnostic`, never thrown.
double objective(const DeviceParams& params, const ExperimentPlan& plan,
                 const ReferenceTrace& ref, std::string* diagnostic = nullptr);

struct FitConfig {
    std::vector<std::string> free_params;  // DeviceParams field names
    std::vector<std::pair<double, double>> bounds;  // per free param, (lo, hi)
    int max_evals = 200;
    int n_restarts = 2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct FitResult {
    DeviceParams params;
    double loss = 0.0;
    int evals_used = 0;
    bool converged = false;
};

/// Raw objective value of every evaluation, in order.
struct FitTrace {
    std::vector<double> losses;
};

/// Known DeviceParams field names accepted in FitConfig::free_params.
std::vector<std::string> fittable_param_names();

/// Nelder-Mead simplex search in log-parameter space, clamped to the bounds.
/// n_restarts starting points are drawn deterministically from the seed; the
/// best restart wins (ties to the earlier restart). converged reports whether
/// the winning restart's simplex diameter fell below 1e-4 (log space) within
/// budget.
FitResult fit(const FitConfig& cfg, const ExperimentPlan& plan, const ReferenceTrace& ref,
              const DeviceParams& base, FitTrace* trace = nullptr);

}  // namespace colloidsim
