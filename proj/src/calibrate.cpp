#include "colloidsim/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "colloidsim/errors.hpp"

namespace colloidsim {

void ReferenceTrace::validate() const {
    if (!(baseline_r_b > 0.0) || !(final_r_b > 0.0))
        throw validation_error("reference: resistances must be positive");
    for (double r : after_bell)
        if (!(r > 0.0)) throw validation_error("reference: after_bell entries must be positive");
    for (double r : after_food)
        if (!(r > 0.0)) throw validation_error("reference: after_food entries must be positive");
}

ReferenceTrace ReferenceTrace::bundled() {
    ReferenceTrace ref;
    ref.baseline_r_b = 1.6e6;
    ref.after_bell = {2.6e5, 1.8e5, 9.0e4, 6.0e4, 3.0e4, 4.0e4, 4.0e4, 4.0e4,
                      4.0e4, 4.0e4, 4.0e4, 4.0e4, 4.0e4, 3.8e4, 3.8e4};
    ref.after_food = {1.1e5, 1.2e5, 1.2e5, 1.2e5, 1.2e5, 1.2e5, 1.3e5, 1.3e5,
                      1.4e5, 1.5e5, 1.6e5, 1.6e5, 1.6e5, 1.7e5, 1.8e5};
    ref.final_r_b = 3.8e4;
    return ref;
}

double loss_from_readings(double baseline_sim, std::span<const double> bell_sim,
                          std::span<const double> food_sim, const ReferenceTrace& ref) {
    ref.validate();
    if (bell_sim.size() != ref.after_bell.size() || food_sim.size() != ref.after_food.size())
        throw validation_error("loss: simulated rows must match the reference length");
    if (!(baseline_sim > 0.0)) throw validation_error("loss: baseline must be positive");

    // Fixed accumulation order: bells, foods, baseline.
    double sum = 0.0;
    for (std::size_t i = 0; i < bell_sim.size(); ++i) {
        if (!(bell_sim[i] > 0.0)) throw validation_error("loss: readings must be positive");
        const double r = std::log10(bell_sim[i] / ref.after_bell[i]);
        sum += r * r;
    }
    for (std::size_t i = 0; i < food_sim.size(); ++i) {
        if (!(food_sim[i] > 0.0)) throw validation_error("loss: readings must be positive");
        const double r = std::log10(food_sim[i] / ref.after_food[i]);
        sum += r * r;
    }
    const double rb = std::log10(baseline_sim / ref.baseline_r_b);
    sum += rb * rb;
    return std::sqrt(sum / static_cast<double>(bell_sim.size() + food_sim.size() + 1));
}

double objective(const DeviceParams& params, const ExperimentPlan& plan,
                 const ReferenceTrace& ref, std::string* diagnostic) {
    try {
        ref.validate();
        if (plan.n_cycles != static_cast<int>(ref.after_bell.size()))
            throw validation_error("objective: plan.n_cycles must match the reference length");
        Bench bench = Bench::create(plan, params, params);
        const double baseline = probe_device(plan, bench, DriveTarget::probe_b);
        const auto records = run_conditioning(plan, bench);
        std::vector<double> bells, foods;
        bells.reserve(records.size());
        foods.reserve(records.size());
        for (const auto& rec : records) {
            bells.push_back(rec.r_b_after_bell);
            foods.push_back(rec.r_b_after_food);
        }
        return loss_from_readings(baseline, bells, foods, ref);
    } catch (const std::exception& e) {
        if (diagnostic) *diagnostic = e.what();
        return std::numeric_limits<double>::infinity();
    }
}

void FitConfig::validate() const {
    if (free_params.empty()) throw validation_error("fit: no free parameters");
    if (free_params.size() != bounds.size())
        throw validation_error("fit: one bounds pair per free parameter required");
    const auto known = fittable_param_names();
    for (const auto& name : free_params)
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw validation_error("fit: unknown parameter '" + name + "'");
    for (const auto& [lo, hi] : bounds)
        if (!(lo > 0.0) || !(hi > lo))
            throw validation_error("fit: bounds must satisfy 0 < lo < hi");
    if (max_evals < 1) throw validation_error("fit: max_evals must be >= 1");
    if (n_restarts < 1) throw validation_error("fit: n_restarts must be >= 1");
}

namespace {

double DeviceParams::*field_of(const std::string& name) {
    if (name == "r_on") return &DeviceParams::r_on;
    if (name == "r_off") return &DeviceParams::r_off;
    if (name == "v_th_pot") return &DeviceParams::v_th_pot;
    if (name == "v_th_dep") return &DeviceParams::v_th_dep;
    if (name == "k_pot") return &DeviceParams::k_pot;
    if (name == "k_dep") return &DeviceParams::k_dep;
    if (name == "alpha") return &DeviceParams::alpha;
    if (name == "tau_decay") return &DeviceParams::tau_decay;
    if (name == "w_init") return &DeviceParams::w_init;
    return nullptr;
}

struct SearchSpace {
    std::vector<double DeviceParams::*> fields;
    std::vector<double> lo_log, hi_log;
    DeviceParams base;

    DeviceParams decode(std::span<const double> x) const {
        DeviceParams p = base;
        for (std::size_t i = 0; i < fields.size(); ++i)
            p.*fields[i] = std::exp(std::clamp(x[i], lo_log[i], hi_log[i]));
        return p;
    }
};

double simplex_diameter(const std::vector<std::vector<double>>& xs) {
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t j = i + 1; j < xs.size(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < xs[i].size(); ++k) {
                const double u = xs[i][k] - xs[j][k];
                s += u * u;
            }
            d = std::max(d, std::sqrt(s));
        }
    return d;
}

}  // namespace

std::vector<std::string> fittable_param_names() {
    return {"r_on", "r_off", "v_th_pot", "v_th_dep", "k_pot", "k_dep",
            "alpha", "tau_decay", "w_init"};
}

FitResult fit(const FitConfig& cfg, const ExperimentPlan& plan, const ReferenceTrace& ref,
              const DeviceParams& base, FitTrace* trace) {
    cfg.validate();
    const std::size_t dim = cfg.free_params.size();

    SearchSpace space;
    space.base = base;
    for (std::size_t i = 0; i < dim; ++i) {
        space.fields.push_back(field_of(cfg.free_params[i]));
        space.lo_log.push_back(std::log(cfg.bounds[i].first));
        space.hi_log.push_back(std::log(cfg.bounds[i].second));
    }

    int evals_used = 0;
    FitResult best;
    best.loss = std::numeric_limits<double>::infinity();
    bool any_finite = false;

    auto evaluate = [&](std::span<const double> x) -> double {
        const double loss = objective(space.decode(x), plan, ref);
        ++evals_used;
        if (trace) trace->losses.push_back(loss);
        if (std::isfinite(loss)) any_finite = true;
        return loss;
    };

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    const int per_restart = std::max(1, cfg.max_evals / cfg.n_restarts);
    // Standard reflection/expansion/contraction/shrink coefficients.
    const double nm_alpha = 1.0, nm_gamma = 2.0, nm_rho = 0.5, nm_sigma = 0.5;
    const double diam_tol = 1e-4;

    for (int restart = 0; restart < cfg.n_restarts && evals_used < cfg.max_evals; ++restart) {
        const int budget_end = std::min(cfg.max_evals, evals_used + per_restart);

        std::vector<double> x0(dim);
        for (std::size_t i = 0; i < dim; ++i)
            x0[i] = space.lo_log[i] + uni(rng) * (space.hi_log[i] - space.lo_log[i]);

        // Initial simplex: nudge each coordinate by a quarter of its range,
        // flipped when that would leave the box.
        std::vector<std::vector<double>> xs{x0};
        for (std::size_t i = 0; i < dim; ++i) {
            auto v = x0;
            const double step = 0.25 * (space.hi_log[i] - space.lo_log[i]);
            v[i] = (v[i] + step <= space.hi_log[i]) ? v[i] + step : v[i] - step;
            xs.push_back(std::move(v));
        }
        std::vector<double> fs;
        for (const auto& v : xs) {
            if (evals_used >= budget_end) break;
            fs.push_back(evaluate(v));
        }
        while (fs.size() < xs.size()) {  // budget ran out mid-initialization
            xs.pop_back();
        }
        bool restart_converged = false;

        if (fs.size() == dim + 1) {
            while (evals_used < budget_end) {
                // Order vertices best..worst.
                std::vector<std::size_t> idx(xs.size());
                for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
                std::stable_sort(idx.begin(), idx.end(),
                                 [&](std::size_t a, std::size_t b) { return fs[a] < fs[b]; });
                std::vector<std::vector<double>> xs2;
                std::vector<double> fs2;
                for (std::size_t i : idx) {
                    xs2.push_back(xs[i]);
                    fs2.push_back(fs[i]);
                }
                xs.swap(xs2);
                fs.swap(fs2);

                if (simplex_diameter(xs) < diam_tol) {
                    restart_converged = true;
                    break;
                }

                std::vector<double> centroid(dim, 0.0);
                for (std::size_t i = 0; i + 1 < xs.size(); ++i)
                    for (std::size_t k = 0; k < dim; ++k) centroid[k] += xs[i][k];
                for (double& c : centroid) c /= static_cast<double>(dim);

                auto blend = [&](const std::vector<double>& from, double coef) {
                    std::vector<double> v(dim);
                    for (std::size_t k = 0; k < dim; ++k)
                        v[k] = std::clamp(centroid[k] + coef * (centroid[k] - from[k]),
                                          space.lo_log[k], space.hi_log[k]);
                    return v;
                };

                auto xr = blend(xs.back(), nm_alpha);
                const double fr = evaluate(xr);
                if (fr < fs.front()) {
                    if (evals_used >= budget_end) {
                        if (fr < fs.back()) { xs.back() = xr; fs.back() = fr; }
                        break;
                    }
                    auto xe = blend(xs.back(), nm_alpha * nm_gamma);
                    const double fe = evaluate(xe);
                    if (fe < fr) { xs.back() = xe; fs.back() = fe; }
                    else { xs.back() = xr; fs.back() = fr; }
                } else if (fr < fs[fs.size() - 2]) {
                    xs.back() = xr;
                    fs.back() = fr;
                } else {
                    if (evals_used >= budget_end) break;
                    const bool outside = fr < fs.back();
                    std::vector<double> xc(dim);
                    const auto& toward = outside ? xr : xs.back();
                    for (std::size_t k = 0; k < dim; ++k)
                        xc[k] = std::clamp(centroid[k] + nm_rho * (toward[k] - centroid[k]),
                                           space.lo_log[k], space.hi_log[k]);
                    const double fc = evaluate(xc);
                    if (fc < (outside ? fr : fs.back())) {
                        xs.back() = xc;
                        fs.back() = fc;
                    } else {
                        for (std::size_t i = 1; i < xs.size() && evals_used < budget_end; ++i) {
                            for (std::size_t k = 0; k < dim; ++k)
                                xs[i][k] = xs[0][k] + nm_sigma * (xs[i][k] - xs[0][k]);
                            fs[i] = evaluate(xs[i]);
                        }
                    }
                }
            }
        }

        // Best vertex of this restart (strict comparison keeps earlier winners).
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (fs[i] < best.loss) {
                best.loss = fs[i];
                best.params = space.decode(xs[i]);
                best.converged = restart_converged;
            }
        }
    }

    if (!any_finite)
        throw validation_error("fit: every evaluated start was infeasible");
    best.evals_used = evals_used;
    return best;
}

}  // namespace colloidsim
