#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "colloidsim/errors.hpp"

namespace colloidsim {

/// Source drive as a function of time. Staircases hold each breakpoint level
/// until the next one; the last level is held indefinitely.
struct Waveform {
    enum class Kind { constant, staircase, sine };

    Kind kind = Kind::constant;
    double level = 0.0;                                   // constant
    std::vector<std::pair<double, double>> breakpoints;   // staircase: (t, v)
    double amplitude = 0.0;                               // sine
    double frequency = 0.0;                               // sine, Hz

    static Waveform constant(double v) {
        Waveform w;
        w.kind = Kind::constant;
        w.level = v;
        return w;
    }

    static Waveform staircase(std::vector<std::pair<double, double>> steps) {
        if (steps.empty())
            throw validation_error("staircase: needs at least one breakpoint");
        for (std::size_t i = 1; i < steps.size(); ++i)
            if (!(steps[i].first > steps[i - 1].first))
                throw validation_error("staircase: breakpoints must be strictly increasing in t");
        Waveform w;
        w.kind = Kind::staircase;
        w.breakpoints = std::move(steps);
        return w;
    }

    static Waveform sine(double amplitude, double hz) {
        if (!(hz > 0.0)) throw validation_error("sine: frequency must be positive");
        Waveform w;
        w.kind = Kind::sine;
        w.amplitude = amplitude;
        w.frequency = hz;
        return w;
    }

    double at(double t) const {
        switch (kind) {
            case Kind::constant:
                return level;
            case Kind::sine:
                return amplitude * std::sin(2.0 * std::numbers::pi * frequency * t);
            case Kind::staircase: {
                // Snap grid times that land a rounding error short of a breakpoint.
                const double eps = 1e-9 * std::max(1.0, std::abs(t));
                auto it = std::upper_bound(
                    breakpoints.begin(), breakpoints.end(), t + eps,
                    [](double lhs, const std::pair<double, double>& bp) { return lhs < bp.first; });
                if (it == breakpoints.begin()) return breakpoints.front().second;
                return std::prev(it)->second;
            }
        }
        return 0.0;
    }
};

}  // namespace colloidsim
