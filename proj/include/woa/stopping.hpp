#pragma once

#include <limits>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "woa/model.hpp"

namespace woa {

constexpr double kInf = std::numeric_limits<double>::infinity();

// iota embedding of stopping rates into the unit interval, with inf -> 1.
double iota_unit(double rate);
// Inverse embedding, 1 -> inf.
double iota_rate(double u);

// Markovian randomized stopping time: stop when the additive clock
// A_t = sum over atoms rate * l^y_t + integral of density d l, jumping to
// infinity on exit from the continuation set, first exceeds an independent
// Exp(1) draw.
struct MRST {
    // Continuation set as a finite union of disjoint open intervals.
    std::vector<std::pair<double, double>> continuation;
    std::map<double, double> atoms;  // location -> finite rate > 0
    // Optional piecewise-constant density: breakpoints x_0 < ... < x_k with
    // value density_values[i] on (x_i, x_{i+1}).
    std::vector<double> density_breaks;
    std::vector<double> density_values;

    bool contains(double x) const;  // x inside the continuation set
};

struct StrategyProfile {
    Grid grid;
    std::vector<double> rates1;  // per interior point, in [0, inf]
    std::vector<double> rates2;

    const std::vector<double>& rates(int player) const {
        return player == 1 ? rates1 : rates2;
    }
    std::vector<double>& rates(int player) {
        return player == 1 ? rates1 : rates2;
    }
    std::vector<double> unit1() const;
    std::vector<double> unit2() const;
};

// Canonicalization: points with infinite rate are removed from the
// continuation set instead of carrying an infinite atom.
MRST grid_strategy_to_mrst(const Grid& grid, const std::vector<double>& rates);

struct ClockState {
    double accumulated = 0.0;  // value of A_t, may be inf
    std::optional<double> exhausted_at;

    bool exhausted() const { return exhausted_at.has_value(); }
};

// A simulated path skeleton: states at uniform time steps dt until absorption.
struct PathSegment {
    double dt = 0.0;
    std::vector<double> states;
};

// Local-time increments per atom location (and per density cell) over the
// segment, supplied by the montecarlo module.
struct LocalTimeIncrements {
    std::map<double, double> per_atom;
    std::vector<double> per_density_cell;
};

// Clock increment over one path segment; inf when the segment leaves the
// continuation set.
double clock_increment(const MRST& mrst, const PathSegment& segment,
                       const LocalTimeIncrements& lt);

struct StopSample {
    double tau = 0.0;
    double state = 0.0;
    bool voluntary = false;  // clock-driven (vs absorption/frontier exit)
};

// First time the accumulated clock reaches E along the path, or the first
// exit from the continuation set.  The path is a uniform-dt skeleton; local
// time is estimated with the band estimator of the montecarlo module.
StopSample sample_stop(const MRST& mrst, const DiffusionModel& model,
                       const PathSegment& path, double exp_variate,
                       double band_epsilon);

} // namespace woa
