#include "woa/stopping.hpp"

#include <cmath>

namespace woa {

double iota_unit(double rate) {
    if (rate < 0 || std::isnan(rate)) fail("NegativeRate", "rate must be in [0, inf]");
    if (std::isinf(rate)) return 1.0;
    return rate / (1.0 + rate);
}

double iota_rate(double u) {
    if (!(u >= 0.0 && u <= 1.0)) fail("OutOfRange", "unit rate must be in [0, 1]");
    if (u >= 1.0) return kInf;
    return u / (1.0 - u);
}

bool MRST::contains(double x) const {
    for (const auto& [a, b] : continuation) {
        if (x > a && x < b) return true;
    }
    return false;
}

std::vector<double> StrategyProfile::unit1() const {
    std::vector<double> u(rates1.size());
    for (size_t i = 0; i < rates1.size(); ++i) u[i] = iota_unit(rates1[i]);
    return u;
}

std::vector<double> StrategyProfile::unit2() const {
    std::vector<double> u(rates2.size());
    for (size_t i = 0; i < rates2.size(); ++i) u[i] = iota_unit(rates2[i]);
    return u;
}

MRST grid_strategy_to_mrst(const Grid& grid, const std::vector<double>& rates) {
    MRST m;
    double left = grid.points.front();
    for (int j = 1; j + 1 < grid.n_points(); ++j) {
        const double rate = rates[static_cast<size_t>(j - 1)];
        if (std::isinf(rate)) {
            // canonical form: infinite atoms become holes in the continuation set
            m.continuation.emplace_back(left, grid[j]);
            left = grid[j];
        } else if (rate > 0.0) {
            m.atoms[grid[j]] = rate;
        }
    }
    m.continuation.emplace_back(left, grid.points.back());
    return m;
}

double clock_increment(const MRST& mrst, const PathSegment& segment,
                       const LocalTimeIncrements& lt) {
    for (double x : segment.states) {
        if (!mrst.contains(x)) return kInf;
    }
    double delta = 0.0;
    for (const auto& [y, rate] : mrst.atoms) {
        auto it = lt.per_atom.find(y);
        if (it == lt.per_atom.end()) fail("MissingLocalTime", "no local time for an atom");
        delta += rate * it->second;
    }
    if (!mrst.density_values.empty()) {
        if (lt.per_density_cell.size() != mrst.density_values.size())
            fail("MissingLocalTime", "no local time for a density cell");
        for (size_t i = 0; i < mrst.density_values.size(); ++i) {
            const double width = mrst.density_breaks[i + 1] - mrst.density_breaks[i];
            delta += mrst.density_values[i] * lt.per_density_cell[i] * width;
        }
    }
    return delta;
}

StopSample sample_stop(const MRST& mrst, const DiffusionModel& model,
                       const PathSegment& path, double exp_variate,
                       double band_epsilon) {
    StopSample out;
    if (path.states.empty()) fail("PathTooShort", "empty path");
    if (!mrst.contains(path.states.front())) {
        out.tau = 0.0;
        out.state = path.states.front();
        out.voluntary = false;
        return out;
    }
    double clock = 0.0;
    const double inv = 1.0 / (2.0 * band_epsilon);
    for (size_t i = 1; i < path.states.size(); ++i) {
        const double x_prev = path.states[i - 1];
        // accumulate weighted band local time over this step
        for (const auto& [y, rate] : mrst.atoms) {
            if (std::fabs(x_prev - y) < band_epsilon) {
                const double s = model.volatility(x_prev);
                clock += rate * inv * s * s * path.dt;
            }
        }
        for (size_t k = 0; k < mrst.density_values.size(); ++k) {
            if (x_prev > mrst.density_breaks[k] && x_prev < mrst.density_breaks[k + 1]) {
                // occupation identity: integral of density(y) dl^y dy = density(X) sigma^2 dt
                const double s = model.volatility(x_prev);
                clock += mrst.density_values[k] * s * s * path.dt;
            }
        }
        if (clock >= exp_variate) {
            out.tau = i * path.dt;
            out.state = x_prev;
            out.voluntary = true;
            return out;
        }
        if (!mrst.contains(path.states[i])) {
            out.tau = i * path.dt;
            out.state = path.states[i];
            out.voluntary = false;
            return out;
        }
    }
    fail("PathTooShort", "clock not exhausted and path not absorbed");
}

} // namespace woa
