#pragma once

#include <functional>
#include <string>
#include <vector>

#include "woa/errors.hpp"

namespace woa {

using ScalarFn = std::function<double(double)>;

// One-dimensional regular diffusion on a compact interval, absorbed at both
// endpoints.
struct DiffusionModel {
    double lower = 0.0;
    double upper = 1.0;
    ScalarFn drift;       // mu(x)
    ScalarFn volatility;  // sigma(x) > 0
    std::string family;   // "bm", "ou", "gbm" or "custom"

    double length() const { return upper - lower; }
    double midpoint() const { return 0.5 * (lower + upper); }
};

struct PayoffSpec {
    ScalarFn g1, f1, g2, f2;
    double r1 = 0.0;
    double r2 = 0.0;

    const ScalarFn& g(int player) const { return player == 1 ? g1 : g2; }
    const ScalarFn& f(int player) const { return player == 1 ? f1 : f2; }
    double r(int player) const { return player == 1 ? r1 : r2; }
};

struct Grid {
    std::vector<double> points;  // strictly increasing, includes both bounds

    int n_points() const { return static_cast<int>(points.size()); }
    int n_interior() const { return n_points() - 2; }
    bool is_interior(int j) const { return j > 0 && j + 1 < n_points(); }
    double operator[](int j) const { return points[static_cast<size_t>(j)]; }
};

struct AssumptionCheck {
    std::string name;
    bool passed = false;
    double worst = 0.0;     // magnitude of the worst violation (0 if passed)
    double witness = 0.0;   // state where it occurs
};

struct ValidationReport {
    std::vector<AssumptionCheck> checks;
    bool zero_discount_flagged = false;  // r_i = 0 supported but noted
    bool all_passed() const;
    std::string summary() const;
};

struct RawModelSpec {
    std::string family;               // "bm" | "ou" | "gbm" | "custom"
    double lower = 0.0, upper = 1.0;
    double sigma = 1.0;               // bm
    double theta = 0.0, mean = 0.0;   // ou: mu(x) = theta*(mean - x)
    double gbm_mu = 0.0, gbm_sigma = 1.0;
    ScalarFn custom_drift, custom_volatility;
};

DiffusionModel build_model(const RawModelSpec& spec);

// Assumptions (A) g_i <= f_i, nonnegativity, and (C) f_i = g_i at the
// boundary, checked on a uniform validation mesh.
ValidationReport validate_assumptions(const DiffusionModel& model,
                                      const PayoffSpec& payoffs,
                                      int mesh_density = 401);

enum class GridPlacement { Uniform, Chebyshev, Explicit };

Grid build_grid(const DiffusionModel& model, int n_interior,
                GridPlacement placement = GridPlacement::Uniform,
                const std::vector<double>& explicit_points = {});

// Next grid in the nested uniform schedule: halve every interval.
Grid refine_grid(const Grid& grid);

bool is_nested(const Grid& coarse, const Grid& fine, double tol = 1e-12);

} // namespace woa
