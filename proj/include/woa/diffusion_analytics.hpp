#pragma once

#include <vector>

#include "woa/model.hpp"

namespace woa {

// Increasing / decreasing positive r-harmonic pair, tabulated with
// derivatives on a dense mesh.  Queries off-mesh use cubic Hermite
// interpolation; mesh nodes are exact.
class HarmonicPair {
public:
    HarmonicPair() = default;
    HarmonicPair(const DiffusionModel& model, double r, int n_mesh);

    double r() const { return r_; }
    const std::vector<double>& mesh() const { return mesh_; }

    // value and derivative of psi_plus / psi_minus at x
    double plus(double x) const;
    double plus_deriv(double x) const;
    double minus(double x) const;
    double minus_deriv(double x) const;

    // Max over mesh of |1/2 sigma^2 psi'' + mu psi' - r psi| / scale, using a
    // finite-difference second derivative (independent of the integrator).
    double ode_residual(const DiffusionModel& model) const;
    // Relative spread of (psi+' psi- - psi-' psi+) / s'(x) over the mesh.
    double wronskian_defect(const DiffusionModel& model) const;

private:
    struct Node { double v, dv; };
    int locate(double x) const;
    double eval(const std::vector<Node>& t, double x, bool deriv) const;

    double r_ = 0.0;
    double lo_ = 0.0, hi_ = 1.0;
    std::vector<double> mesh_;
    std::vector<Node> up_, dn_;
};

struct SojournEntry {
    double a = 0.0;       // discounted exit up before kill
    double b = 0.0;       // discounted exit down before kill
    double c_kill = 0.0;  // discounted kill before exit
    double g = 0.0;       // discounted Green local time at the center (kappa=0)
};

class DiffusionAnalytics {
public:
    DiffusionAnalytics(const DiffusionModel& model, double r,
                       int n_mesh = 4000);

    // s'(x) = exp(-int_{x0}^x 2 mu / sigma^2), x0 = interval midpoint.
    double scale_density(double x) const;
    const HarmonicPair& harmonic_pair() const { return pair_; }

    // (e_low, e_up): discounted two-sided exit through l / u starting from x.
    std::pair<double, double> discounted_two_sided_exit(double l, double x,
                                                        double u) const;
    // g = E_c[int e^{-rs} dl^c up to first exit of (l,u)].
    double green_local_time(double l, double c, double u) const;

    // Elastic-killing identity and independent ODE-with-atom solve; the two
    // must agree to relative 1e-8 or MethodDisagreement is thrown.
    SojournEntry sojourn_primitives(double l, double c, double u,
                                    double kappa) const;

    const DiffusionModel& model() const { return model_; }
    double discount() const { return r_; }

private:
    SojournEntry identity_method(double l, double c, double u, double kappa) const;
    SojournEntry atom_ode_method(double l, double c, double u, double kappa) const;
    void check_bracket(double l, double c, double u) const;

    DiffusionModel model_;
    double r_;
    HarmonicPair pair_;
};

// Standalone wrappers matching the operation names.
double scale_density(const DiffusionModel& model, double x);
HarmonicPair solve_harmonic_pair(const DiffusionModel& model, double r,
                                 int n_mesh = 4000);

} // namespace woa
