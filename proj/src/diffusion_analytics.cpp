#include "woa/diffusion_analytics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace woa {

namespace {

// 3x3 Gaussian elimination with partial pivoting.
std::array<double, 3> solve3(std::array<std::array<double, 3>, 3> M,
                             std::array<double, 3> b) {
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int r = col + 1; r < 3; ++r) {
            if (std::fabs(M[r][col]) > std::fabs(M[piv][col])) piv = r;
        }
        std::swap(M[col], M[piv]);
        std::swap(b[col], b[piv]);
        if (M[col][col] == 0.0) fail("SingularSystem", "singular 3x3 system");
        for (int r = col + 1; r < 3; ++r) {
            const double m = M[r][col] / M[col][col];
            for (int k = col; k < 3; ++k) M[r][k] -= m * M[col][k];
            b[r] -= m * b[col];
        }
    }
    std::array<double, 3> x{};
    for (int r = 2; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < 3; ++k) s -= M[r][k] * x[k];
        x[r] = s / M[r][r];
    }
    return x;
}

} // namespace

HarmonicPair::HarmonicPair(const DiffusionModel& model, double r, int n_mesh) {
    if (n_mesh % 2) ++n_mesh;  // keep the midpoint on the mesh
    r_ = r;
    lo_ = model.lower;
    hi_ = model.upper;
    const int n = n_mesh;
    const double h = (hi_ - lo_) / n;
    mesh_.resize(static_cast<size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) mesh_[static_cast<size_t>(i)] = lo_ + h * i;
    mesh_.back() = hi_;

    auto rhs = [&](double x, double v, double dv) {
        const double s = model.volatility(x);
        return 2.0 * (r * v - model.drift(x) * dv) / (s * s);
    };

    // RK4 with rescaling: the equation is linear, so dividing the state by a
    // constant mid-integration only shifts the stored log-offset.
    auto integrate = [&](double v0, double dv0, int dir) {
        std::vector<Node> tab(mesh_.size());
        std::vector<double> off(mesh_.size(), 0.0);
        double v = v0, dv = dv0, S = 0.0;
        const int start = dir > 0 ? 0 : n;
        tab[static_cast<size_t>(start)] = {v, dv};
        const int nsub = 8;
        const double hh = dir * h / nsub;
        for (int i = start; dir > 0 ? i < n : i > 0; i += dir) {
            const double x0 = mesh_[static_cast<size_t>(i)];
            for (int k = 0; k < nsub; ++k) {
                const double x = x0 + hh * k;
                auto f = [&](double xx, double vv, double dd) {
                    return std::pair<double, double>{dd, rhs(xx, vv, dd)};
                };
                auto [k1v, k1d] = f(x, v, dv);
                auto [k2v, k2d] = f(x + hh / 2, v + hh / 2 * k1v, dv + hh / 2 * k1d);
                auto [k3v, k3d] = f(x + hh / 2, v + hh / 2 * k2v, dv + hh / 2 * k2d);
                auto [k4v, k4d] = f(x + hh, v + hh * k3v, dv + hh * k3d);
                v += hh / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
                dv += hh / 6 * (k1d + 2 * k2d + 2 * k3d + k4d);
            }
            if (!std::isfinite(v) || !std::isfinite(dv)) {
                std::ostringstream os;
                os << "integration blew up near x=" << mesh_[static_cast<size_t>(i)]
                   << " (r=" << r << ")";
                fail("IntegrationBlowup", os.str());
            }
            const double mag = std::fabs(v);
            if (mag > 1e100) {
                v /= mag;
                dv /= mag;
                S += std::log(mag);
            }
            tab[static_cast<size_t>(i + dir)] = {v, dv};
            off[static_cast<size_t>(i + dir)] = S;
        }
        // normalize to value 1 at the midpoint node
        const size_t i0 = static_cast<size_t>(n / 2);
        const double vmid = tab[i0].v;
        const double Smid = off[i0];
        for (size_t i = 0; i < tab.size(); ++i) {
            const double factor = std::exp(off[i] - Smid) / vmid;
            tab[i].v *= factor;
            tab[i].dv *= factor;
            if (!std::isfinite(tab[i].v)) {
                fail("IntegrationBlowup", "harmonic function overflows after normalization");
            }
        }
        return tab;
    };

    if (r > 0.0) {
        up_ = integrate(1.0, 0.0, +1);
        dn_ = integrate(1.0, 0.0, -1);
    } else {
        // degenerate pair: psi+ = scale function (any positive multiple),
        // psi- = constant 1
        up_ = integrate(0.0, 1.0, +1);
        dn_.assign(mesh_.size(), {1.0, 0.0});
    }
}

int HarmonicPair::locate(double x) const {
    const int n = static_cast<int>(mesh_.size()) - 1;
    const double h = (hi_ - lo_) / n;
    int i = static_cast<int>(std::floor((x - lo_) / h));
    return std::clamp(i, 0, n - 1);
}

double HarmonicPair::eval(const std::vector<Node>& t, double x, bool deriv) const {
    const int i = locate(x);
    const double x0 = mesh_[static_cast<size_t>(i)];
    const double x1 = mesh_[static_cast<size_t>(i) + 1];
    const double h = x1 - x0;
    const double s = (x - x0) / h;
    if (s == 0.0) return deriv ? t[static_cast<size_t>(i)].dv : t[static_cast<size_t>(i)].v;
    if (s == 1.0) return deriv ? t[static_cast<size_t>(i) + 1].dv : t[static_cast<size_t>(i) + 1].v;
    const double v0 = t[static_cast<size_t>(i)].v, d0 = t[static_cast<size_t>(i)].dv;
    const double v1 = t[static_cast<size_t>(i) + 1].v, d1 = t[static_cast<size_t>(i) + 1].dv;
    // cubic Hermite basis
    const double s2 = s * s, s3 = s2 * s;
    if (!deriv) {
        return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * h * d0 +
               (-2 * s3 + 3 * s2) * v1 + (s3 - s2) * h * d1;
    }
    return ((6 * s2 - 6 * s) * v0 + (3 * s2 - 4 * s + 1) * h * d0 +
            (-6 * s2 + 6 * s) * v1 + (3 * s2 - 2 * s) * h * d1) / h;
}

double HarmonicPair::plus(double x) const { return eval(up_, x, false); }
double HarmonicPair::plus_deriv(double x) const { return eval(up_, x, true); }
double HarmonicPair::minus(double x) const { return eval(dn_, x, false); }
double HarmonicPair::minus_deriv(double x) const { return eval(dn_, x, true); }

double HarmonicPair::ode_residual(const DiffusionModel& model) const {
    // independent check: second derivative from a 4th-order stencil over the
    // stored first derivatives
    const int n = static_cast<int>(mesh_.size()) - 1;
    const double h = (hi_ - lo_) / n;
    double worst = 0.0;
    for (const auto* tab : {&up_, &dn_}) {
        if (tab == &dn_ && r_ == 0.0) continue;  // constant by construction
        for (int i = 2; i + 2 <= n; ++i) {
            const auto& t = *tab;
            const size_t u = static_cast<size_t>(i);
            const double d2 = (-t[u + 2].dv + 8 * t[u + 1].dv - 8 * t[u - 1].dv +
                               t[u - 2].dv) / (12 * h);
            const double x = mesh_[u];
            const double s = model.volatility(x);
            const double res = 0.5 * s * s * d2 + model.drift(x) * t[u].dv - r_ * t[u].v;
            const double scale = std::max({1.0, std::fabs(r_ * t[u].v),
                                           std::fabs(model.drift(x) * t[u].dv)});
            worst = std::max(worst, std::fabs(res) / scale);
        }
    }
    return worst;
}

double HarmonicPair::wronskian_defect(const DiffusionModel& model) const {
    // W / s' should be constant; return the relative spread over the mesh
    double lo_ratio = 0.0, hi_ratio = 0.0;
    double logsp = 0.0;  // log s'(x) accumulated by the trapezoid rule
    bool first = true;
    for (size_t i = 0; i < mesh_.size(); ++i) {
        if (i > 0) {
            const double a = mesh_[i - 1], b = mesh_[i];
            auto integrand = [&](double x) {
                const double s = model.volatility(x);
                return 2.0 * model.drift(x) / (s * s);
            };
            const double m = 0.5 * (a + b);
            logsp -= (b - a) / 6.0 *
                     (integrand(a) + 4.0 * integrand(m) + integrand(b));
        }
        const double W = up_[i].dv * dn_[i].v - dn_[i].dv * up_[i].v;
        const double ratio = W / std::exp(logsp);
        if (first || ratio < lo_ratio) lo_ratio = ratio;
        if (first || ratio > hi_ratio) hi_ratio = ratio;
        first = false;
    }
    const double mid = 0.5 * (lo_ratio + hi_ratio);
    return std::fabs(mid) > 0 ? (hi_ratio - lo_ratio) / std::fabs(mid) : 0.0;
}

DiffusionAnalytics::DiffusionAnalytics(const DiffusionModel& model, double r,
                                       int n_mesh)
    : model_(model), r_(r), pair_(model, r, n_mesh) {}

double DiffusionAnalytics::scale_density(double x) const {
    // exp(-int_{x0}^x 2 mu / sigma^2) by adaptive-free composite Simpson
    const double x0 = model_.midpoint();
    auto integrand = [&](double t) {
        const double s = model_.volatility(t);
        return 2.0 * model_.drift(t) / (s * s);
    };
    const int n = 200;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = x0 + (x - x0) * i / n;
        const double b = x0 + (x - x0) * (i + 1) / n;
        acc += (b - a) / 6.0 * (integrand(a) + 4.0 * integrand(0.5 * (a + b)) +
                                integrand(b));
    }
    if (!std::isfinite(acc)) fail("QuadratureFailure", "scale density quadrature failed");
    return std::exp(-acc);
}

void DiffusionAnalytics::check_bracket(double l, double c, double u) const {
    if (!(l < c && c < u)) fail("DegenerateBracket", "need l < c < u");
}

std::pair<double, double> DiffusionAnalytics::discounted_two_sided_exit(
    double l, double x, double u) const {
    if (l >= u) fail("DegenerateBracket", "need l < u");
    const double pl = pair_.plus(l), ml = pair_.minus(l);
    const double px = pair_.plus(x), mx = pair_.minus(x);
    const double pu = pair_.plus(u), mu = pair_.minus(u);
    const double e_up = (px * ml - mx * pl) / (pu * ml - mu * pl);
    const double e_low = (mx * pu - px * mu) / (ml * pu - pl * mu);
    return {std::max(e_low, 0.0), std::max(e_up, 0.0)};
}

double DiffusionAnalytics::green_local_time(double l, double c, double u) const {
    check_bracket(l, c, u);
    const double pl = pair_.plus(l), ml = pair_.minus(l);
    const double pc = pair_.plus(c), mc = pair_.minus(c);
    const double pu = pair_.plus(u), mu = pair_.minus(u);
    const double dpc = pair_.plus_deriv(c), dmc = pair_.minus_deriv(c);
    const double hl = pc * ml - mc * pl;       // vanishes at l
    const double hu = mc * pu - pc * mu;       // vanishes at u
    const double dhl = dpc * ml - dmc * pl;
    const double dhu = dmc * pu - dpc * mu;
    return 2.0 * hl * hu / (dhl * hu - dhu * hl);
}

SojournEntry DiffusionAnalytics::identity_method(double l, double c, double u,
                                                 double kappa) const {
    SojournEntry e;
    auto [e_low, e_up] = discounted_two_sided_exit(l, c, u);
    e.g = green_local_time(l, c, u);
    if (std::isinf(kappa)) {
        e.a = e.b = 0.0;
        e.c_kill = 1.0;
        return e;
    }
    const double den = 1.0 + kappa * e.g;
    e.a = e_up / den;
    e.b = e_low / den;
    e.c_kill = kappa * e.g / den;
    return e;
}

SojournEntry DiffusionAnalytics::atom_ode_method(double l, double c, double u,
                                                 double kappa) const {
    SojournEntry e;
    e.g = green_local_time(l, c, u);
    if (std::isinf(kappa)) {
        e.a = e.b = 0.0;
        e.c_kill = 1.0;
        return e;
    }
    const double pl = pair_.plus(l), ml = pair_.minus(l);
    const double pc = pair_.plus(c), mc = pair_.minus(c);
    const double pu = pair_.plus(u), mu = pair_.minus(u);
    const double dpc = pair_.plus_deriv(c), dmc = pair_.minus_deriv(c);
    const double hl = pc * ml - mc * pl;
    const double dhl = dpc * ml - dmc * pl;
    const double hu = mc * pu - pc * mu;
    const double dhu = dmc * pu - dpc * mu;

    // exit up: v = A h_l on (l,c), v = C psi+ + D psi- on (c,u), v(u)=1;
    // continuity at c and the local-time jump v'(c+) - v'(c-) = 2 kappa v(c)
    {
        auto x = solve3({{{hl, -pc, -mc},
                          {0.0, pu, mu},
                          {-dhl - 2.0 * kappa * hl, dpc, dmc}}},
                        {0.0, 1.0, 0.0});
        e.a = x[0] * hl;
    }
    // exit down: v = A h_u on (c,u), v = C psi+ + D psi- on (l,c), v(l)=1
    {
        auto x = solve3({{{hu, -pc, -mc},
                          {0.0, pl, ml},
                          {dhu - 2.0 * kappa * hu, -dpc, -dmc}}},
                        {0.0, 1.0, 0.0});
        e.b = x[0] * hu;
    }
    // kill value: w = A h_l on (l,c), B h_u on (c,u), jump = 2k (w(c) - 1)
    {
        const double denom = dhu / hu - dhl / hl - 2.0 * kappa;
        e.c_kill = -2.0 * kappa / denom;
    }
    return e;
}

SojournEntry DiffusionAnalytics::sojourn_primitives(double l, double c, double u,
                                                    double kappa) const {
    check_bracket(l, c, u);
    if (kappa < 0 || std::isnan(kappa)) fail("NegativeRate", "kappa must be in [0, inf]");
    const SojournEntry e1 = identity_method(l, c, u, kappa);
    const SojournEntry e2 = atom_ode_method(l, c, u, kappa);
    auto close = [](double x, double y) {
        return std::fabs(x - y) <= 1e-8 * std::max({1.0, std::fabs(x), std::fabs(y)});
    };
    if (!close(e1.a, e2.a) || !close(e1.b, e2.b) || !close(e1.c_kill, e2.c_kill)) {
        std::ostringstream os;
        os << "elastic identity (" << e1.a << "," << e1.b << "," << e1.c_kill
           << ") vs atom ODE (" << e2.a << "," << e2.b << "," << e2.c_kill
           << ") at c=" << c << " kappa=" << kappa;
        fail("MethodDisagreement", os.str());
    }
    return e1;
}

double scale_density(const DiffusionModel& model, double x) {
    DiffusionAnalytics an(model, 0.0, 64);
    return an.scale_density(x);
}

HarmonicPair solve_harmonic_pair(const DiffusionModel& model, double r,
                                 int n_mesh) {
    return HarmonicPair(model, r, n_mesh);
}

} // namespace woa
