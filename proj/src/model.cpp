#include "woa/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace woa {

namespace {

void check_finite(const ScalarFn& fn, double lo, double hi, int n,
                  const char* what) {
    for (int i = 0; i <= n; ++i) {
        const double x = lo + (hi - lo) * i / n;
        const double v = fn(x);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << what << " is not finite at x=" << x;
            fail("NonFiniteCoefficient", os.str());
        }
    }
}

} // namespace

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const AssumptionCheck& c) { return c.passed; });
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << c.name << ": " << (c.passed ? "pass" : "FAIL");
        if (!c.passed) os << " (violation " << c.worst << " at x=" << c.witness << ")";
        os << "\n";
    }
    if (zero_discount_flagged)
        os << "note: some discount rate is 0; relies on a.s. absorption\n";
    return os.str();
}

DiffusionModel build_model(const RawModelSpec& spec) {
    if (!(spec.lower < spec.upper) || !std::isfinite(spec.lower) ||
        !std::isfinite(spec.upper)) {
        fail("UnboundedInterval", "need finite lower < upper");
    }
    DiffusionModel m;
    m.lower = spec.lower;
    m.upper = spec.upper;
    m.family = spec.family;
    if (spec.family == "bm") {
        const double s = spec.sigma;
        if (!(s > 0)) fail("NonPositiveVolatility", "bm sigma must be > 0");
        m.drift = [](double) { return 0.0; };
        m.volatility = [s](double) { return s; };
    } else if (spec.family == "ou") {
        const double th = spec.theta, mean = spec.mean, s = spec.sigma;
        if (!(s > 0)) fail("NonPositiveVolatility", "ou sigma must be > 0");
        m.drift = [th, mean](double x) { return th * (mean - x); };
        m.volatility = [s](double) { return s; };
    } else if (spec.family == "gbm") {
        const double mu = spec.gbm_mu, s = spec.gbm_sigma;
        if (!(s > 0)) fail("NonPositiveVolatility", "gbm sigma must be > 0");
        if (!(spec.lower > 0)) fail("UnboundedInterval", "gbm needs lower > 0");
        m.drift = [mu](double x) { return mu * x; };
        m.volatility = [s](double x) { return s * x; };
    } else if (spec.family == "custom") {
        if (!spec.custom_drift || !spec.custom_volatility)
            fail("NonFiniteCoefficient", "custom family needs drift and volatility");
        m.drift = spec.custom_drift;
        m.volatility = spec.custom_volatility;
    } else {
        fail("NonFiniteCoefficient", "unknown model family: " + spec.family);
    }

    const int n = 400;
    check_finite(m.drift, m.lower, m.upper, n, "drift");
    check_finite(m.volatility, m.lower, m.upper, n, "volatility");
    for (int i = 0; i <= n; ++i) {
        const double x = m.lower + m.length() * i / n;
        if (!(m.volatility(x) > 1e-12)) {
            std::ostringstream os;
            os << "sigma(" << x << ") = " << m.volatility(x);
            fail("NonPositiveVolatility", os.str());
        }
    }
    return m;
}

ValidationReport validate_assumptions(const DiffusionModel& model,
                                      const PayoffSpec& payoffs,
                                      int mesh_density) {
    ValidationReport rep;
    const int n = std::max(mesh_density - 1, 2);

    auto sweep = [&](const char* name, auto violation) {
        AssumptionCheck c;
        c.name = name;
        c.passed = true;
        for (int i = 0; i <= n; ++i) {
            const double x = model.lower + model.length() * i / n;
            const double v = violation(x);
            if (v > c.worst) {
                c.worst = v;
                c.witness = x;
                c.passed = false;
            }
        }
        rep.checks.push_back(c);
    };

    for (int p : {1, 2}) {
        const auto& g = payoffs.g(p);
        const auto& f = payoffs.f(p);
        const std::string tag = "player" + std::to_string(p);
        sweep(("(A) g <= f, " + tag).c_str(),
              [&](double x) { return std::max(g(x) - f(x), 0.0); });
        sweep(("g >= 0, " + tag).c_str(),
              [&](double x) { return std::max(-g(x), 0.0); });
        sweep(("f >= 0, " + tag).c_str(),
              [&](double x) { return std::max(-f(x), 0.0); });

        AssumptionCheck c;
        c.name = "(C) f = g at boundary, " + tag;
        c.passed = true;
        for (double y : {model.lower, model.upper}) {
            const double d = std::fabs(f(y) - g(y));
            if (d > 1e-12 && d > c.worst) {
                c.worst = d;
                c.witness = y;
                c.passed = false;
            }
        }
        rep.checks.push_back(c);
    }

    {
        AssumptionCheck c;
        c.name = "(B) absorbing compact interval";
        c.passed = std::isfinite(model.lower) && std::isfinite(model.upper) &&
                   model.lower < model.upper;
        rep.checks.push_back(c);
    }
    rep.zero_discount_flagged = (payoffs.r1 == 0.0 || payoffs.r2 == 0.0);
    return rep;
}

Grid build_grid(const DiffusionModel& model, int n_interior,
                GridPlacement placement,
                const std::vector<double>& explicit_points) {
    Grid g;
    if (placement == GridPlacement::Explicit) {
        g.points = explicit_points;
        std::sort(g.points.begin(), g.points.end());
        for (size_t i = 1; i < g.points.size(); ++i) {
            if (g.points[i] == g.points[i - 1])
                fail("DuplicatePoints", "explicit grid has duplicates");
        }
        for (double x : g.points) {
            if (x < model.lower || x > model.upper)
                fail("PointOutsideInterval", "grid point outside the interval");
        }
        if (g.points.empty() || g.points.front() != model.lower ||
            g.points.back() != model.upper) {
            fail("PointOutsideInterval", "explicit grid must include both bounds");
        }
        return g;
    }
    if (n_interior < 1) fail("PointOutsideInterval", "need n_interior >= 1");
    g.points.push_back(model.lower);
    for (int j = 1; j <= n_interior; ++j) {
        double x;
        if (placement == GridPlacement::Chebyshev) {
            const double t = std::cos(M_PI * (n_interior + 1 - j) / (n_interior + 1));
            x = model.midpoint() + 0.5 * model.length() * t;
        } else {
            x = model.lower + model.length() * j / (n_interior + 1);
        }
        g.points.push_back(x);
    }
    g.points.push_back(model.upper);
    return g;
}

Grid refine_grid(const Grid& grid) {
    Grid fine;
    for (size_t i = 0; i + 1 < grid.points.size(); ++i) {
        fine.points.push_back(grid.points[i]);
        fine.points.push_back(0.5 * (grid.points[i] + grid.points[i + 1]));
    }
    fine.points.push_back(grid.points.back());
    return fine;
}

bool is_nested(const Grid& coarse, const Grid& fine, double tol) {
    size_t k = 0;
    for (double x : coarse.points) {
        while (k < fine.points.size() && fine.points[k] < x - tol) ++k;
        if (k >= fine.points.size() || std::fabs(fine.points[k] - x) > tol)
            return false;
    }
    return true;
}

} // namespace woa
