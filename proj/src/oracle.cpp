#include "woa/oracle.hpp"

#include <cmath>

namespace woa {

namespace {

// continuation value at the single interior point against opponent kill rate
double one_point_q(const GameEngine& eng, int player, double kappa) {
    const SojournEntry e = eng.sojourn(player, 1, kappa);
    return e.a * eng.g(player, 2) + e.b * eng.g(player, 0) +
           e.c_kill * eng.f(player, 1);
}

} // namespace

OnePointRates oracle_one_point_rates(const GameEngine& engine) {
    if (engine.n_interior() != 1)
        fail("PointOutsideInterval", "oracle needs exactly one interior point");
    OnePointRates out;
    for (int p : {1, 2}) {
        double& opp_rate = p == 1 ? out.rate2 : out.rate1;
        bool& mixing = p == 1 ? out.mixing1 : out.mixing2;
        const double gc = engine.g(p, 1);
        const double fc = engine.f(p, 1);
        if (fc - gc < 1e-13) {
            opp_rate = kInf;  // trivial point: both stop immediately
            mixing = false;
            continue;
        }
        if (one_point_q(engine, p, 0.0) >= gc) {
            opp_rate = 0.0;  // continuing beats stopping with no subsidy
            mixing = false;
            continue;
        }
        // q(kappa) rises monotonically toward f > g; bracket then bisect
        double hi = 1.0;
        while (one_point_q(engine, p, hi) < gc) {
            hi *= 2.0;
            if (hi > 1e18) fail("NoConvergence", "one-point bisection bracket failed");
        }
        double lo = 0.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (one_point_q(engine, p, mid) < gc) lo = mid;
            else hi = mid;
        }
        opp_rate = 0.5 * (lo + hi);
        mixing = true;
    }
    return out;
}

EnumeratedBestResponse oracle_enumerate_best_response(
    const GameEngine& engine, const std::vector<double>& opponent_rates,
    int player) {
    const int m = engine.n_interior();
    if (m > 12) fail("PointOutsideInterval", "enumeration oracle limited to small grids");

    EnumeratedBestResponse out;
    const size_t np = static_cast<size_t>(engine.grid().n_points());
    out.value.assign(np, -kInf);
    std::vector<std::vector<double>> all(static_cast<size_t>(1) << m);

    StrategyProfile prof;
    prof.grid = engine.grid();
    prof.rates1.assign(static_cast<size_t>(m), 0.0);
    prof.rates2.assign(static_cast<size_t>(m), 0.0);
    auto& opp = prof.rates(3 - player);
    opp = opponent_rates;

    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        auto& own = prof.rates(player);
        for (int j = 0; j < m; ++j) {
            own[static_cast<size_t>(j)] = (mask >> j) & 1u ? kInf : 0.0;
        }
        const ValueVectors v = engine.payoff_values(prof);
        all[mask] = v.w(player);
        for (size_t i = 0; i < np; ++i) {
            out.value[i] = std::max(out.value[i], all[mask][i]);
        }
    }

    // largest pure stop set attaining the pointwise maximum everywhere
    int best_mask = -1, best_count = -1;
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        bool attains = true;
        for (size_t i = 0; i < np && attains; ++i) {
            if (all[mask][i] < out.value[i] - 1e-12) attains = false;
        }
        if (!attains) continue;
        const int count = __builtin_popcount(mask);
        if (count > best_count || (count == best_count && static_cast<int>(mask) > best_mask)) {
            best_mask = static_cast<int>(mask);
            best_count = count;
        }
    }
    out.argmax_stop.assign(static_cast<size_t>(m), false);
    if (best_mask >= 0) {
        for (int j = 0; j < m; ++j) {
            out.argmax_stop[static_cast<size_t>(j)] = (best_mask >> j) & 1;
        }
    }
    return out;
}

} // namespace woa
