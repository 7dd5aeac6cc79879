#include "woa/game_engine.hpp"

#include <algorithm>
#include <cmath>

#include "woa/tridiag.hpp"

namespace woa {

GameEngine::GameEngine(const DiffusionModel& model, const PayoffSpec& payoffs,
                       const Grid& grid, int n_mesh)
    : model_(model), payoffs_(payoffs), grid_(grid) {
    if (n_mesh <= 0) {
        // at least 10x the grid density, and dense enough for small grids
        n_mesh = std::max(4000, 20 * grid.n_points());
    }
    an1_ = std::make_shared<DiffusionAnalytics>(model, payoffs.r1, n_mesh);
    an2_ = payoffs.r2 == payoffs.r1
               ? an1_
               : std::make_shared<DiffusionAnalytics>(model, payoffs.r2, n_mesh);
    an0_ = payoffs.r1 == 0.0
               ? an1_
               : (payoffs.r2 == 0.0
                      ? an2_
                      : std::make_shared<DiffusionAnalytics>(model, 0.0, n_mesh));

    for (int p : {1, 2}) {
        auto& gt = gtab_[p - 1];
        auto& ft = ftab_[p - 1];
        gt.resize(static_cast<size_t>(grid.n_points()));
        ft.resize(static_cast<size_t>(grid.n_points()));
        for (int j = 0; j < grid.n_points(); ++j) {
            gt[static_cast<size_t>(j)] = payoffs.g(p)(grid[j]);
            ft[static_cast<size_t>(j)] = payoffs.f(p)(grid[j]);
        }
    }
    const int m = grid.n_interior();
    for (int p : {1, 2}) {
        auto& pr = prim_[p - 1];
        pr.reserve(static_cast<size_t>(m));
        const auto& an = p == 1 ? *an1_ : *an2_;
        for (int j = 1; j <= m; ++j) {
            pr.push_back(an.sojourn_primitives(grid[j - 1], grid[j], grid[j + 1], 0.0));
        }
    }
    prim0_.reserve(static_cast<size_t>(m));
    for (int j = 1; j <= m; ++j) {
        prim0_.push_back(an0_->sojourn_primitives(grid[j - 1], grid[j], grid[j + 1], 0.0));
    }
}

const SojournEntry& GameEngine::primitive(int player, int j) const {
    return prim_[player - 1][static_cast<size_t>(j - 1)];
}

const SojournEntry& GameEngine::primitive0(int j) const {
    return prim0_[static_cast<size_t>(j - 1)];
}

namespace {

SojournEntry elastic(const SojournEntry& base, double kappa) {
    SojournEntry e = base;
    if (std::isinf(kappa)) {
        e.a = e.b = 0.0;
        e.c_kill = 1.0;
        return e;
    }
    const double den = 1.0 + kappa * base.g;
    e.a = base.a / den;
    e.b = base.b / den;
    e.c_kill = kappa * base.g / den;
    return e;
}

} // namespace

SojournEntry GameEngine::sojourn(int player, int j, double kappa) const {
    return elastic(primitive(player, j), kappa);
}

SojournEntry GameEngine::sojourn0(int j, double kappa) const {
    return elastic(primitive0(j), kappa);
}

std::vector<double> GameEngine::solve_payoff_system(
    int player, const std::vector<double>& own,
    const std::vector<double>& opp) const {
    const int m = grid_.n_interior();
    std::vector<double> lower(static_cast<size_t>(m), 0.0), diag(static_cast<size_t>(m), 1.0);
    std::vector<double> upper(static_cast<size_t>(m), 0.0), rhs(static_cast<size_t>(m), 0.0);
    for (int j = 1; j <= m; ++j) {
        const size_t i = static_cast<size_t>(j - 1);
        const double lo = own[i], lu = opp[i];
        if (std::isinf(lo)) {
            rhs[i] = g(player, j);  // own immediate stop wins ties
            continue;
        }
        if (std::isinf(lu)) {
            rhs[i] = f(player, j);
            continue;
        }
        const double kappa = lo + lu;
        const SojournEntry e = sojourn(player, j, kappa);
        if (j + 1 <= m) upper[i] = -e.a; else rhs[i] += e.a * g(player, m + 1);
        if (j - 1 >= 1) lower[i] = -e.b; else rhs[i] += e.b * g(player, 0);
        if (kappa > 0.0) {
            rhs[i] += e.c_kill * (lo * g(player, j) + lu * f(player, j)) / kappa;
        }
    }
    auto w_int = solve_tridiagonal(lower, diag, upper, rhs);
    std::vector<double> w(static_cast<size_t>(grid_.n_points()));
    w.front() = g(player, 0);
    w.back() = g(player, grid_.n_points() - 1);
    std::copy(w_int.begin(), w_int.end(), w.begin() + 1);
    return w;
}

ValueVectors GameEngine::payoff_values(const StrategyProfile& profile) const {
    ValueVectors v;
    v.w1 = solve_payoff_system(1, profile.rates1, profile.rates2);
    v.w2 = solve_payoff_system(2, profile.rates2, profile.rates1);
    return v;
}

std::vector<double> GameEngine::continuation_F(
    const std::vector<double>& opponent_rates, int player) const {
    const std::vector<double> zeros(static_cast<size_t>(grid_.n_interior()), 0.0);
    return solve_payoff_system(player, zeros, opponent_rates);
}

BestResponseSolution GameEngine::best_response(
    const std::vector<double>& opponent_rates, int player) const {
    const int m = grid_.n_interior();
    BestResponseSolution sol;
    sol.stop_set.assign(static_cast<size_t>(m), false);
    const int max_iters = 4 * m + 20;
    for (int it = 0; it < max_iters; ++it) {
        sol.iterations = it + 1;
        std::vector<double> lower(static_cast<size_t>(m), 0.0), diag(static_cast<size_t>(m), 1.0);
        std::vector<double> upper(static_cast<size_t>(m), 0.0), rhs(static_cast<size_t>(m), 0.0);
        for (int j = 1; j <= m; ++j) {
            const size_t i = static_cast<size_t>(j - 1);
            if (sol.stop_set[i]) {
                rhs[i] = g(player, j);
                continue;
            }
            const SojournEntry e = sojourn(player, j, opponent_rates[i]);
            if (j + 1 <= m) upper[i] = -e.a; else rhs[i] += e.a * g(player, m + 1);
            if (j - 1 >= 1) lower[i] = -e.b; else rhs[i] += e.b * g(player, 0);
            rhs[i] += e.c_kill * f(player, j);
        }
        auto V_int = solve_tridiagonal(lower, diag, upper, rhs);
        sol.value.assign(static_cast<size_t>(grid_.n_points()), 0.0);
        sol.value.front() = g(player, 0);
        sol.value.back() = g(player, grid_.n_points() - 1);
        std::copy(V_int.begin(), V_int.end(), sol.value.begin() + 1);

        bool changed = false;
        for (int j = 1; j <= m; ++j) {
            const size_t i = static_cast<size_t>(j - 1);
            const SojournEntry e = sojourn(player, j, opponent_rates[i]);
            const double q = e.a * sol.value[static_cast<size_t>(j + 1)] +
                             e.b * sol.value[static_cast<size_t>(j - 1)] +
                             e.c_kill * f(player, j);
            const bool stop = g(player, j) > q + 1e-14;
            if (stop != sol.stop_set[i]) {
                sol.stop_set[i] = stop;
                changed = true;
            }
        }
        if (!changed) {
            // largest optimal time: also stop where values tie exactly
            for (int j = 1; j <= m; ++j) {
                const size_t i = static_cast<size_t>(j - 1);
                if (!sol.stop_set[i] &&
                    std::fabs(sol.value[static_cast<size_t>(j)] - g(player, j)) <= 1e-12) {
                    sol.stop_set[i] = true;
                }
            }
            return sol;
        }
    }
    fail("NoConvergence", "policy iteration did not settle");
}

std::vector<std::vector<double>> GameEngine::complementarity_residual(
    const StrategyProfile& profile) const {
    const ValueVectors v = payoff_values(profile);
    const int m = grid_.n_interior();
    std::vector<std::vector<double>> res(2, std::vector<double>(static_cast<size_t>(m), 0.0));
    for (int p : {1, 2}) {
        const auto& own = profile.rates(p);
        const auto& opp = profile.rates(3 - p);
        const auto& w = v.w(p);
        for (int j = 1; j <= m; ++j) {
            const size_t i = static_cast<size_t>(j - 1);
            const SojournEntry e = sojourn(p, j, opp[i]);
            const double q = e.a * w[static_cast<size_t>(j + 1)] +
                             e.b * w[static_cast<size_t>(j - 1)] + e.c_kill * f(p, j);
            const double s = g(p, j);
            const double u = iota_unit(own[i]);
            double r;
            if (u <= 0.0) r = std::max(s - q, 0.0);
            else if (u >= 1.0) r = std::max(q - s, 0.0);
            else r = std::fabs(s - q);
            // (nonstop): opponent stops immediately and waiting is strictly
            // better, so any own stopping mass is a violation
            const double uo = iota_unit(opp[i]);
            if (uo >= 1.0 && f(p, j) > g(p, j) && u > 0.0) r += u;
            res[static_cast<size_t>(p - 1)][i] = r;
        }
    }
    return res;
}

double GameEngine::residual_max(const StrategyProfile& profile) const {
    const auto res = complementarity_residual(profile);
    double worst = 0.0;
    for (const auto& row : res) {
        for (double v : row) worst = std::max(worst, v);
    }
    return worst;
}

} // namespace woa
