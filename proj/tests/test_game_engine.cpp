#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "woa/game_engine.hpp"
#include "woa/oracle.hpp"
#include "woa/solver.hpp"

using namespace woa;

namespace {

DiffusionModel unit_bm() {
    RawModelSpec s;
    s.family = "bm";
    s.lower = 0.0;
    s.upper = 1.0;
    s.sigma = 1.0;
    return build_model(s);
}

PayoffSpec woa_payoffs(double r1 = 5.0, double r2 = 5.0) {
    PayoffSpec p;
    p.g1 = p.g2 = [](double x) { return 0.6 + 0.35 * std::cos(2.0 * M_PI * x); };
    p.f1 = p.f2 = [](double x) {
        return 0.6 + 0.35 * std::cos(2.0 * M_PI * x) + 0.3 * x * (1.0 - x);
    };
    p.r1 = r1;
    p.r2 = r2;
    return p;
}

PayoffSpec flat_payoffs(double r1 = 0.5, double r2 = 0.5) {
    PayoffSpec p;
    p.g1 = p.g2 = [](double) { return 1.0; };
    p.f1 = p.f2 = [](double x) { return 1.0 + x * (1.0 - x); };
    p.r1 = r1;
    p.r2 = r2;
    return p;
}

StrategyProfile make_profile(const Grid& g, std::vector<double> r1,
                             std::vector<double> r2) {
    StrategyProfile p;
    p.grid = g;
    p.rates1 = std::move(r1);
    p.rates2 = std::move(r2);
    return p;
}

} // namespace

TEST_CASE("payoff values: immediate own stopping pays g everywhere") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    const Grid grid = build_grid(m, 5);
    GameEngine eng(m, pay, grid);

    const int mi = grid.n_interior();
    const auto prof = make_profile(grid, std::vector<double>(mi, kInf),
                                   std::vector<double>(mi, 0.0));
    const ValueVectors v = eng.payoff_values(prof);
    for (int j = 0; j < grid.n_points(); ++j) {
        CHECK(v.w1[static_cast<size_t>(j)] ==
              doctest::Approx(eng.g(1, j)).epsilon(1e-12));
        if (grid.is_interior(j)) {
            // the opponent collects f when the other stops first
            CHECK(v.w2[static_cast<size_t>(j)] ==
                  doctest::Approx(eng.f(2, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("payoff values: nobody stops gives the discounted exit combination") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = flat_payoffs();
    const Grid grid = build_grid(m, 7);
    GameEngine eng(m, pay, grid);

    const int mi = grid.n_interior();
    const auto prof = make_profile(grid, std::vector<double>(mi, 0.0),
                                   std::vector<double>(mi, 0.0));
    const ValueVectors v = eng.payoff_values(prof);
    const double gamma = std::sqrt(2.0 * pay.r1);
    for (int j = 1; j + 1 < grid.n_points(); ++j) {
        const double x = grid[j];
        // closed-form Brownian sinh ratios over the whole interval
        const double e_up = std::sinh(gamma * x) / std::sinh(gamma);
        const double e_low = std::sinh(gamma * (1.0 - x)) / std::sinh(gamma);
        const double expect = e_low * pay.g1(0.0) + e_up * pay.g1(1.0);
        CHECK(v.w1[static_cast<size_t>(j)] == doctest::Approx(expect).epsilon(1e-6));
    }
}

TEST_CASE("payoff values: single opponent atom matches the sojourn combination") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = flat_payoffs();
    const Grid grid = build_grid(m, 1);
    GameEngine eng(m, pay, grid);

    const double kappa = 2.5;
    const auto prof = make_profile(grid, {0.0}, {kappa});
    const ValueVectors v = eng.payoff_values(prof);
    const SojournEntry e = eng.sojourn(1, 1, kappa);
    const double expect =
        e.a * eng.g(1, 2) + e.b * eng.g(1, 0) + e.c_kill * eng.f(1, 1);
    CHECK(v.w1[1] == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("both players infinite at one point: each gets their own g") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    const Grid grid = build_grid(m, 3);
    GameEngine eng(m, pay, grid);
    const auto prof = make_profile(grid, {0.0, kInf, 0.0}, {0.0, kInf, 0.0});
    const ValueVectors v = eng.payoff_values(prof);
    CHECK(v.w1[2] == doctest::Approx(eng.g(1, 2)).epsilon(1e-14));
    CHECK(v.w2[2] == doctest::Approx(eng.g(2, 2)).epsilon(1e-14));
}

TEST_CASE("value vectors stay inside the payoff envelope") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    const Grid grid = build_grid(m, 9);
    GameEngine eng(m, pay, grid);
    const auto prof =
        make_profile(grid, {0.0, 1.0, kInf, 0.3, 0.0, 2.0, 0.0, 5.0, 0.0},
                     {1.0, 0.0, 0.0, 0.0, kInf, 0.0, 0.7, 0.0, 4.0});
    const ValueVectors v = eng.payoff_values(prof);
    double lo = 1e300, hi = -1e300;
    for (int j = 0; j < grid.n_points(); ++j) {
        lo = std::min({lo, eng.g(1, j), eng.f(1, j)});
        hi = std::max({hi, eng.g(1, j), eng.f(1, j)});
    }
    for (double w : v.w1) {
        CHECK(w >= lo - 1e-12);
        CHECK(w <= hi + 1e-12);
    }
}

TEST_CASE("continuation F limit cases") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = flat_payoffs();
    const Grid grid = build_grid(m, 5);
    GameEngine eng(m, pay, grid);
    const int mi = grid.n_interior();

    // opponent stops immediately: F = f interior
    const auto F1 = eng.continuation_F(std::vector<double>(mi, kInf), 1);
    for (int j = 1; j + 1 < grid.n_points(); ++j) {
        CHECK(F1[static_cast<size_t>(j)] == doctest::Approx(eng.f(1, j)).epsilon(1e-12));
    }

    // opponent never stops: F = discounted boundary payoff, below g == 1
    const auto F0 = eng.continuation_F(std::vector<double>(mi, 0.0), 1);
    for (int j = 1; j + 1 < grid.n_points(); ++j) {
        CHECK(F0[static_cast<size_t>(j)] < 1.0);
        const auto [e_low, e_up] = eng.analytics(1).discounted_two_sided_exit(
            0.0, grid[j], 1.0);
        CHECK(F0[static_cast<size_t>(j)] ==
              doctest::Approx(e_low * 1.0 + e_up * 1.0).epsilon(1e-10));
    }
}

TEST_CASE("best response limit cases") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = flat_payoffs();
    const Grid grid = build_grid(m, 5);
    GameEngine eng(m, pay, grid);
    const int mi = grid.n_interior();

    SUBCASE("opponent immediate and f > g: wait and collect f") {
        const auto br = eng.best_response(std::vector<double>(mi, kInf), 1);
        for (int j = 1; j + 1 < grid.n_points(); ++j) {
            CHECK(br.value[static_cast<size_t>(j)] ==
                  doctest::Approx(eng.f(1, j)).epsilon(1e-12));
            CHECK_FALSE(br.stop_set[static_cast<size_t>(j - 1)]);
        }
    }

    SUBCASE("no subsidy and constant g: stop everywhere") {
        const auto br = eng.best_response(std::vector<double>(mi, 0.0), 1);
        for (int j = 1; j + 1 < grid.n_points(); ++j) {
            CHECK(br.value[static_cast<size_t>(j)] == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(br.stop_set[static_cast<size_t>(j - 1)]);
        }
    }
}

TEST_CASE("best response dominates and matches exhaustive enumeration") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    const Grid grid = build_grid(m, 3);
    GameEngine eng(m, pay, grid);

    const std::vector<std::vector<double>> opponents = {
        {0.0, 0.0, 0.0}, {0.3, 2.0, 0.0}, {kInf, 0.5, 1.0}, {4.0, 4.0, 4.0}};
    for (const auto& opp : opponents) {
        for (int player : {1, 2}) {
            const auto br = eng.best_response(opp, player);
            const auto ref = oracle_enumerate_best_response(eng, opp, player);
            for (size_t i = 0; i < br.value.size(); ++i) {
                CHECK(br.value[i] == doctest::Approx(ref.value[i]).epsilon(1e-10));
            }
            for (size_t j = 0; j < br.stop_set.size(); ++j) {
                CHECK(br.stop_set[j] == ref.argmax_stop[j]);
            }
        }
    }
}

TEST_CASE("complementarity residual flags off-equilibrium profiles") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    const Grid grid = build_grid(m, 5);
    GameEngine eng(m, pay, grid);
    const int mi = grid.n_interior();

    // interior unit rate with s != q must show |s - q|
    auto prof = make_profile(grid, std::vector<double>(mi, 0.0),
                             std::vector<double>(mi, 0.0));
    prof.rates1[2] = 1.0;  // unit 0.5 at the middle point
    const auto res = eng.complementarity_residual(prof);
    CHECK(res[0][2] > 1e-3);

    // solved profile drives it below tolerance
    SolverOptions opt;
    const EquilibriumResult eq = solve_grid_equilibrium(eng, opt);
    CHECK(eng.residual_max(eq.profile) <= 1e-8);
}

TEST_CASE("indifference invariance: perturbing a mixing rate leaves the BR value fixed") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    const Grid grid = build_grid(m, 9);
    GameEngine eng(m, pay, grid);
    SolverOptions opt;
    const EquilibriumResult eq = solve_grid_equilibrium(eng, opt);

    int mix = -1;
    for (size_t j = 0; j < eq.profile.rates1.size(); ++j) {
        const double r = eq.profile.rates1[j];
        if (r > 1e-6 && std::isfinite(r)) mix = static_cast<int>(j);
    }
    REQUIRE(mix >= 0);

    // at an own mixing point stopping and continuing tie, so any replacement
    // rate yields the same own value vector
    const ValueVectors base = eng.payoff_values(eq.profile);
    for (double factor : {0.0, 0.5, 2.0, 10.0}) {
        auto prof = eq.profile;
        prof.rates1[static_cast<size_t>(mix)] *= factor;
        const ValueVectors alt = eng.payoff_values(prof);
        for (size_t i = 0; i < base.w1.size(); ++i) {
            CHECK(alt.w1[i] == doctest::Approx(base.w1[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("payoff continuity in each finite rate") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    const Grid grid = build_grid(m, 5);
    GameEngine eng(m, pay, grid);
    const auto base = make_profile(grid, {0.5, 1.0, 2.0, 1.0, 0.5},
                                   {1.0, 0.5, 2.0, 0.5, 1.0});
    const ValueVectors v0 = eng.payoff_values(base);

    double prev_slope = -1.0;
    for (double eps : {1e-3, 1e-4, 1e-5}) {
        auto prof = base;
        prof.rates1[2] += eps;
        const ValueVectors v = eng.payoff_values(prof);
        double diff = 0.0;
        for (size_t i = 0; i < v.w1.size(); ++i) {
            diff = std::max(diff, std::fabs(v.w1[i] - v0.w1[i]));
            diff = std::max(diff, std::fabs(v.w2[i] - v0.w2[i]));
        }
        const double slope = diff / eps;
        CHECK(slope < 10.0);  // O(eps) change with a bounded constant
        if (prev_slope > 0.0) CHECK(slope == doctest::Approx(prev_slope).epsilon(0.05));
        prev_slope = slope;
    }
}
