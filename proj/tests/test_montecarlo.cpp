#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "woa/montecarlo.hpp"

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

} // namespace

TEST_CASE("rng streams are deterministic and per-path independent of order") {
    Rng a = Rng::for_path(7, 3);
    Rng b = Rng::for_path(7, 3);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
    Rng c = Rng::for_path(7, 4);
    CHECK(c.next_u64() != Rng::for_path(7, 3).next_u64());

    Rng u(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x > 0.0);
        CHECK(x < 1.0);
        CHECK(u.exponential() > 0.0);
    }
}

TEST_CASE("euler paths: deterministic ramp, absorption, reproducibility") {
    SUBCASE("degenerate sigma gives the ODE ramp") {
        RawModelSpec s;
        s.family = "custom";
        s.lower = 0.0;
        s.upper = 1.0;
        s.custom_drift = [](double) { return 1.0; };
        s.custom_volatility = [](double) { return 1e-8; };  // effectively 0
        const DiffusionModel m = build_model(s);
        Rng rng(1);
        const PathSegment p = simulate_euler(m, 0.0, 0.1, 10.0, rng);
        REQUIRE(p.states.size() >= 11);
        for (size_t i = 1; i <= 10; ++i) {
            CHECK(p.states[i] == doctest::Approx(0.1 * static_cast<double>(i)).epsilon(1e-5));
        }
        CHECK(p.states.back() == 1.0);  // absorbed and held
    }

    SUBCASE("fixed seed reproduces bitwise") {
        const DiffusionModel m = unit_bm();
        Rng r1(123), r2(123);
        const PathSegment a = simulate_euler(m, 0.5, 1e-3, 5.0, r1);
        const PathSegment b = simulate_euler(m, 0.5, 1e-3, 5.0, r2);
        REQUIRE(a.states.size() == b.states.size());
        for (size_t i = 0; i < a.states.size(); ++i) CHECK(a.states[i] == b.states[i]);
    }
}

TEST_CASE("band local-time estimator") {
    const DiffusionModel m = unit_bm();

    SUBCASE("path never in the band gives zero") {
        PathSegment p;
        p.dt = 0.01;
        p.states = {0.1, 0.12, 0.11, 0.13};
        const auto l = local_time_estimate(p, m, 0.8, 1e-2);
        CHECK(l.back() == 0.0);
    }

    SUBCASE("Brownian mean local time at the start: E l_t = sqrt(2t/pi)") {
        const double t = 1.0, dt = 1e-4, eps = 1e-2;
        const int n = 4000;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            Rng rng = Rng::for_path(11, static_cast<uint64_t>(i));
            // wide interval so absorption before t is rare
            RawModelSpec s;
            s.family = "bm";
            s.lower = -10.0;
            s.upper = 10.0;
            s.sigma = 1.0;
            const DiffusionModel wide = build_model(s);
            const PathSegment p = simulate_euler(wide, 0.0, dt, t, rng);
            sum += local_time_estimate(p, wide, 0.0, eps).back();
        }
        const double mean = sum / n;
        const double expect = std::sqrt(2.0 * t / M_PI);
        CHECK(std::fabs(mean - expect) / expect < 0.05);
    }

    SUBCASE("band wider than the resolution is rejected") {
        PathSegment p;
        p.dt = 0.01;
        p.states = {0.5, 0.51};
        CHECK_THROWS_WITH_AS(local_time_estimate(p, m, 0.5, 0.6),
                             doctest::Contains("BandTooWide"), Error);
    }
}

TEST_CASE("embedded chain frequencies match analytic laws") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    const Grid grid = build_grid(m, 3);
    GameEngine eng(m, pay, grid);
    const int mid = grid.n_points() / 2;

    SimConfig cfg;
    cfg.n_paths = 40000;
    cfg.rng_seed = 5;

    SUBCASE("no voluntary stopping from the midpoint") {
        StrategyProfile prof{grid, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
        const auto samples = simulate_embedded_chain(eng, prof, mid, cfg);
        REQUIRE(samples.size() == static_cast<size_t>(cfg.n_paths));
        int64_t up = 0;
        for (const auto& s : samples) {
            CHECK(s.cause == StopCause::Absorbed);
            if (s.grid_index == grid.n_points() - 1) ++up;
        }
        const double freq = static_cast<double>(up) / static_cast<double>(cfg.n_paths);
        CHECK(std::fabs(freq - 0.5) < 3.0 * 0.5 / std::sqrt(static_cast<double>(cfg.n_paths)));
    }

    SUBCASE("own infinite rate at the start") {
        StrategyProfile prof{grid, {0.0, kInf, 0.0}, {0.0, 0.0, 0.0}};
        const auto samples = simulate_embedded_chain(eng, prof, mid, cfg);
        for (const auto& s : samples) {
            CHECK(s.cause == StopCause::Player1);
            CHECK(s.grid_index == mid);
        }
    }

    SUBCASE("one-atom profile matches the analytic stopped law within 3 sigma") {
        StrategyProfile prof{grid, {0.0, 1.5, 0.0}, {0.0, 0.8, 0.0}};
        const auto samples = simulate_embedded_chain(eng, prof, mid, cfg);
        const StoppedLaw mc = empirical_stopped_law(eng, samples);
        const StoppedLaw exact = stopped_distribution(eng, prof, mid);
        for (size_t i = 0; i < exact.mass.size(); ++i) {
            const double p = exact.mass[i];
            const double se =
                std::sqrt(std::max(p * (1.0 - p), 1e-12) /
                          static_cast<double>(cfg.n_paths));
            CHECK(std::fabs(mc.mass[i] - p) <= 4.0 * se);
        }
    }
}

TEST_CASE("mc payoffs agree with the analytic engine") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    const Grid grid = build_grid(m, 3);
    GameEngine eng(m, pay, grid);

    SimConfig cfg;
    cfg.n_paths = 40000;
    cfg.rng_seed = 21;

    SUBCASE("immediate own stop pays g with zero variance") {
        StrategyProfile prof{grid, {kInf, kInf, kInf}, {0.0, 0.0, 0.0}};
        const MRST m1 = grid_strategy_to_mrst(grid, prof.rates1);
        const MRST m2 = grid_strategy_to_mrst(grid, prof.rates2);
        const PayoffEstimate est =
            mc_payoff(m, pay, &eng, &prof, m1, m2, grid[2], cfg);
        CHECK(est.j1.mean == doctest::Approx(eng.g(1, 2)).epsilon(1e-14));
        CHECK(est.j1.std_error == 0.0);
    }

    SUBCASE("mixed profile within 3 standard errors") {
        StrategyProfile prof{grid, {0.7, 1.5, 0.2}, {0.1, 0.8, 1.1}};
        const ValueVectors v = eng.payoff_values(prof);
        const MRST m1 = grid_strategy_to_mrst(grid, prof.rates1);
        const MRST m2 = grid_strategy_to_mrst(grid, prof.rates2);
        const PayoffEstimate est =
            mc_payoff(m, pay, &eng, &prof, m1, m2, grid[2], cfg);
        CHECK(std::fabs(est.j1.mean - v.w1[2]) <= 3.0 * est.j1.std_error);
        CHECK(std::fabs(est.j2.mean - v.w2[2]) <= 3.0 * est.j2.std_error);
    }

    SUBCASE("undiscounted absorbed payoff matches the exit probabilities") {
        const PayoffSpec p0 = flat_payoffs(0.0, 0.0);
        PayoffSpec p0s = p0;
        p0s.g1 = [](double x) { return x; };  // boundary payoff identifies the end
        GameEngine eng0(m, p0s, grid);
        StrategyProfile prof{grid, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}};
        const MRST m1 = grid_strategy_to_mrst(grid, prof.rates1);
        const MRST m2 = grid_strategy_to_mrst(grid, prof.rates2);
        const PayoffEstimate est =
            mc_payoff(m, p0s, &eng0, &prof, m1, m2, grid[2], cfg);
        CHECK(std::fabs(est.j1.mean - 0.5) <= 3.0 * est.j1.std_error);
    }
}

TEST_CASE("tie probabilities") {
    const DiffusionModel m = unit_bm();
    const Grid grid = build_grid(m, 3);

    SimConfig cfg;
    cfg.n_paths = 2000;
    cfg.dt = 1e-3;
    cfg.rng_seed = 31;

    SUBCASE("embedded mode at finite rates is exactly zero") {
        const MRST m1 = grid_strategy_to_mrst(grid, {0.7, 1.5, 0.2});
        const MRST m2 = grid_strategy_to_mrst(grid, {0.1, 0.8, 1.1});
        const EstimateWithError tie = tie_probability(m, m1, m2, 0.5, cfg);
        CHECK(tie.mean == 0.0);
    }

    SUBCASE("both infinite at the start point always tie") {
        SimConfig euler = cfg;
        euler.euler_mode = true;
        euler.n_paths = 200;
        const MRST m1 = grid_strategy_to_mrst(grid, {0.0, kInf, 0.0});
        const MRST m2 = grid_strategy_to_mrst(grid, {0.0, kInf, 0.0});
        const EstimateWithError tie = tie_probability(m, m1, m2, 0.5, euler);
        CHECK(tie.mean == 1.0);
    }

    SUBCASE("euler mode, finite rates, distinct frontiers: rare ties") {
        SimConfig euler = cfg;
        euler.euler_mode = true;
        euler.n_paths = 10000;
        euler.dt = 1e-4;
        const MRST m1 = grid_strategy_to_mrst(grid, {0.5, 0.25, 0.0});
        const MRST m2 = grid_strategy_to_mrst(grid, {0.0, 0.25, 0.5});
        const EstimateWithError tie = tie_probability(m, m1, m2, 0.5, euler);
        CHECK(tie.mean <= 1e-3);
    }
}

TEST_CASE("embedded sampling is reproducible under a fixed seed") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    const Grid grid = build_grid(m, 3);
    GameEngine eng(m, pay, grid);
    StrategyProfile prof{grid, {0.7, 1.5, 0.2}, {0.1, 0.8, 1.1}};
    SimConfig cfg;
    cfg.n_paths = 500;
    cfg.rng_seed = 77;
    const auto a = simulate_embedded_chain(eng, prof, 2, cfg);
    const auto b = simulate_embedded_chain(eng, prof, 2, cfg);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].cause == b[i].cause);
        CHECK(a[i].grid_index == b[i].grid_index);
        CHECK(a[i].discount1 == b[i].discount1);
    }
}
