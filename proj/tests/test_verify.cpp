#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "woa/verify.hpp"

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

PayoffSpec woa_payoffs() {
    PayoffSpec p;
    p.g1 = p.g2 = [](double x) { return 0.6 + 0.35 * std::cos(2.0 * M_PI * x); };
    p.f1 = p.f2 = [](double x) {
        return 0.6 + 0.35 * std::cos(2.0 * M_PI * x) + 0.3 * x * (1.0 - x);
    };
    p.r1 = p.r2 = 5.0;
    return p;
}

PayoffSpec trivial_payoffs() {
    PayoffSpec p;
    p.g1 = p.g2 = p.f1 = p.f2 = [](double x) { return 1.0 + x * (1.0 - x); };
    p.r1 = p.r2 = 1.0;
    return p;
}

const Check* find_check(const VerificationReport& rep, const std::string& needle) {
    for (const auto& c : rep.checks) {
        if (c.name.find(needle) != std::string::npos) return &c;
    }
    return nullptr;
}

} // namespace

TEST_CASE("certify passes on solver output and fails on perturbations") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    GameEngine eng(m, pay, build_grid(m, 9));
    const EquilibriumResult eq = solve_grid_equilibrium(eng, SolverOptions{});
    REQUIRE(eq.converged);

    SUBCASE("certified equilibrium") {
        const VerificationReport rep = certify_equilibrium(eng, eq.profile, 1e-8);
        CHECK(rep.overall());
        for (const auto& c : rep.checks) CHECK(c.status == CheckStatus::Pass);
    }

    SUBCASE("perturbed rate fails the residual check with a witness") {
        StrategyProfile bad = eq.profile;
        bad.rates1[4] = iota_rate(std::min(iota_unit(bad.rates1[4]) + 0.1, 1.0));
        const VerificationReport rep = certify_equilibrium(eng, bad, 1e-8);
        CHECK_FALSE(rep.overall());
        const Check* res = find_check(rep, "residual");
        REQUIRE(res != nullptr);
        CHECK(res->status == CheckStatus::Fail);
        CHECK_FALSE(res->witness.empty());
    }

    SUBCASE("(nonstop) violation fails check 4") {
        const Grid grid = eng.grid();
        StrategyProfile bad;
        bad.grid = grid;
        bad.rates1.assign(static_cast<size_t>(grid.n_interior()), 0.0);
        bad.rates2.assign(static_cast<size_t>(grid.n_interior()), 0.0);
        bad.rates2[4] = kInf;  // opponent stops immediately where f1 > g1 ...
        bad.rates1[4] = 2.0;   // ... so player 1 must not carry rate there
        const VerificationReport rep = certify_equilibrium(eng, bad, 1e-8);
        const Check* ns = find_check(rep, "nonstop");
        REQUIRE(ns != nullptr);
        CHECK(ns->status == CheckStatus::Fail);
    }
}

TEST_CASE("deviation sweep gain is tiny at equilibrium and positive off it") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    GameEngine eng(m, pay, build_grid(m, 9));
    const EquilibriumResult eq = solve_grid_equilibrium(eng, SolverOptions{});
    REQUIRE(eq.converged);
    CHECK(deviation_sweep_gain(eng, eq.profile, 1) <= 1e-6);
    CHECK(deviation_sweep_gain(eng, eq.profile, 2) <= 1e-6);

    // a profile that never mixes leaves money on the table
    StrategyProfile naive;
    naive.grid = eng.grid();
    naive.rates1.assign(9, 0.0);
    naive.rates2.assign(9, 0.0);
    const double gain = deviation_sweep_gain(eng, naive, 1);
    CHECK(gain > 1e-4);
}

TEST_CASE("cross validation statistics") {
    const DiffusionModel m = unit_bm();
    const PayoffSpec pay = woa_payoffs();
    GameEngine eng(m, pay, build_grid(m, 9));
    const EquilibriumResult eq = solve_grid_equilibrium(eng, SolverOptions{});
    REQUIRE(eq.converged);

    SUBCASE("powered run passes") {
        SimConfig cfg;
        cfg.n_paths = 20000;
        cfg.rng_seed = 12;
        const VerificationReport rep = cross_validate(eng, eq.profile, cfg);
        CHECK(rep.overall());
        bool any_pass = false;
        for (const auto& c : rep.checks) {
            if (c.status == CheckStatus::Pass) any_pass = true;
            CHECK(c.status != CheckStatus::Fail);
        }
        CHECK(any_pass);
    }

    SUBCASE("underpowered run is skipped, not failed") {
        SimConfig cfg;
        cfg.n_paths = 100;
        cfg.rng_seed = 12;
        const VerificationReport rep = cross_validate(eng, eq.profile, cfg);
        CHECK(rep.overall());
        bool any_skipped = false;
        for (const auto& c : rep.checks) {
            if (c.status == CheckStatus::Skipped) any_skipped = true;
        }
        CHECK(any_skipped);
    }
}

TEST_CASE("refinement diagnostics") {
    const DiffusionModel m = unit_bm();

    SUBCASE("trivial game: all distances zero, pass") {
        const RefinementReport rep = refine_and_solve(
            m, trivial_payoffs(), uniform_schedule(m, 3), SolverOptions{});
        const VerificationReport diag = refinement_diagnostics(rep, 1e-2);
        CHECK(diag.overall());
    }

    SUBCASE("symmetric WoA, five levels, pass at 1e-2") {
        const RefinementReport rep = refine_and_solve(
            m, woa_payoffs(), uniform_schedule(m, 5), SolverOptions{});
        const VerificationReport diag = refinement_diagnostics(rep, 1e-2);
        CHECK(diag.overall());
    }

    SUBCASE("two levels only: skipped") {
        const RefinementReport rep = refine_and_solve(
            m, woa_payoffs(), uniform_schedule(m, 2), SolverOptions{});
        const VerificationReport diag = refinement_diagnostics(rep, 1e-2);
        bool all_skipped = true;
        for (const auto& c : diag.checks) {
            if (c.status != CheckStatus::Skipped) all_skipped = false;
        }
        CHECK(all_skipped);
        CHECK(diag.overall());  // skipped checks do not fail the report
    }
}

TEST_CASE("report overall logic") {
    VerificationReport rep;
    rep.checks.push_back({"a", CheckStatus::Pass, 0.0, 1.0, ""});
    rep.checks.push_back({"b", CheckStatus::Skipped, 0.0, 1.0, ""});
    CHECK(rep.overall());
    rep.checks.push_back({"c", CheckStatus::Fail, 2.0, 1.0, "x=0.5"});
    CHECK_FALSE(rep.overall());
    CHECK(rep.summary().find("FAIL") != std::string::npos);
}
