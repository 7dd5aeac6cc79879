#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "woa/game_engine.hpp"

namespace woa {

struct SolverOptions {
    int max_outer_iterations = 500;
    double damping = 0.5;
    double residual_tolerance = 1e-8;
    bool newton_enabled = true;
    int restart_seeds = 3;
    uint64_t rng_seed = 1;
};

struct EquilibriumResult {
    StrategyProfile profile;
    ValueVectors values;
    double residual_max = 0.0;
    std::vector<std::vector<double>> per_point_residuals;
    int iterations_used = 0;
    std::vector<std::string> method_trace;
    std::vector<double> residual_history;  // one entry per outer sweep
    bool converged = false;
};

struct RefinementLevel {
    int n_interior = 0;
    EquilibriumResult result;
    double value_distance = -1.0;    // sup over common points vs previous level
    double stopped_distance = -1.0;  // Wasserstein vs previous level
};

struct RefinementReport {
    std::vector<RefinementLevel> levels;
};

// Discrete law of the stopped location X_tau over grid points.
struct StoppedLaw {
    std::vector<double> support;  // grid points
    std::vector<double> mass;
    bool renormalized = false;    // MassDeficit handling marker
};

EquilibriumResult solve_grid_equilibrium(const GameEngine& engine,
                                         const SolverOptions& options,
                                         const StrategyProfile* warm_start = nullptr);

RefinementReport refine_and_solve(const DiffusionModel& model,
                                  const PayoffSpec& payoffs,
                                  const std::vector<Grid>& schedule,
                                  const SolverOptions& options);

// which_player: 1 or 2 for the law of that player's own stop (conditioned on
// nothing; absorption mass sits at the boundary), 0 for the game's stop
// location whoever causes it.
StoppedLaw stopped_distribution(const GameEngine& engine,
                                const StrategyProfile& profile,
                                int start_index, int which_player = 0);

double distribution_distance(const StoppedLaw& a, const StoppedLaw& b);

// Nested uniform schedule with 1, 3, 7, ... interior points.
std::vector<Grid> uniform_schedule(const DiffusionModel& model, int levels);

} // namespace woa
