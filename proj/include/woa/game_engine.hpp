#pragma once

#include <memory>
#include <vector>

#include "woa/diffusion_analytics.hpp"
#include "woa/stopping.hpp"

namespace woa {

struct ValueVectors {
    std::vector<double> w1, w2;  // per grid point, boundaries included

    const std::vector<double>& w(int player) const {
        return player == 1 ? w1 : w2;
    }
};

struct BestResponseSolution {
    std::vector<double> value;       // per grid point
    std::vector<bool> stop_set;      // per interior point, largest optimal time
    int iterations = 0;
};

// Exact evaluation of the discretized game on one grid.  Precomputes the
// per-point exit/Green primitives for both discounts once; all payoff and
// best-response solves are tridiagonal systems over those primitives.
class GameEngine {
public:
    GameEngine(const DiffusionModel& model, const PayoffSpec& payoffs,
               const Grid& grid, int n_mesh = 0);

    const Grid& grid() const { return grid_; }
    int n_interior() const { return grid_.n_interior(); }
    const PayoffSpec& payoffs() const { return payoffs_; }
    const DiffusionModel& model() const { return model_; }

    double g(int player, int j) const { return gtab_[player - 1][static_cast<size_t>(j)]; }
    double f(int player, int j) const { return ftab_[player - 1][static_cast<size_t>(j)]; }

    // Exit/Green primitives around interior point j at the player's discount
    // (kappa = 0): e_up, e_low, g.
    const SojournEntry& primitive(int player, int j) const;
    // Same at discount 0, used by the embedded chain and stopped laws.
    const SojournEntry& primitive0(int j) const;

    // (a, b, c_kill) around interior point j at kill rate kappa, player's
    // discount.  Computed from the cached primitives by the elastic identity.
    SojournEntry sojourn(int player, int j, double kappa) const;
    SojournEntry sojourn0(int j, double kappa) const;

    ValueVectors payoff_values(const StrategyProfile& profile) const;

    // F of the payoff reformulation: value of never stopping voluntarily
    // against the opponent's rates.
    std::vector<double> continuation_F(const std::vector<double>& opponent_rates,
                                       int player) const;

    BestResponseSolution best_response(const std::vector<double>& opponent_rates,
                                       int player) const;

    // Per-player, per-interior-point complementarity residuals.
    std::vector<std::vector<double>> complementarity_residual(
        const StrategyProfile& profile) const;
    double residual_max(const StrategyProfile& profile) const;

    const DiffusionAnalytics& analytics(int player) const {
        return player == 1 ? *an1_ : *an2_;
    }
    const DiffusionAnalytics& analytics0() const { return *an0_; }

private:
    std::vector<double> solve_payoff_system(int player,
                                            const std::vector<double>& own,
                                            const std::vector<double>& opp) const;

    DiffusionModel model_;
    PayoffSpec payoffs_;
    Grid grid_;
    std::shared_ptr<DiffusionAnalytics> an1_, an2_, an0_;
    std::vector<double> gtab_[2], ftab_[2];   // payoffs tabulated on the grid
    std::vector<SojournEntry> prim_[2];       // kappa=0 primitives, r1 / r2
    std::vector<SojournEntry> prim0_;         // kappa=0 primitives, r=0
};

} // namespace woa
