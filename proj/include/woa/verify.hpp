#pragma once

#include <string>
#include <vector>

#include "woa/montecarlo.hpp"

namespace woa {

enum class CheckStatus { Pass, Fail, Skipped };

struct Check {
    std::string name;
    CheckStatus status = CheckStatus::Skipped;
    double measured = 0.0;
    double threshold = 0.0;
    std::string witness;
};

struct VerificationReport {
    std::vector<Check> checks;
    bool overall() const;
    std::string summary() const;
};

// Residual, value-optimality, finite deviation sweep, and the (nonstop)
// tie-breaking conditions.
VerificationReport certify_equilibrium(const GameEngine& engine,
                                       const StrategyProfile& profile,
                                       double tolerance);

// Analytic payoffs and stopped laws against Monte Carlo.
VerificationReport cross_validate(const GameEngine& engine,
                                  const StrategyProfile& profile,
                                  const SimConfig& config);

VerificationReport refinement_diagnostics(const RefinementReport& report,
                                          double tolerance);

// Max payoff gain of the best challenger over the certified profile; the
// challenger set is all single-point unit overrides to {0,1} plus all pure
// first-exit strategies from grid intervals.
double deviation_sweep_gain(const GameEngine& engine,
                            const StrategyProfile& profile, int player);

} // namespace woa
