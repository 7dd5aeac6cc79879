#pragma once

#include "woa/game_engine.hpp"

namespace woa {

// Independent tiny-instance solvers used as reference oracles.

// One-interior-point game: each player's equilibrium rate is found by
// bisecting the other player's indifference equation on the kill rate (the
// value at the single point is a direct primitive combination, no linear
// solve and no closed-form inversion).
struct OnePointRates {
    double rate1 = 0.0;  // player 1's equilibrium rate
    double rate2 = 0.0;
    bool mixing1 = false;  // player 1 indifferent (interior rate)
    bool mixing2 = false;
};
OnePointRates oracle_one_point_rates(const GameEngine& engine);

// Exhaustive enumeration of all pure stop-set responses on a small grid.
struct EnumeratedBestResponse {
    std::vector<double> value;        // pointwise max over pure responses
    std::vector<bool> argmax_stop;    // a maximizing stop set (largest one)
};
EnumeratedBestResponse oracle_enumerate_best_response(
    const GameEngine& engine, const std::vector<double>& opponent_rates,
    int player);

} // namespace woa
