#pragma once

#include <cstdint>
#include <vector>

#include "woa/solver.hpp"

namespace woa {

// splitmix64: tiny, seedable, and good enough for path simulation; per-path
// streams are derived from (document seed, path index) so results are
// independent of scheduling.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}
    static Rng for_path(uint64_t seed, uint64_t path_index);

    uint64_t next_u64();
    double uniform();             // (0, 1)
    double normal();              // standard normal (Box-Muller, cached)
    double exponential();         // Exp(1)

private:
    uint64_t state_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

struct SimConfig {
    int64_t n_paths = 100000;
    double dt = 1e-4;
    double band_epsilon = 1e-2;
    uint64_t rng_seed = 1;
    bool euler_mode = false;  // default: exact-in-space embedded chain
    double horizon = 1e4;     // Euler safety cap
};

struct EstimateWithError {
    double mean = 0.0;
    double std_error = 0.0;
    int64_t n = 0;
};

enum class StopCause { Player1, Player2, Absorbed };

struct ChainSample {
    StopCause cause = StopCause::Absorbed;
    int grid_index = 0;       // location of the stop
    double discount1 = 1.0;   // accumulated e^{-r1 t} weight (unbiased)
    double discount2 = 1.0;
};

// Exact-in-space sampling of the embedded chain under the profile's two
// clocks; r-discounts accumulate multiplicatively from the ratio of
// discounted to undiscounted sojourn primitives.
std::vector<ChainSample> simulate_embedded_chain(const GameEngine& engine,
                                                 const StrategyProfile& profile,
                                                 int start_index,
                                                 const SimConfig& config);

PathSegment simulate_euler(const DiffusionModel& model, double start,
                           double dt, double horizon, Rng& rng);

// Band-occupation local-time estimator along a stored path.
std::vector<double> local_time_estimate(const PathSegment& path,
                                        const DiffusionModel& model, double y,
                                        double band_epsilon);

struct PayoffEstimate {
    EstimateWithError j1, j2;
    int64_t path_too_short = 0;
};

PayoffEstimate mc_payoff(const DiffusionModel& model, const PayoffSpec& payoffs,
                         const GameEngine* engine,  // non-null enables embedded mode
                         const StrategyProfile* profile,
                         const MRST& mrst1, const MRST& mrst2, double start,
                         const SimConfig& config);

EstimateWithError tie_probability(const DiffusionModel& model, const MRST& mrst1,
                                  const MRST& mrst2, double start,
                                  const SimConfig& config);

// Empirical stopped-location frequencies from embedded-chain samples.
StoppedLaw empirical_stopped_law(const GameEngine& engine,
                                 const std::vector<ChainSample>& samples,
                                 int which_player = 0);

} // namespace woa
