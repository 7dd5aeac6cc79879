#include "woa/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace woa {

namespace {

uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

Rng Rng::for_path(uint64_t seed, uint64_t path_index) {
    // derive a well-separated stream per path from the document seed
    uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0x6a09e667f3bcc909ULL * (path_index + 1);
    (void)splitmix64(s);
    return Rng(s);
}

uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
    // 53-bit mantissa, strictly inside (0,1)
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
    if (have_cached_) {
        have_cached_ = false;
        return cached_;
    }
    const double u1 = uniform(), u2 = uniform();
    const double rho = std::sqrt(-2.0 * std::log(u1));
    cached_ = rho * std::sin(2.0 * M_PI * u2);
    have_cached_ = true;
    return rho * std::cos(2.0 * M_PI * u2);
}

double Rng::exponential() { return -std::log(uniform()); }

std::vector<ChainSample> simulate_embedded_chain(const GameEngine& engine,
                                                 const StrategyProfile& profile,
                                                 int start_index,
                                                 const SimConfig& config) {
    const Grid& grid = engine.grid();
    const int m = grid.n_interior();
    if (start_index < 0 || start_index >= grid.n_points())
        fail("PointOutsideInterval", "start point not on the grid");

    // per-point transition data at r = 0 plus discount ratio factors
    struct PointData {
        double pa, pb, pc;          // r = 0 probabilities
        double da1, db1, dc1;       // discount factors player-1 rate
        double da2, db2, dc2;
        double share1;              // kill attribution P(player 1)
    };
    std::vector<PointData> pd(static_cast<size_t>(m));
    for (int j = 1; j <= m; ++j) {
        const size_t i = static_cast<size_t>(j - 1);
        const double l1 = profile.rates1[i], l2 = profile.rates2[i];
        const double kappa = l1 + l2;
        const SojournEntry e0 = engine.sojourn0(j, kappa);
        const SojournEntry e1 = engine.sojourn(1, j, kappa);
        const SojournEntry e2 = engine.sojourn(2, j, kappa);
        PointData d;
        d.pa = e0.a; d.pb = e0.b; d.pc = e0.c_kill;
        auto ratio = [](double num, double den) { return den > 0 ? num / den : 0.0; };
        d.da1 = ratio(e1.a, e0.a); d.db1 = ratio(e1.b, e0.b); d.dc1 = ratio(e1.c_kill, e0.c_kill);
        d.da2 = ratio(e2.a, e0.a); d.db2 = ratio(e2.b, e0.b); d.dc2 = ratio(e2.c_kill, e0.c_kill);
        if (std::isinf(l1)) d.share1 = 1.0;  // ties resolved to player 1's stop
        else if (std::isinf(l2)) d.share1 = 0.0;
        else d.share1 = kappa > 0 ? l1 / kappa : 0.0;
        pd[i] = d;
    }

    std::vector<ChainSample> out;
    out.reserve(static_cast<size_t>(config.n_paths));
    for (int64_t path = 0; path < config.n_paths; ++path) {
        Rng rng = Rng::for_path(config.rng_seed, static_cast<uint64_t>(path));
        ChainSample s;
        int j = start_index;
        s.discount1 = s.discount2 = 1.0;
        for (;;) {
            if (j == 0 || j == grid.n_points() - 1) {
                s.cause = StopCause::Absorbed;
                s.grid_index = j;
                break;
            }
            const PointData& d = pd[static_cast<size_t>(j - 1)];
            const double u = rng.uniform();
            if (u < d.pc) {
                s.cause = rng.uniform() < d.share1 ? StopCause::Player1
                                                   : StopCause::Player2;
                s.grid_index = j;
                s.discount1 *= d.dc1;
                s.discount2 *= d.dc2;
                break;
            }
            if (u < d.pc + d.pa) {
                s.discount1 *= d.da1;
                s.discount2 *= d.da2;
                ++j;
            } else {
                s.discount1 *= d.db1;
                s.discount2 *= d.db2;
                --j;
            }
        }
        out.push_back(s);
    }
    return out;
}

PathSegment simulate_euler(const DiffusionModel& model, double start, double dt,
                           double horizon, Rng& rng) {
    if (dt > horizon) fail("PathTooShort", "dt exceeds horizon");
    PathSegment p;
    p.dt = dt;
    double x = start;
    p.states.push_back(x);
    const int64_t steps = static_cast<int64_t>(horizon / dt);
    for (int64_t i = 0; i < steps; ++i) {
        x += model.drift(x) * dt + model.volatility(x) * std::sqrt(dt) * rng.normal();
        if (x <= model.lower) x = model.lower;
        if (x >= model.upper) x = model.upper;
        p.states.push_back(x);
        if (x == model.lower || x == model.upper) break;  // absorbed
    }
    return p;
}

std::vector<double> local_time_estimate(const PathSegment& path,
                                        const DiffusionModel& model, double y,
                                        double band_epsilon) {
    if (y - band_epsilon < model.lower || y + band_epsilon > model.upper)
        fail("BandTooWide", "band leaves the state space");
    std::vector<double> l(path.states.size(), 0.0);
    const double inv = 1.0 / (2.0 * band_epsilon);
    for (size_t i = 1; i < path.states.size(); ++i) {
        const double x = path.states[i - 1];
        double inc = 0.0;
        if (std::fabs(x - y) < band_epsilon) {
            const double s = model.volatility(x);
            inc = inv * s * s * path.dt;
        }
        l[i] = l[i - 1] + inc;
    }
    return l;
}

namespace {

struct Welford {
    int64_t n = 0;
    double mean = 0.0, m2 = 0.0;
    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / n;
        m2 += d * (x - mean);
    }
    EstimateWithError estimate() const {
        EstimateWithError e;
        e.n = n;
        e.mean = mean;
        e.std_error = n > 1 ? std::sqrt(m2 / (n - 1.0) / n) : 0.0;
        return e;
    }
};

// Euler-mode realization of both players' stops along one path.
struct EulerStops {
    double tau1 = kInf, tau2 = kInf;  // clock/frontier stop times
    double x1 = 0.0, x2 = 0.0;
    bool absorbed_first = false;
    double tau_abs = kInf;
    double x_abs = 0.0;
};

EulerStops euler_run(const DiffusionModel& model, const MRST& m1, const MRST& m2,
                     double start, const SimConfig& config, Rng& rng) {
    EulerStops out;
    const double E1 = rng.exponential();
    const double E2 = rng.exponential();
    double A1 = 0.0, A2 = 0.0;
    double x = start;
    const double inv = 1.0 / (2.0 * config.band_epsilon);
    const int64_t steps = static_cast<int64_t>(config.horizon / config.dt);
    auto bump = [&](const MRST& m, double xx) {
        double inc = 0.0;
        for (const auto& [y, rate] : m.atoms) {
            if (std::fabs(xx - y) < config.band_epsilon) {
                const double s = model.volatility(xx);
                inc += rate * inv * s * s * config.dt;
            }
        }
        for (size_t k = 0; k < m.density_values.size(); ++k) {
            if (xx > m.density_breaks[k] && xx < m.density_breaks[k + 1]) {
                const double s = model.volatility(xx);
                inc += m.density_values[k] * s * s * config.dt;
            }
        }
        return inc;
    };
    for (int64_t i = 1; i <= steps; ++i) {
        const double x_prev = x;
        A1 += bump(m1, x_prev);
        A2 += bump(m2, x_prev);
        x += model.drift(x) * config.dt +
             model.volatility(x) * std::sqrt(config.dt) * rng.normal();
        const double t = i * config.dt;
        if (std::isinf(out.tau1) && A1 >= E1) { out.tau1 = t; out.x1 = x_prev; }
        if (std::isinf(out.tau2) && A2 >= E2) { out.tau2 = t; out.x2 = x_prev; }
        // frontier exit: leaving the continuation component, including
        // jumping over a removed (rate-infinity) point in one step
        auto frontier_state = [&](const MRST& m) -> std::optional<double> {
            int comp_prev = -1, comp_now = -1;
            for (size_t k = 0; k < m.continuation.size(); ++k) {
                const auto& [a, b] = m.continuation[k];
                if (x_prev > a && x_prev < b) comp_prev = static_cast<int>(k);
                if (x > a && x < b) comp_now = static_cast<int>(k);
            }
            if (comp_prev >= 0 && comp_now == comp_prev) return std::nullopt;
            if (comp_prev < 0) return x_prev;
            const auto& [a, b] = m.continuation[static_cast<size_t>(comp_prev)];
            return x > x_prev ? b : a;  // crossed this component's edge
        };
        if (std::isinf(out.tau1)) {
            if (auto fx = frontier_state(m1); fx && *fx > model.lower && *fx < model.upper) {
                out.tau1 = t;
                out.x1 = *fx;
            }
        }
        if (std::isinf(out.tau2)) {
            if (auto fx = frontier_state(m2); fx && *fx > model.lower && *fx < model.upper) {
                out.tau2 = t;
                out.x2 = *fx;
            }
        }
        if (!std::isinf(out.tau1) && !std::isinf(out.tau2)) return out;
        if (x <= model.lower || x >= model.upper) {
            out.tau_abs = t;
            out.x_abs = std::clamp(x, model.lower, model.upper);
            out.absorbed_first = true;
            return out;
        }
    }
    return out;  // horizon hit; caller counts it as PathTooShort
}

} // namespace

PayoffEstimate mc_payoff(const DiffusionModel& model, const PayoffSpec& payoffs,
                         const GameEngine* engine, const StrategyProfile* profile,
                         const MRST& mrst1, const MRST& mrst2, double start,
                         const SimConfig& config) {
    PayoffEstimate out;
    Welford w1, w2;
    if (engine && profile && !config.euler_mode) {
        // exact-in-space embedded mode with unbiased multiplicative discounts
        const Grid& grid = engine->grid();
        int start_index = -1;
        for (int i = 0; i < grid.n_points(); ++i) {
            if (std::fabs(grid[i] - start) < 1e-12) start_index = i;
        }
        if (start_index < 0) fail("PointOutsideInterval", "start must be a grid point");
        const auto samples = simulate_embedded_chain(*engine, *profile, start_index, config);
        for (const auto& s : samples) {
            const double x = grid[s.grid_index];
            double p1, p2;
            switch (s.cause) {
                case StopCause::Player1:
                    p1 = payoffs.g1(x);
                    p2 = payoffs.f2(x);
                    break;
                case StopCause::Player2:
                    p1 = payoffs.f1(x);
                    p2 = payoffs.g2(x);
                    break;
                default:
                    p1 = payoffs.g1(x);
                    p2 = payoffs.g2(x);
            }
            w1.add(s.discount1 * p1);
            w2.add(s.discount2 * p2);
        }
    } else {
        for (int64_t path = 0; path < config.n_paths; ++path) {
            Rng rng = Rng::for_path(config.rng_seed, static_cast<uint64_t>(path));
            const EulerStops st = euler_run(model, mrst1, mrst2, start, config, rng);
            if (std::isinf(st.tau1) && std::isinf(st.tau2) && !st.absorbed_first) {
                ++out.path_too_short;
                continue;
            }
            double t1 = st.tau1, t2 = st.tau2;
            double x1 = st.x1, x2 = st.x2;
            if (st.absorbed_first) {
                if (std::isinf(t1)) { t1 = st.tau_abs; x1 = st.x_abs; }
                if (std::isinf(t2)) { t2 = st.tau_abs; x2 = st.x_abs; }
            }
            if (t1 <= t2) {
                w1.add(std::exp(-payoffs.r1 * t1) * payoffs.g1(x1));
            } else {
                w1.add(std::exp(-payoffs.r1 * t2) * payoffs.f1(x2));
            }
            if (t2 <= t1) {
                w2.add(std::exp(-payoffs.r2 * t2) * payoffs.g2(x2));
            } else {
                w2.add(std::exp(-payoffs.r2 * t1) * payoffs.f2(x1));
            }
        }
    }
    out.j1 = w1.estimate();
    out.j2 = w2.estimate();
    return out;
}

EstimateWithError tie_probability(const DiffusionModel& model, const MRST& mrst1,
                                  const MRST& mrst2, double start,
                                  const SimConfig& config) {
    if (!config.euler_mode) {
        // the embedded chain resolves the kill race continuously, so two
        // finite-rate clocks never ring in the same instant; the only tie is
        // an immediate double stop at a point both strategies have removed
        EstimateWithError e;
        e.n = config.n_paths;
        e.mean = (!mrst1.contains(start) && !mrst2.contains(start)) ? 1.0 : 0.0;
        return e;
    }
    Welford acc;
    for (int64_t path = 0; path < config.n_paths; ++path) {
        Rng rng = Rng::for_path(config.rng_seed, static_cast<uint64_t>(path));
        const EulerStops st = euler_run(model, mrst1, mrst2, start, config, rng);
        double tie = 0.0;
        // a tie means both voluntary stops land in the same dt window;
        // absorption ends the game for both and is not a stop by either
        if (!std::isinf(st.tau1) && !std::isinf(st.tau2) &&
            std::fabs(st.tau1 - st.tau2) <= config.dt) {
            tie = 1.0;
        }
        acc.add(tie);
    }
    return acc.estimate();
}

StoppedLaw empirical_stopped_law(const GameEngine& engine,
                                 const std::vector<ChainSample>& samples,
                                 int which_player) {
    StoppedLaw law;
    law.support = engine.grid().points;
    law.mass.assign(law.support.size(), 0.0);
    int64_t counted = 0;
    for (const auto& s : samples) {
        const bool match =
            which_player == 0 ||
            (which_player == 1 && s.cause == StopCause::Player1) ||
            (which_player == 2 && s.cause == StopCause::Player2);
        if (match) {
            law.mass[static_cast<size_t>(s.grid_index)] += 1.0;
        }
        ++counted;
    }
    if (counted > 0) {
        for (double& v : law.mass) v /= static_cast<double>(samples.size());
    }
    return law;
}

} // namespace woa
