#include "woa/solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>

#include "woa/montecarlo.hpp"
#include "woa/tridiag.hpp"

namespace woa {

namespace {

// Dense Gaussian elimination with partial pivoting; Newton systems are tiny
// (at most twice the interior point count).
std::vector<double> solve_dense(std::vector<std::vector<double>> A,
                                std::vector<double> b) {
    const size_t n = b.size();
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        for (size_t r = col + 1; r < n; ++r) {
            if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
        }
        std::swap(A[col], A[piv]);
        std::swap(b[col], b[piv]);
        if (A[col][col] == 0.0) fail("SingularSystem", "singular Newton system");
        for (size_t r = col + 1; r < n; ++r) {
            const double m = A[r][col] / A[col][col];
            if (m == 0.0) continue;
            for (size_t k = col; k < n; ++k) A[r][k] -= m * A[col][k];
            b[r] -= m * b[col];
        }
    }
    std::vector<double> x(n);
    for (size_t r = n; r-- > 0;) {
        double s = b[r];
        for (size_t k = r + 1; k < n; ++k) s -= A[r][k] * x[k];
        x[r] = s / A[r][r];
    }
    return x;
}

struct UnitState {
    std::vector<double> u;  // [0..m) player 1, [m..2m) player 2

    StrategyProfile to_profile(const Grid& grid) const {
        const size_t m = u.size() / 2;
        StrategyProfile p;
        p.grid = grid;
        p.rates1.resize(m);
        p.rates2.resize(m);
        for (size_t i = 0; i < m; ++i) {
            p.rates1[i] = iota_rate(u[i]);
            p.rates2[i] = iota_rate(u[m + i]);
        }
        return p;
    }
};

// Per-coordinate complementarity gap s - q (stop minus continuation) for the
// current profile values.
std::vector<double> comp_gap(const GameEngine& eng, const UnitState& s) {
    const int m = eng.n_interior();
    const StrategyProfile prof = s.to_profile(eng.grid());
    const ValueVectors v = eng.payoff_values(prof);
    std::vector<double> out(static_cast<size_t>(2 * m));
    for (int p : {1, 2}) {
        const auto& opp = prof.rates(3 - p);
        const auto& w = v.w(p);
        for (int j = 1; j <= m; ++j) {
            const size_t i = static_cast<size_t>(j - 1);
            const SojournEntry e = eng.sojourn(p, j, opp[i]);
            const double q = e.a * w[static_cast<size_t>(j + 1)] +
                             e.b * w[static_cast<size_t>(j - 1)] +
                             e.c_kill * eng.f(p, j);
            out[static_cast<size_t>((p - 1) * m) + i] = eng.g(p, j) - q;
        }
    }
    return out;
}

double natural_residual(const GameEngine& eng, const UnitState& s) {
    const auto C = comp_gap(eng, s);
    double worst = 0.0;
    for (size_t i = 0; i < C.size(); ++i) {
        const double z = s.u[i] + C[i];
        const double phi = s.u[i] - std::clamp(z, 0.0, 1.0);
        worst = std::max(worst, std::fabs(phi));
    }
    return worst;
}

// Full-mixing candidate in closed form: assume every value sits at g and read
// the opponent rate off the indifference equation, clamping negatives to 0
// and f = g points to immediate stopping.
UnitState closed_form_candidate(const GameEngine& eng) {
    const int m = eng.n_interior();
    UnitState s;
    s.u.assign(static_cast<size_t>(2 * m), 0.0);
    for (int p : {1, 2}) {
        for (int j = 1; j <= m; ++j) {
            const SojournEntry e = eng.primitive(p, j);
            const double gj = eng.g(p, j);
            const double num = e.a * eng.g(p, j + 1) + e.b * eng.g(p, j - 1) - gj;
            const double den = e.g * (gj - eng.f(p, j));
            const size_t opp_idx = static_cast<size_t>((2 - p) * m + j - 1);
            if (std::fabs(den) < 1e-300) {
                s.u[opp_idx] = 1.0;  // trivial point: stop immediately
            } else {
                s.u[opp_idx] = iota_unit(std::max(num / den, 0.0));
            }
        }
    }
    // own immediate stop at f = g points (payoff-neutral ties)
    for (int p : {1, 2}) {
        for (int j = 1; j <= m; ++j) {
            if (eng.f(p, j) - eng.g(p, j) < 1e-13)
                s.u[static_cast<size_t>((p - 1) * m + j - 1)] = 1.0;
        }
    }
    return s;
}

void enforce_nonstop(const GameEngine& eng, UnitState& s) {
    const int m = eng.n_interior();
    for (int p : {1, 2}) {
        for (int j = 1; j <= m; ++j) {
            const size_t own = static_cast<size_t>((p - 1) * m + j - 1);
            const size_t opp = static_cast<size_t>((2 - p) * m + j - 1);
            if (s.u[opp] >= 1.0 && eng.f(p, j) > eng.g(p, j)) s.u[own] = 0.0;
        }
    }
}

// One damped sweep: move each opponent rate toward the rate that makes this
// player indifferent under the current value vector.
void damped_sweep(const GameEngine& eng, UnitState& s, double damping) {
    const int m = eng.n_interior();
    const StrategyProfile prof = s.to_profile(eng.grid());
    const ValueVectors v = eng.payoff_values(prof);
    for (int p : {1, 2}) {
        const auto& w = v.w(p);
        for (int j = 1; j <= m; ++j) {
            const size_t i = static_cast<size_t>(j - 1);
            const double gj = eng.g(p, j), fj = eng.f(p, j);
            const size_t own = static_cast<size_t>((p - 1) * m) + i;
            const size_t opp = static_cast<size_t>((2 - p) * m) + i;
            if (fj - gj < 1e-13) {
                s.u[own] = 1.0;
                continue;
            }
            const SojournEntry e = eng.primitive(p, j);
            const double kstar = (e.a * w[static_cast<size_t>(j + 1)] +
                                  e.b * w[static_cast<size_t>(j - 1)] - gj) /
                                 (e.g * (gj - fj));
            const double target = iota_unit(std::max(kstar, 0.0));
            s.u[opp] = (1.0 - damping) * s.u[opp] + damping * target;
        }
    }
    enforce_nonstop(eng, s);
}

// Active-set semismooth Newton on the natural residual of the box-constrained
// complementarity system.
bool newton_polish(const GameEngine& eng, UnitState& s, double tol, int max_iters) {
    const size_t n = s.u.size();
    for (int it = 0; it < max_iters; ++it) {
        const auto C = comp_gap(eng, s);
        double nrm = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double z = s.u[i] + C[i];
            nrm = std::max(nrm, std::fabs(s.u[i] - std::clamp(z, 0.0, 1.0)));
        }
        if (nrm < tol) return true;

        UnitState trial = s;
        std::vector<size_t> inactive;
        for (size_t i = 0; i < n; ++i) {
            const double z = s.u[i] + C[i];
            if (z <= 0.0) trial.u[i] = 0.0;
            else if (z >= 1.0) trial.u[i] = 1.0;
            else inactive.push_back(i);
        }
        if (!inactive.empty()) {
            auto Ffull = comp_gap(eng, trial);
            std::vector<double> F(inactive.size());
            for (size_t k = 0; k < inactive.size(); ++k) F[k] = Ffull[inactive[k]];
            // forward-difference Jacobian over the inactive coordinates
            std::vector<std::vector<double>> J(inactive.size(),
                                               std::vector<double>(inactive.size()));
            const double h = 1e-7;
            for (size_t kc = 0; kc < inactive.size(); ++kc) {
                UnitState pert = trial;
                const size_t col = inactive[kc];
                const double step = pert.u[col] + h <= 1.0 - 1e-12 ? h : -h;
                pert.u[col] += step;
                const auto Fp = comp_gap(eng, pert);
                for (size_t kr = 0; kr < inactive.size(); ++kr) {
                    J[kr][kc] = (Fp[inactive[kr]] - F[kr]) / step;
                }
            }
            std::vector<double> du;
            try {
                std::vector<double> negF(F.size());
                for (size_t k = 0; k < F.size(); ++k) negF[k] = -F[k];
                du = solve_dense(J, negF);
            } catch (const Error&) {
                return false;
            }
            // backtracking line search on the natural residual
            double t = 1.0;
            const double base = std::min(nrm, natural_residual(eng, trial));
            bool accepted = false;
            for (int ls = 0; ls < 30; ++ls) {
                UnitState cand = trial;
                for (size_t k = 0; k < inactive.size(); ++k) {
                    cand.u[inactive[k]] =
                        std::clamp(trial.u[inactive[k]] + t * du[k], 0.0, 1.0);
                }
                if (natural_residual(eng, cand) < base * (1.0 - 1e-4 * t) || t < 1e-8) {
                    trial = cand;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if (!accepted) return false;
        }
        if (natural_residual(eng, trial) >= nrm && inactive.empty()) return false;
        s = trial;
    }
    return natural_residual(eng, s) < tol;
}

} // namespace

EquilibriumResult solve_grid_equilibrium(const GameEngine& engine,
                                         const SolverOptions& options,
                                         const StrategyProfile* warm_start) {
    const int m = engine.n_interior();
    EquilibriumResult out;
    const double tol = options.residual_tolerance;

    auto finish = [&](UnitState& s, bool ok) {
        out.profile = s.to_profile(engine.grid());
        out.values = engine.payoff_values(out.profile);
        out.per_point_residuals = engine.complementarity_residual(out.profile);
        out.residual_max = 0.0;
        for (const auto& row : out.per_point_residuals) {
            for (double v : row) out.residual_max = std::max(out.residual_max, v);
        }
        out.converged = ok && out.residual_max <= tol;
        out.residual_history.push_back(out.residual_max);
        return out.converged;
    };

    auto attempt = [&](UnitState s) -> bool {
        enforce_nonstop(engine, s);
        out.method_trace.push_back("candidate");
        if (finish(s, true)) return true;
        int used = 0;
        for (int round = 0; round < 4; ++round) {
            out.method_trace.push_back("damped");
            double best = kInf;
            for (int it = 0; it < options.max_outer_iterations / 4 + 10; ++it) {
                damped_sweep(engine, s, options.damping);
                ++used;
                const double r = engine.residual_max(s.to_profile(engine.grid()));
                best = std::min(best, r);
                out.residual_history.push_back(r);
                out.iterations_used = used;
                if (r <= tol) return finish(s, true);
                if (options.newton_enabled && r < 1e-1 && it >= 5) break;
            }
            if (options.newton_enabled) {
                out.method_trace.push_back("newton");
                UnitState backup = s;
                if (newton_polish(engine, s, std::min(tol, 1e-10), 40) &&
                    finish(s, true)) {
                    return true;
                }
                if (engine.residual_max(s.to_profile(engine.grid())) >
                    engine.residual_max(backup.to_profile(engine.grid()))) {
                    s = backup;  // newton made it worse; fall back
                }
            }
            if (finish(s, true)) return true;
        }
        return finish(s, true);
    };

    if (warm_start) {
        UnitState s;
        s.u.resize(static_cast<size_t>(2 * m));
        for (int i = 0; i < m; ++i) {
            s.u[static_cast<size_t>(i)] = iota_unit(warm_start->rates1[static_cast<size_t>(i)]);
            s.u[static_cast<size_t>(m + i)] = iota_unit(warm_start->rates2[static_cast<size_t>(i)]);
        }
        if (attempt(std::move(s))) return out;
    }
    if (attempt(closed_form_candidate(engine))) return out;

    // multi-start from random unit profiles
    Rng rng(options.rng_seed);
    for (int k = 0; k < options.restart_seeds; ++k) {
        out.method_trace.push_back("restart");
        UnitState s;
        s.u.resize(static_cast<size_t>(2 * m));
        for (auto& u : s.u) u = 0.98 * rng.uniform();
        if (attempt(std::move(s))) return out;
    }

    std::ostringstream os;
    os << "best residual " << out.residual_max << " after "
       << out.iterations_used << " iterations";
    fail("NotConverged", os.str());
}

StoppedLaw stopped_distribution(const GameEngine& engine,
                                const StrategyProfile& profile, int start_index,
                                int which_player) {
    const Grid& grid = engine.grid();
    const int m = grid.n_interior();
    if (start_index < 0 || start_index >= grid.n_points())
        fail("PointOutsideInterval", "start point not on the grid");

    StoppedLaw law;
    law.support = grid.points;
    law.mass.assign(static_cast<size_t>(grid.n_points()), 0.0);

    if (!grid.is_interior(start_index)) {
        if (which_player == 0) law.mass[static_cast<size_t>(start_index)] = 1.0;
        return law;
    }

    // expected visit counts of the embedded chain: (I - P^T) N = e_start
    std::vector<double> lower(static_cast<size_t>(m), 0.0), diag(static_cast<size_t>(m), 1.0);
    std::vector<double> upper(static_cast<size_t>(m), 0.0), rhs(static_cast<size_t>(m), 0.0);
    std::vector<double> pa(static_cast<size_t>(m)), pb(static_cast<size_t>(m)),
        pc(static_cast<size_t>(m));
    for (int j = 1; j <= m; ++j) {
        const size_t i = static_cast<size_t>(j - 1);
        const double l1 = profile.rates1[i], l2 = profile.rates2[i];
        const double kappa = l1 + l2;
        const SojournEntry e = engine.sojourn0(j, kappa);
        pa[i] = e.a;
        pb[i] = e.b;
        pc[i] = e.c_kill;
    }
    // transpose: visits at j receive a-flow from j-1 and b-flow from j+1
    for (int j = 1; j <= m; ++j) {
        const size_t i = static_cast<size_t>(j - 1);
        if (j - 1 >= 1) lower[i] = -pa[i - 1];
        if (j + 1 <= m) upper[i] = -pb[i + 1];
    }
    rhs[static_cast<size_t>(start_index - 1)] = 1.0;
    const auto visits = solve_tridiagonal(lower, diag, upper, rhs);

    for (int j = 1; j <= m; ++j) {
        const size_t i = static_cast<size_t>(j - 1);
        const double l1 = profile.rates1[i], l2 = profile.rates2[i];
        const double kappa = l1 + l2;
        double share1 = 0.5, share2 = 0.5;
        if (std::isinf(l1) && !std::isinf(l2)) { share1 = 1.0; share2 = 0.0; }
        else if (std::isinf(l2) && !std::isinf(l1)) { share1 = 0.0; share2 = 1.0; }
        else if (std::isinf(l1) && std::isinf(l2)) { share1 = 1.0; share2 = 0.0; }
        else if (kappa > 0.0) { share1 = l1 / kappa; share2 = l2 / kappa; }
        else { share1 = share2 = 0.0; }
        const double kill_mass = visits[i] * pc[i];
        double mass = 0.0;
        if (which_player == 0) mass = kill_mass;
        else if (which_player == 1) mass = kill_mass * share1;
        else mass = kill_mass * share2;
        law.mass[static_cast<size_t>(j)] += mass;
        if (which_player == 0) {
            if (j == 1) law.mass.front() += visits[i] * pb[i];
            if (j == m) law.mass.back() += visits[i] * pa[i];
        }
    }
    if (which_player == 0) {
        const double total = std::accumulate(law.mass.begin(), law.mass.end(), 0.0);
        if (std::fabs(total - 1.0) > 1e-10) {
            law.renormalized = true;
            if (total > 0) {
                for (double& v : law.mass) v /= total;
            }
        }
    }
    return law;
}

double distribution_distance(const StoppedLaw& a, const StoppedLaw& b) {
    auto total = [](const StoppedLaw& l) {
        return std::accumulate(l.mass.begin(), l.mass.end(), 0.0);
    };
    if (std::fabs(total(a) - 1.0) > 1e-8 || std::fabs(total(b) - 1.0) > 1e-8)
        fail("NonProbabilityInput", "laws must sum to 1");
    std::vector<double> pts;
    pts.reserve(a.support.size() + b.support.size());
    pts.insert(pts.end(), a.support.begin(), a.support.end());
    pts.insert(pts.end(), b.support.begin(), b.support.end());
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    auto cdf = [](const StoppedLaw& l, double x) {
        double acc = 0.0;
        for (size_t i = 0; i < l.support.size() && l.support[i] <= x + 1e-15; ++i)
            acc += l.mass[i];
        return acc;
    };
    double d = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        d += std::fabs(cdf(a, pts[i]) - cdf(b, pts[i])) * (pts[i + 1] - pts[i]);
    }
    return d;
}

std::vector<Grid> uniform_schedule(const DiffusionModel& model, int levels) {
    std::vector<Grid> out;
    Grid g = build_grid(model, 1, GridPlacement::Uniform);
    out.push_back(g);
    for (int k = 1; k < levels; ++k) {
        g = refine_grid(g);
        out.push_back(g);
    }
    return out;
}

RefinementReport refine_and_solve(const DiffusionModel& model,
                                  const PayoffSpec& payoffs,
                                  const std::vector<Grid>& schedule,
                                  const SolverOptions& options) {
    for (size_t k = 1; k < schedule.size(); ++k) {
        if (!is_nested(schedule[k - 1], schedule[k]))
            fail("PointOutsideInterval", "refinement schedule must be nested");
    }
    RefinementReport report;
    StrategyProfile warm;
    bool have_warm = false;
    const GameEngine* prev_engine = nullptr;
    std::vector<std::unique_ptr<GameEngine>> engines;

    for (size_t k = 0; k < schedule.size(); ++k) {
        const Grid& grid = schedule[k];
        engines.push_back(std::make_unique<GameEngine>(model, payoffs, grid));
        const GameEngine& eng = *engines.back();

        SolverOptions opts = options;
        RefinementLevel level;
        level.n_interior = grid.n_interior();
        StrategyProfile injected;
        const StrategyProfile* init = nullptr;
        if (have_warm && prev_engine) {
            // previous level's rates at coincident points; new points start
            // at unit-rate 0
            const Grid& coarse = prev_engine->grid();
            injected.grid = grid;
            injected.rates1.assign(static_cast<size_t>(grid.n_interior()), 0.0);
            injected.rates2.assign(static_cast<size_t>(grid.n_interior()), 0.0);
            for (int i = 1; i + 1 < coarse.n_points(); ++i) {
                const auto& fp = grid.points;
                const auto it = std::lower_bound(fp.begin(), fp.end(), coarse[i] - 1e-12);
                const size_t fj = static_cast<size_t>(it - fp.begin());
                injected.rates1[fj - 1] = warm.rates1[static_cast<size_t>(i - 1)];
                injected.rates2[fj - 1] = warm.rates2[static_cast<size_t>(i - 1)];
            }
            init = &injected;
        }
        try {
            level.result = solve_grid_equilibrium(eng, opts, init);
        } catch (const Error& e) {
            if (e.kind() != "NotConverged") throw;
            level.result.converged = false;
            level.result.method_trace.push_back("not_converged");
            report.levels.push_back(std::move(level));
            continue;
        }

        if (have_warm && prev_engine) {
            const Grid& coarse = prev_engine->grid();
            // value distance over common points, both players
            const auto& vals = level.result.values;
            ValueVectors prev_vals = prev_engine->payoff_values(warm);
            double dv = 0.0;
            for (int i = 0; i < coarse.n_points(); ++i) {
                // locate the matching fine index
                const auto& fp = grid.points;
                const auto it = std::lower_bound(fp.begin(), fp.end(), coarse[i] - 1e-12);
                const size_t fj = static_cast<size_t>(it - fp.begin());
                dv = std::max(dv, std::fabs(prev_vals.w1[static_cast<size_t>(i)] - vals.w1[fj]));
                dv = std::max(dv, std::fabs(prev_vals.w2[static_cast<size_t>(i)] - vals.w2[fj]));
            }
            level.value_distance = dv;

            const int cs = coarse.n_points() / 2;
            const int fs = grid.n_points() / 2;
            const StoppedLaw prev_law = stopped_distribution(*prev_engine, warm, cs);
            const StoppedLaw law = stopped_distribution(eng, level.result.profile, fs);
            level.stopped_distance = distribution_distance(prev_law, law);
        }

        warm = level.result.profile;
        have_warm = level.result.converged;
        prev_engine = &eng;
        report.levels.push_back(std::move(level));
    }
    return report;
}

} // namespace woa
