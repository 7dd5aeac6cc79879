#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "woa/verify.hpp"

namespace woa {

struct ProblemDocument {
    std::string name = "unnamed";
    uint64_t seed = 1;

    RawModelSpec model_spec;
    std::string drift_expr, volatility_expr;  // custom family only
    std::string g1_expr, f1_expr, g2_expr, f2_expr;
    double r1 = 0.0, r2 = 0.0;

    std::string placement = "uniform";
    int n_interior = 9;
    int refinement_levels = 5;
    std::vector<double> explicit_points;

    SolverOptions solver;
    SimConfig sim;

    nlohmann::ordered_json canonical;  // canonical serialized form

    DiffusionModel build_diffusion() const;
    PayoffSpec build_payoffs() const;
    Grid build_problem_grid() const;
    uint64_t content_hash() const;  // FNV-1a over the canonical form
};

ProblemDocument parse_problem(const std::string& path);
ProblemDocument parse_problem_text(const std::string& text);

struct ResultDocument {
    nlohmann::ordered_json body;
    void save(const std::string& path) const;
    std::string dump() const;
};

ResultDocument make_result_document(const ProblemDocument& problem,
                                    const std::vector<EquilibriumResult>& results,
                                    const RefinementReport* refinement,
                                    const std::vector<VerificationReport>& reports,
                                    bool include_timings,
                                    const std::vector<double>& wall_times);

void emit_plot_data(const ResultDocument& result, const std::string& out_dir);

// CLI entry: command in {solve, refine, verify, simulate, oracle}.
// Exit codes: 0 ok, 2 parse error, 3 assumption failure, 4 not converged,
// 5 verification failure.
int run(const std::string& command, const std::vector<std::string>& args);

std::string tool_version();

} // namespace woa
