#include "woa/cli_io.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "woa/expr.hpp"
#include "woa/oracle.hpp"

namespace woa {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string tool_version() { return "woa 1.0.0"; }

namespace {

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex64(uint64_t v) {
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

double require_number(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_number())
        fail("SchemaError", ctx + " needs numeric field '" + key + "'");
    return j[key].get<double>();
}

std::string require_string(const json& j, const std::string& key, const std::string& ctx) {
    if (!j.contains(key) || !j[key].is_string())
        fail("SchemaError", ctx + " needs string field '" + key + "'");
    return j[key].get<std::string>();
}

} // namespace

DiffusionModel ProblemDocument::build_diffusion() const {
    RawModelSpec spec = model_spec;
    if (spec.family == "custom") {
        spec.custom_drift = Expression::parse(drift_expr).as_function();
        spec.custom_volatility = Expression::parse(volatility_expr).as_function();
    }
    return build_model(spec);
}

PayoffSpec ProblemDocument::build_payoffs() const {
    PayoffSpec p;
    p.g1 = Expression::parse(g1_expr).as_function();
    p.f1 = Expression::parse(f1_expr).as_function();
    p.g2 = Expression::parse(g2_expr).as_function();
    p.f2 = Expression::parse(f2_expr).as_function();
    p.r1 = r1;
    p.r2 = r2;
    return p;
}

Grid ProblemDocument::build_problem_grid() const {
    const DiffusionModel m = build_diffusion();
    if (placement == "explicit")
        return build_grid(m, 0, GridPlacement::Explicit, explicit_points);
    if (placement == "chebyshev")
        return build_grid(m, n_interior, GridPlacement::Chebyshev);
    if (placement == "uniform")
        return build_grid(m, n_interior, GridPlacement::Uniform);
    fail("SchemaError", "unknown grid placement: " + placement);
}

uint64_t ProblemDocument::content_hash() const { return fnv1a(canonical.dump()); }

ProblemDocument parse_problem_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail("SchemaError", std::string("not valid structured text: ") + e.what());
    }
    if (!j.is_object()) fail("SchemaError", "top level must be an object");

    ProblemDocument doc;
    doc.name = j.value("name", std::string("unnamed"));
    doc.seed = j.value("seed", 1ULL);

    if (!j.contains("model") || !j["model"].is_object())
        fail("SchemaError", "missing 'model' block");
    const json& jm = j["model"];
    doc.model_spec.family = require_string(jm, "family", "model");
    doc.model_spec.lower = require_number(jm, "lower", "model");
    doc.model_spec.upper = require_number(jm, "upper", "model");
    if (doc.model_spec.family == "bm") {
        doc.model_spec.sigma = jm.value("sigma", 1.0);
    } else if (doc.model_spec.family == "ou") {
        doc.model_spec.theta = require_number(jm, "theta", "model");
        doc.model_spec.mean = require_number(jm, "mean", "model");
        doc.model_spec.sigma = require_number(jm, "sigma", "model");
    } else if (doc.model_spec.family == "gbm") {
        doc.model_spec.gbm_mu = require_number(jm, "mu", "model");
        doc.model_spec.gbm_sigma = require_number(jm, "sigma", "model");
    } else if (doc.model_spec.family == "custom") {
        doc.drift_expr = require_string(jm, "drift", "model");
        doc.volatility_expr = require_string(jm, "volatility", "model");
    } else {
        fail("SchemaError", "unknown model family: " + doc.model_spec.family);
    }

    if (!j.contains("payoffs") || !j["payoffs"].is_object())
        fail("SchemaError", "missing 'payoffs' block");
    const json& jp = j["payoffs"];
    doc.g1_expr = require_string(jp, "g1", "payoffs");
    doc.f1_expr = require_string(jp, "f1", "payoffs");
    doc.g2_expr = jp.value("g2", doc.g1_expr);
    doc.f2_expr = jp.value("f2", doc.f1_expr);
    doc.r1 = require_number(jp, "r1", "payoffs");
    doc.r2 = jp.value("r2", doc.r1);

    const json jg = j.value("grid", json::object());
    doc.placement = jg.value("placement", std::string("uniform"));
    doc.n_interior = jg.value("n_interior", 9);
    doc.refinement_levels = jg.value("refinement_levels", 5);
    if (jg.contains("points")) doc.explicit_points = jg["points"].get<std::vector<double>>();

    const json js = j.value("solver", json::object());
    doc.solver.max_outer_iterations = js.value("max_outer_iterations", 500);
    doc.solver.damping = js.value("damping", 0.5);
    doc.solver.residual_tolerance = js.value("residual_tolerance", 1e-8);
    doc.solver.newton_enabled = js.value("newton_enabled", true);
    doc.solver.restart_seeds = js.value("restart_seeds", 3);
    doc.solver.rng_seed = doc.seed;
    if (!(doc.solver.damping > 0.0 && doc.solver.damping <= 1.0))
        fail("SchemaError", "solver damping must be in (0, 1]");
    if (!(doc.solver.residual_tolerance > 0.0))
        fail("SchemaError", "solver tolerance must be > 0");

    const json jsim = j.value("simulation", json::object());
    doc.sim.n_paths = jsim.value("n_paths", static_cast<int64_t>(100000));
    doc.sim.dt = jsim.value("dt", 1e-4);
    doc.sim.band_epsilon = jsim.value("band_epsilon", 1e-2);
    doc.sim.euler_mode = jsim.value("mode", std::string("embedded")) == "euler";
    doc.sim.rng_seed = doc.seed;

    // canonical form: every field explicit, fixed key order
    json c;
    c["name"] = doc.name;
    c["seed"] = doc.seed;
    c["model"] = json::object();
    c["model"]["family"] = doc.model_spec.family;
    c["model"]["lower"] = doc.model_spec.lower;
    c["model"]["upper"] = doc.model_spec.upper;
    if (doc.model_spec.family == "bm") c["model"]["sigma"] = doc.model_spec.sigma;
    if (doc.model_spec.family == "ou") {
        c["model"]["theta"] = doc.model_spec.theta;
        c["model"]["mean"] = doc.model_spec.mean;
        c["model"]["sigma"] = doc.model_spec.sigma;
    }
    if (doc.model_spec.family == "gbm") {
        c["model"]["mu"] = doc.model_spec.gbm_mu;
        c["model"]["sigma"] = doc.model_spec.gbm_sigma;
    }
    if (doc.model_spec.family == "custom") {
        c["model"]["drift"] = doc.drift_expr;
        c["model"]["volatility"] = doc.volatility_expr;
    }
    c["payoffs"] = {{"g1", doc.g1_expr}, {"f1", doc.f1_expr},
                    {"g2", doc.g2_expr}, {"f2", doc.f2_expr},
                    {"r1", doc.r1},      {"r2", doc.r2}};
    c["grid"] = {{"placement", doc.placement},
                 {"n_interior", doc.n_interior},
                 {"refinement_levels", doc.refinement_levels}};
    if (!doc.explicit_points.empty()) c["grid"]["points"] = doc.explicit_points;
    c["solver"] = {{"max_outer_iterations", doc.solver.max_outer_iterations},
                   {"damping", doc.solver.damping},
                   {"residual_tolerance", doc.solver.residual_tolerance},
                   {"newton_enabled", doc.solver.newton_enabled},
                   {"restart_seeds", doc.solver.restart_seeds}};
    c["simulation"] = {{"n_paths", doc.sim.n_paths},
                       {"dt", doc.sim.dt},
                       {"band_epsilon", doc.sim.band_epsilon},
                       {"mode", doc.sim.euler_mode ? "euler" : "embedded"}};
    doc.canonical = std::move(c);

    // assumption gate: solving entry points only ever see validated problems
    const DiffusionModel model = doc.build_diffusion();
    const PayoffSpec payoffs = doc.build_payoffs();
    const ValidationReport rep = validate_assumptions(model, payoffs);
    if (!rep.all_passed()) fail("AssumptionError", rep.summary());
    if (doc.r1 < 0 || doc.r2 < 0) fail("SchemaError", "discount rates must be >= 0");
    return doc;
}

ProblemDocument parse_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("SchemaError", "cannot open problem file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem_text(ss.str());
}

namespace {

json profile_to_json(const StrategyProfile& p) {
    json j;
    j["grid"] = p.grid.points;
    j["unit_rates1"] = p.unit1();
    j["unit_rates2"] = p.unit2();
    return j;
}

StrategyProfile profile_from_json(const json& j) {
    StrategyProfile p;
    p.grid.points = j.at("grid").get<std::vector<double>>();
    const auto u1 = j.at("unit_rates1").get<std::vector<double>>();
    const auto u2 = j.at("unit_rates2").get<std::vector<double>>();
    for (double u : u1) p.rates1.push_back(iota_rate(u));
    for (double u : u2) p.rates2.push_back(iota_rate(u));
    return p;
}

json equilibrium_to_json(const EquilibriumResult& r) {
    json j = profile_to_json(r.profile);
    j["w1"] = r.values.w1;
    j["w2"] = r.values.w2;
    j["residual_max"] = r.residual_max;
    j["per_point_residuals"] = r.per_point_residuals;
    j["iterations_used"] = r.iterations_used;
    j["method_trace"] = r.method_trace;
    j["residual_history"] = r.residual_history;
    j["converged"] = r.converged;
    return j;
}

json law_to_json(const StoppedLaw& law) {
    json j;
    j["support"] = law.support;
    j["mass"] = law.mass;
    j["renormalized"] = law.renormalized;
    return j;
}

const char* status_name(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        default: return "skipped";
    }
}

json report_to_json(const VerificationReport& r) {
    json j;
    j["overall"] = r.overall();
    j["checks"] = json::array();
    for (const auto& c : r.checks) {
        json jc;
        jc["name"] = c.name;
        jc["status"] = status_name(c.status);
        jc["measured"] = c.measured;
        jc["threshold"] = c.threshold;
        jc["witness"] = c.witness;
        j["checks"].push_back(jc);
    }
    return j;
}

} // namespace

ResultDocument make_result_document(const ProblemDocument& problem,
                                    const std::vector<EquilibriumResult>& results,
                                    const RefinementReport* refinement,
                                    const std::vector<VerificationReport>& reports,
                                    bool include_timings,
                                    const std::vector<double>& wall_times) {
    ResultDocument doc;
    json& b = doc.body;
    b["schema_version"] = 1;
    b["tool_version"] = tool_version();
    b["problem_name"] = problem.name;
    b["problem_hash"] = hex64(problem.content_hash());
    b["seed"] = problem.seed;
    b["equilibria"] = json::array();
    for (const auto& r : results) b["equilibria"].push_back(equilibrium_to_json(r));
    if (refinement) {
        json jr = json::array();
        for (const auto& lvl : refinement->levels) {
            json jl;
            jl["n_interior"] = lvl.n_interior;
            jl["value_distance"] = lvl.value_distance;
            jl["stopped_distance"] = lvl.stopped_distance;
            jl["equilibrium"] = equilibrium_to_json(lvl.result);
            jr.push_back(jl);
        }
        b["refinement"] = std::move(jr);
    }
    b["verification"] = json::array();
    for (const auto& r : reports) b["verification"].push_back(report_to_json(r));
    if (include_timings) {
        b["wall_times_seconds"] = wall_times;
    }
    return doc;
}

std::string ResultDocument::dump() const { return body.dump(2) + "\n"; }

void ResultDocument::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) fail("IoError", "cannot write " + path);
    out << dump();
}

void emit_plot_data(const ResultDocument& result, const std::string& out_dir) {
    const json& b = result.body;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) fail("IoError", "cannot create " + out_dir);

    auto write_table = [&](const std::string& name, const std::string& header,
                           const std::vector<std::vector<double>>& cols) {
        const fs::path p = fs::path(out_dir) / name;
        std::ofstream out(p);
        if (!out) fail("IoError", "cannot write " + p.string());
        out.precision(17);
        out << header << "\n";
        if (cols.empty()) return;
        for (size_t row = 0; row < cols[0].size(); ++row) {
            for (size_t c = 0; c < cols.size(); ++c) {
                if (c) out << "\t";
                out << cols[c][row];
            }
            out << "\n";
        }
    };

    auto emit_equilibrium = [&](const json& eq, const std::string& suffix) {
        const auto grid = eq.at("grid").get<std::vector<double>>();
        auto u1 = eq.at("unit_rates1").get<std::vector<double>>();
        auto u2 = eq.at("unit_rates2").get<std::vector<double>>();
        // rates live on interior points
        std::vector<double> xin(grid.begin() + 1, grid.end() - 1);
        write_table("rates" + suffix + ".tsv", "x\tunit_rate_p1\tunit_rate_p2",
                    {xin, u1, u2});
        write_table("values" + suffix + ".tsv", "x\tw1\tw2",
                    {grid, eq.at("w1").get<std::vector<double>>(),
                     eq.at("w2").get<std::vector<double>>()});
        const auto hist = eq.at("residual_history").get<std::vector<double>>();
        std::vector<double> iters(hist.size());
        for (size_t i = 0; i < hist.size(); ++i) iters[i] = static_cast<double>(i);
        write_table("residuals" + suffix + ".tsv", "iteration\tresidual", {iters, hist});
        if (eq.contains("stopped_law")) {
            write_table("stopped_law" + suffix + ".tsv", "x\tmass",
                        {eq["stopped_law"].at("support").get<std::vector<double>>(),
                         eq["stopped_law"].at("mass").get<std::vector<double>>()});
        }
    };

    bool wrote = false;
    if (b.contains("equilibria")) {
        for (size_t i = 0; i < b["equilibria"].size(); ++i) {
            emit_equilibrium(b["equilibria"][i],
                             b["equilibria"].size() > 1 ? "_" + std::to_string(i) : "");
            wrote = true;
        }
    }
    if (b.contains("refinement")) {
        for (size_t i = 0; i < b["refinement"].size(); ++i) {
            emit_equilibrium(b["refinement"][i]["equilibrium"],
                             "_level" + std::to_string(i));
            wrote = true;
        }
    }
    if (!wrote) std::cerr << "warning: empty result, no plot data written\n";
}

namespace {

struct CliOpts {
    std::string problem_path;
    std::string out_dir = "out";
    std::string result_path;
    bool have_seed = false;
    uint64_t seed = 0;
    bool have_tol = false;
    double tol = 0.0;
    bool have_levels = false;
    int levels = 0;
    bool have_paths = false;
    int64_t paths = 0;
    bool timings = false;
    bool plots = false;
};

CliOpts parse_cli(const std::vector<std::string>& args) {
    CliOpts o;
    for (size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        auto next = [&]() -> const std::string& {
            if (i + 1 >= args.size()) fail("SchemaError", "missing value for " + a);
            return args[++i];
        };
        if (a == "--out") o.out_dir = next();
        else if (a == "--result") o.result_path = next();
        else if (a == "--seed") { o.seed = std::stoull(next()); o.have_seed = true; }
        else if (a == "--tol") { o.tol = std::stod(next()); o.have_tol = true; }
        else if (a == "--levels") { o.levels = std::stoi(next()); o.have_levels = true; }
        else if (a == "--paths") { o.paths = std::stoll(next()); o.have_paths = true; }
        else if (a == "--timings") o.timings = true;
        else if (a == "--plots") o.plots = true;
        else if (!a.empty() && a[0] == '-') fail("SchemaError", "unknown option " + a);
        else if (o.problem_path.empty()) o.problem_path = a;
        else fail("SchemaError", "unexpected argument " + a);
    }
    if (o.problem_path.empty()) fail("SchemaError", "missing problem file argument");
    return o;
}

ProblemDocument load_problem(const CliOpts& o) {
    ProblemDocument doc = parse_problem(o.problem_path);
    if (o.have_seed) {
        doc.seed = o.seed;
        doc.solver.rng_seed = o.seed;
        doc.sim.rng_seed = o.seed;
        doc.canonical["seed"] = o.seed;
    }
    if (o.have_tol) {
        doc.solver.residual_tolerance = o.tol;
        doc.canonical["solver"]["residual_tolerance"] = o.tol;
    }
    if (o.have_levels) {
        doc.refinement_levels = o.levels;
        doc.canonical["grid"]["refinement_levels"] = o.levels;
    }
    if (o.have_paths) {
        doc.sim.n_paths = o.paths;
        doc.canonical["simulation"]["n_paths"] = o.paths;
    }
    return doc;
}

int exit_code_for(const Error& e) {
    const std::string& k = e.kind();
    if (k == "AssumptionError") return 3;
    if (k == "NotConverged" || k == "NoConvergence" || k == "IntegrationBlowup" ||
        k == "MethodDisagreement" || k == "SingularSystem") {
        return 4;
    }
    return 2;  // parse / schema / expression / io
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string default_result_path(const CliOpts& o, const ProblemDocument& doc) {
    return (fs::path(o.out_dir) / (doc.name + ".result.json")).string();
}

int cmd_solve(const CliOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    ProblemDocument doc = load_problem(o);
    const DiffusionModel model = doc.build_diffusion();
    const PayoffSpec payoffs = doc.build_payoffs();
    const Grid grid = doc.build_problem_grid();
    GameEngine engine(model, payoffs, grid);

    EquilibriumResult result = solve_grid_equilibrium(engine, doc.solver);
    const VerificationReport cert =
        certify_equilibrium(engine, result.profile, doc.solver.residual_tolerance);

    ResultDocument out = make_result_document(doc, {result}, nullptr, {cert},
                                              o.timings, {seconds_since(t0)});
    const int mid = grid.n_points() / 2;
    out.body["equilibria"][0]["stopped_law"] =
        law_to_json(stopped_distribution(engine, result.profile, mid));

    fs::create_directories(o.out_dir);
    out.save(default_result_path(o, doc));
    if (o.plots) emit_plot_data(out, o.out_dir);
    std::cout << cert.summary();
    return cert.overall() ? 0 : 5;
}

int cmd_refine(const CliOpts& o) {
    const auto t0 = std::chrono::steady_clock::now();
    ProblemDocument doc = load_problem(o);
    const DiffusionModel model = doc.build_diffusion();
    const PayoffSpec payoffs = doc.build_payoffs();
    const auto schedule = uniform_schedule(model, doc.refinement_levels);

    RefinementReport report = refine_and_solve(model, payoffs, schedule, doc.solver);
    const VerificationReport diag = refinement_diagnostics(report, 1e-2);

    bool all_converged = true;
    for (const auto& lvl : report.levels) all_converged &= lvl.result.converged;

    ResultDocument out = make_result_document(doc, {}, &report, {diag},
                                              o.timings, {seconds_since(t0)});
    fs::create_directories(o.out_dir);
    out.save(default_result_path(o, doc));
    if (o.plots) emit_plot_data(out, o.out_dir);
    std::cout << diag.summary();
    if (!all_converged) return 4;
    return diag.overall() ? 0 : 5;
}

int cmd_verify(const CliOpts& o) {
    ProblemDocument doc = load_problem(o);
    const std::string rp =
        o.result_path.empty() ? default_result_path(o, doc) : o.result_path;
    std::ifstream in(rp);
    if (!in) fail("SchemaError", "cannot open result file: " + rp);
    json stored;
    try {
        stored = json::parse(in);
    } catch (const std::exception& e) {
        fail("SchemaError", std::string("bad result file: ") + e.what());
    }

    bool ok = true;
    if (stored.value("problem_hash", std::string()) != hex64(doc.content_hash())) {
        std::cout << "problem hash mismatch\n";
        ok = false;
    }
    const DiffusionModel model = doc.build_diffusion();
    const PayoffSpec payoffs = doc.build_payoffs();

    auto recheck = [&](const json& eq) {
        StrategyProfile profile = profile_from_json(eq);
        GameEngine engine(model, payoffs, profile.grid);
        const double res = engine.residual_max(profile);
        const double stored_res = eq.value("residual_max", -1.0);
        if (std::fabs(res - stored_res) > 1e-12) {
            std::cout << "stored residual " << stored_res
                      << " does not reproduce (got " << res << ")\n";
            ok = false;
        }
        const VerificationReport cert =
            certify_equilibrium(engine, profile, doc.solver.residual_tolerance);
        std::cout << cert.summary();
        ok = ok && cert.overall();
    };

    if (stored.contains("equilibria")) {
        for (const auto& eq : stored["equilibria"]) recheck(eq);
    }
    if (stored.contains("refinement") && !stored["refinement"].empty()) {
        recheck(stored["refinement"].back()["equilibrium"]);
    }
    return ok ? 0 : 5;
}

int cmd_simulate(const CliOpts& o) {
    ProblemDocument doc = load_problem(o);
    const DiffusionModel model = doc.build_diffusion();
    const PayoffSpec payoffs = doc.build_payoffs();

    StrategyProfile profile;
    const std::string rp =
        o.result_path.empty() ? default_result_path(o, doc) : o.result_path;
    std::ifstream in(rp);
    if (in) {
        const json stored = json::parse(in);
        if (stored.contains("equilibria") && !stored["equilibria"].empty()) {
            profile = profile_from_json(stored["equilibria"][0]);
        } else if (stored.contains("refinement") && !stored["refinement"].empty()) {
            profile = profile_from_json(stored["refinement"].back()["equilibrium"]);
        } else {
            fail("SchemaError", "result file has no strategies");
        }
    } else {
        const Grid grid = doc.build_problem_grid();
        GameEngine tmp(model, payoffs, grid);
        profile = solve_grid_equilibrium(tmp, doc.solver).profile;
    }

    GameEngine engine(model, payoffs, profile.grid);
    const VerificationReport rep = cross_validate(engine, profile, doc.sim);
    ResultDocument out = make_result_document(doc, {}, nullptr, {rep}, false, {});
    fs::create_directories(o.out_dir);
    out.save((fs::path(o.out_dir) / (doc.name + ".simulation.json")).string());
    std::cout << rep.summary();
    return rep.overall() ? 0 : 5;
}

int cmd_oracle(const CliOpts& o) {
    ProblemDocument doc = load_problem(o);
    const DiffusionModel model = doc.build_diffusion();
    const PayoffSpec payoffs = doc.build_payoffs();
    const Grid grid = doc.build_problem_grid();
    GameEngine engine(model, payoffs, grid);

    json out;
    if (grid.n_interior() == 1) {
        const OnePointRates r = oracle_one_point_rates(engine);
        out["one_point_bisection"] = {{"rate1", iota_unit(r.rate1)},
                                      {"rate2", iota_unit(r.rate2)},
                                      {"unit_form", true},
                                      {"mixing1", r.mixing1},
                                      {"mixing2", r.mixing2}};
    } else if (grid.n_interior() <= 10) {
        const std::vector<double> zeros(static_cast<size_t>(grid.n_interior()), 0.0);
        for (int p : {1, 2}) {
            const auto enumd = oracle_enumerate_best_response(engine, zeros, p);
            json je;
            je["value"] = enumd.value;
            je["argmax_stop"] = enumd.argmax_stop;
            out["enumeration_vs_zero_opponent"]["player" + std::to_string(p)] = je;
        }
    } else {
        fail("PointOutsideInterval", "oracle only runs on tiny instances");
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

} // namespace

int run(const std::string& command, const std::vector<std::string>& args) {
    try {
        const CliOpts o = parse_cli(args);
        if (command == "solve") return cmd_solve(o);
        if (command == "refine") return cmd_refine(o);
        if (command == "verify") return cmd_verify(o);
        if (command == "simulate") return cmd_simulate(o);
        if (command == "oracle") return cmd_oracle(o);
        std::cerr << "unknown command: " << command << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace woa
