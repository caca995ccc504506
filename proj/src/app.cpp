#include "nsfd/app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "nsfd/convergence.hpp"
#include "nsfd/problems.hpp"
#include "nsfd/solver.hpp"
#include "nsfd/verify.hpp"

namespace nsfd {

namespace {

using nlohmann::json;

namespace fs = std::filesystem;

SolveMethod method_of(const std::string& s) {
    if (s == "linear_direct") return SolveMethod::linear_direct;
    if (s == "pseudo_time") return SolveMethod::pseudo_time;
    return SolveMethod::newton;
}

SolveConfig solve_config(const RunConfig& cfg) {
    SolveConfig sc;
    sc.method = method_of(cfg.method);
    sc.newton_tol = cfg.newton_tol;
    sc.newton_max_iter = cfg.newton_max_iter;
    sc.damping = cfg.damping == "none" ? Damping::none : Damping::backtracking;
    sc.rho = cfg.rho;
    sc.max_sweeps = cfg.max_sweeps;
    sc.threads = cfg.workers;
    return sc;
}

SchemeParams scheme_params(const RunConfig& cfg) {
    SchemeParams sp;
    sp.gamma = cfg.gamma;
    sp.sigma = cfg.sigma;
    sp.allow_unsafe = cfg.allow_unsafe;
    return sp;
}

ProblemDef problem_of(const RunConfig& cfg) {
    ControlSet cs;
    cs.phi_count = cfg.phi_count;
    cs.rot_count = cfg.rot_count;
    return make_problem(cfg.problem, cs);
}

std::string artifact(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

void emit_status(const json& j) { std::cout << j.dump() << std::endl; }

json row_json(const ConvergenceRow& r) {
    json j;
    j["h_axis"] = r.h_axis;
    j["h_diag"] = r.h_diag;
    j["error_linf"] = r.error_linf;
    if (r.order)
        j["order"] = *r.order;
    else
        j["order"] = nullptr;
    j["solved"] = r.solved;
    j["note"] = r.note;
    return j;
}

int cmd_verify(const RunConfig& cfg) {
    auto checks = run_verification(cfg.seed);
    std::string report = to_json(checks);
    std::string path = artifact(cfg, "report.json");
    atomic_write(path, report);
    bool ok = all_pass(checks);
    json status;
    status["command"] = "verify";
    status["all_pass"] = ok;
    status["checks"] = checks.size();
    status["report"] = path;
    if (!ok)
        for (const auto& c : checks)
            if (!c.pass) {
                status["first_failure"] = c.name;
                break;
            }
    emit_status(status);
    return ok ? 0 : 4;
}

int cmd_solve(const RunConfig& cfg) {
    ProblemDef prob = problem_of(cfg);
    int side = cfg.sides.front();
    Grid grid = build_grid(prob.domain, std::vector<int>(prob.dim, side));
    SchemeParams sp = scheme_params(cfg);
    SolveConfig sc = solve_config(cfg);

    GridFunction u(grid);
    SolveReport rep;
    if (sc.method == SolveMethod::linear_direct)
        rep = solve_linear(prob, sp, u, sc);
    else if (!cfg.schedule.empty())
        rep = solve_continuation(prob, sp, cfg.schedule, u, sc);
    else if (sc.method == SolveMethod::pseudo_time)
        rep = solve_pseudo_time(prob, sp, u, sc);
    else
        rep = solve_newton(prob, sp, u, sc);

    std::ostringstream sol;
    dump_solution_csv(u, sol);
    std::string sol_path = artifact(cfg, "solution_" + cfg.problem + "_" + std::to_string(side) + ".csv");
    atomic_write(sol_path, sol.str());

    json report;
    report["command"] = "solve";
    report["problem"] = cfg.problem;
    report["side"] = side;
    report["config"] = json::parse(serialize(cfg));
    report["solve"] = json::parse(to_json(rep));
    if (prob.has_exact()) report["error_linf"] = linf_error(u, prob.exact);
    std::string rep_path = artifact(cfg, "report.json");
    atomic_write(rep_path, report.dump(2) + "\n");

    json status;
    status["command"] = "solve";
    status["problem"] = cfg.problem;
    status["converged"] = rep.converged;
    status["residual_linf"] = rep.final_residual_linf;
    if (!rep.failure.empty()) status["failure"] = rep.failure;
    status["artifacts"] = {sol_path, rep_path};
    emit_status(status);
    return rep.converged ? 0 : 3;
}

int cmd_convergence(const RunConfig& cfg) {
    ProblemDef prob = problem_of(cfg);
    SchemeParams sp = scheme_params(cfg);

    ConvergenceRun run;
    run.sides = cfg.sides;
    run.basis = cfg.order_basis == "axis" ? OrderBasis::axis : OrderBasis::diag;
    run.solve = solve_config(cfg);
    if (run.solve.method != SolveMethod::linear_direct) run.schedule = cfg.schedule;

    ConvergenceTable table = run_convergence(prob, sp, run);

    std::string table_path = artifact(cfg, "table.csv");
    atomic_write(table_path, to_csv(table));

    bool all_solved = true;
    json rows = json::array();
    for (const auto& r : table.rows) {
        rows.push_back(row_json(r));
        all_solved = all_solved && r.solved;
    }
    json report;
    report["command"] = "convergence";
    report["problem"] = cfg.problem;
    report["params"] = json::parse(table.params);
    report["config"] = json::parse(serialize(cfg));
    report["rows"] = rows;
    report["all_solved"] = all_solved;
    std::string rep_path = artifact(cfg, "report.json");
    atomic_write(rep_path, report.dump(2) + "\n");

    json status;
    status["command"] = "convergence";
    status["problem"] = cfg.problem;
    status["rows"] = table.rows.size();
    status["all_solved"] = all_solved;
    if (!table.rows.empty() && table.rows.back().order) status["final_order"] = *table.rows.back().order;
    status["artifacts"] = {table_path, rep_path};
    emit_status(status);
    return all_solved ? 0 : 3;
}

int cmd_dump_grid(const RunConfig& cfg) {
    ProblemDef prob = problem_of(cfg);
    int side = cfg.sides.front();
    Grid grid = build_grid(prob.domain, std::vector<int>(prob.dim, side));
    std::ostringstream os;
    dump_grid_csv(grid, os);
    std::string path = artifact(cfg, "grid_" + std::to_string(side) + ".csv");
    atomic_write(path, os.str());

    json status;
    status["command"] = "dump-grid";
    status["problem"] = cfg.problem;
    status["side"] = side;
    status["nodes"] = grid.n_total;
    status["artifacts"] = {path};
    emit_status(status);
    return 0;
}

} // namespace

void atomic_write(const std::string& path, const std::string& content) {
    fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        f << content;
        f.flush();
        if (!f) throw std::runtime_error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, p);
}

int run_app(const RunConfig& cfg) {
    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        json status;
        status["error"] = e.what();
        status["exit"] = 2;
        emit_status(status);
        return 2;
    }
    int fail_code = cfg.command == "verify" ? 4 : 3;
    try {
        if (cfg.command == "verify") return cmd_verify(cfg);
        if (cfg.command == "solve") return cmd_solve(cfg);
        if (cfg.command == "convergence") return cmd_convergence(cfg);
        return cmd_dump_grid(cfg);
    } catch (const std::exception& e) {
        json status;
        status["command"] = cfg.command;
        status["error"] = e.what();
        status["exit"] = fail_code;
        emit_status(status);
        return fail_code;
    }
}

} // namespace nsfd
