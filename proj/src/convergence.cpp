#include "nsfd/convergence.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nsfd {

double linf_error(const GridFunction& u, const ScalarField& exact) {
    const Grid& g = *u.grid;
    double worst = 0;
    for (std::int32_t id : g.interior_ids) worst = std::max(worst, std::abs(u[id] - exact(g.point(id))));
    for (std::int32_t id : g.boundary_ids) worst = std::max(worst, std::abs(u[id] - exact(g.point(id))));
    return worst;
}

namespace {

std::string params_json(const ProblemDef& prob, const SchemeParams& sp,
                        const std::vector<ContinuationStage>& schedule) {
    nlohmann::json j;
    j["gamma"] = sp.gamma;
    j["sigma"] = sp.sigma;
    j["moment"] = sp.mode == SchemeParams::MomentMode::auto_weight ? "auto" : "fixed";
    if (prob.controls) {
        j["phi_count"] = prob.controls->set.phi_count;
        j["rot_count"] = prob.controls->set.rot_count;
    }
    auto sched = nlohmann::json::array();
    for (const auto& s : schedule) sched.push_back({s.gamma, s.sigma});
    j["schedule"] = sched;
    return j.dump();
}

std::vector<int> square_counts(int side, int dim) {
    if (side < 3) throw std::invalid_argument("convergence: side must be >= 3");
    return std::vector<int>(static_cast<std::size_t>(dim), side);
}

ConvergenceRow make_row(const Grid& g) {
    ConvergenceRow row;
    row.h_axis = g.h.maxCoeff();
    row.h_diag = g.h.norm();
    return row;
}

} // namespace

void compute_orders(ConvergenceTable& t) {
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        auto& row = t.rows[k];
        row.order.reset();
        if (k == 0 || !row.solved) continue;
        const auto& prev = t.rows[k - 1];
        if (!prev.solved) continue;
        double hk = t.basis == OrderBasis::axis ? row.h_axis : row.h_diag;
        double hp = t.basis == OrderBasis::axis ? prev.h_axis : prev.h_diag;
        if (!(hp > hk) || !(row.error_linf > 0) || !(prev.error_linf > 0)) {
            if (row.note.empty()) row.note = "order undefined";
            continue;
        }
        row.order = std::log(prev.error_linf / row.error_linf) / std::log(hp / hk);
    }
}

ConvergenceTable run_convergence(const ProblemDef& prob, const SchemeParams& params,
                                 const ConvergenceRun& run) {
    if (run.sides.empty()) throw std::invalid_argument("convergence: no meshes given");
    ConvergenceTable t;
    t.problem = prob.name;
    t.params = params_json(prob, params, run.schedule);
    t.basis = run.basis;
    for (int side : run.sides) {
        Grid g = build_grid(prob.domain, square_counts(side, prob.dim));
        GridFunction u(g);
        ConvergenceRow row = make_row(g);
        try {
            SolveReport rep;
            if (!run.schedule.empty())
                rep = solve_continuation(prob, params, run.schedule, u, run.solve);
            else if (run.solve.method == SolveMethod::linear_direct && prob.affine)
                rep = solve_linear(prob, params, u, run.solve);
            else if (run.solve.method == SolveMethod::pseudo_time)
                rep = solve_pseudo_time(prob, params, u, run.solve);
            else
                rep = solve_newton(prob, params, u, run.solve);
            row.solved = rep.converged;
            if (!rep.converged) row.note = rep.failure;
        } catch (const std::exception& e) {
            row.solved = false;
            row.note = e.what();
        }
        if (prob.has_exact()) row.error_linf = linf_error(u, prob.exact);
        t.rows.push_back(row);
    }
    compute_orders(t);
    return t;
}

std::vector<ConvergenceTable> run_convergence_stages(const ProblemDef& prob, const SchemeParams& params,
                                                     const ConvergenceRun& run) {
    if (run.sides.empty()) throw std::invalid_argument("convergence: no meshes given");
    if (run.schedule.empty()) throw std::invalid_argument("convergence: stage run needs a schedule");
    const std::size_t ns = run.schedule.size();
    std::vector<ConvergenceTable> tables(ns);
    for (std::size_t s = 0; s < ns; ++s) {
        tables[s].problem = prob.name;
        tables[s].params = params_json(
            prob, params, std::vector<ContinuationStage>(run.schedule.begin(), run.schedule.begin() + s + 1));
        tables[s].basis = run.basis;
    }
    for (int side : run.sides) {
        Grid g = build_grid(prob.domain, square_counts(side, prob.dim));
        GridFunction u(g);
        bool alive = true;
        std::string why;
        for (std::size_t s = 0; s < ns; ++s) {
            ConvergenceRow row = make_row(g);
            if (alive) {
                SchemeParams sp = params;
                sp.gamma = run.schedule[s].gamma;
                sp.sigma = run.schedule[s].sigma;
                try {
                    SolveReport rep = solve_newton(prob, sp, u, run.solve);
                    if (!rep.converged) {
                        alive = false;
                        why = rep.failure;
                    }
                } catch (const std::exception& e) {
                    alive = false;
                    why = e.what();
                }
            }
            row.solved = alive;
            if (!alive) row.note = why.empty() ? "stage skipped" : why;
            if (prob.has_exact()) row.error_linf = linf_error(u, prob.exact);
            tables[s].rows.push_back(row);
        }
    }
    for (auto& t : tables) compute_orders(t);
    return tables;
}

std::string to_csv(const ConvergenceTable& t) {
    std::ostringstream os;
    os << "h_axis,h_diag,error_linf,order\r\n";
    char buf[64];
    for (const auto& row : t.rows) {
        std::snprintf(buf, sizeof buf, "%.9e", row.h_axis);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.9e", row.h_diag);
        os << buf << ',';
        std::snprintf(buf, sizeof buf, "%.9e", row.error_linf);
        os << buf << ',';
        if (row.order) {
            std::snprintf(buf, sizeof buf, "%.9e", *row.order);
            os << buf;
        }
        os << "\r\n";
    }
    return os.str();
}

void write_csv(const ConvergenceTable& t, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("convergence: cannot open " + path);
    f << to_csv(t);
}

} // namespace nsfd
