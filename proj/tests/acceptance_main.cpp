// Acceptance gate: end-to-end reproduction targets, one verdict line per
// criterion. Exit code is the number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include <nsfd/convergence.hpp>
#include <nsfd/fd_ops.hpp>
#include <nsfd/problems.hpp>
#include <nsfd/rng.hpp>
#include <nsfd/scheme.hpp>
#include <nsfd/solver.hpp>
#include <nsfd/verify.hpp>

using namespace nsfd;

namespace {

int g_failed = 0;

std::string str(const char* fmt, ...) {
    char buf[768];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

struct Criterion {
    int id;
    std::string title;
    bool pass = true;
    std::vector<std::string> notes;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    Criterion(int id_, std::string title_) : id(id_), title(std::move(title_)) {}

    void check(bool ok, const std::string& what) {
        pass = pass && ok;
        notes.push_back(std::string(ok ? "ok  " : "BAD ") + what);
    }
    void info(const std::string& what) { notes.push_back("    " + what); }
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
    void finish() {
        for (const auto& n : notes) std::printf("        %s\n", n.c_str());
        std::printf("[%s] criterion %d: %s (%.1f s)\n", pass ? "PASS" : "FAIL", id, title.c_str(), seconds());
        std::fflush(stdout);
        if (!pass) ++g_failed;
    }
};

bool within_factor(double measured, double ref, double f) {
    return measured > 0 && measured <= f * ref && ref <= f * measured;
}

double order_at(const ConvergenceTable& t, std::size_t k) {
    if (k >= t.rows.size() || !t.rows[k].order) return std::numeric_limits<double>::quiet_NaN();
    return *t.rows[k].order;
}

bool in_window(double v, double lo, double hi) { return v >= lo && v <= hi; }

bool all_solved(const ConvergenceTable& t) {
    return std::all_of(t.rows.begin(), t.rows.end(), [](const ConvergenceRow& r) { return r.solved; });
}

std::string error_list(const ConvergenceTable& t) {
    std::string s = "{";
    for (std::size_t k = 0; k < t.rows.size(); ++k)
        s += str("%s%.3e", k ? ", " : "", t.rows[k].error_linf);
    return s + "}";
}

bool errors_within(const ConvergenceTable& t, const std::vector<double>& refs, double f) {
    if (t.rows.size() != refs.size() || !all_solved(t)) return false;
    for (std::size_t k = 0; k < refs.size(); ++k)
        if (!within_factor(t.rows[k].error_linf, refs[k], f)) return false;
    return true;
}

int pick_threads() {
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(std::min(hw, 8u)) : 1;
}

ConvergenceTable run_linear(const std::string& name, const std::vector<int>& sides) {
    ProblemDef prob = make_problem(name);
    ConvergenceRun run;
    run.sides = sides;
    run.basis = OrderBasis::axis;
    run.solve.method = SolveMethod::linear_direct;
    SchemeParams sp;
    return run_convergence(prob, sp, run);
}

void criterion_1() {
    Criterion c(1, "smooth linear problem, unstabilized scheme, second order");
    ConvergenceTable t4 = run_linear("linear1", {12, 42, 82, 122});
    double sec4 = c.seconds();
    const std::vector<double> refs{5.77e-02, 3.86e-03, 9.79e-04, 4.40e-04};
    c.info("errors " + error_list(t4) + " vs references {5.770e-02, 3.860e-03, 9.790e-04, 4.400e-04}");
    c.check(errors_within(t4, refs, 2.0), "every error within a factor 2 of its reference");
    double o2 = order_at(t4, 2), o3 = order_at(t4, 3);
    c.check(in_window(o2, 1.85, 2.15) && in_window(o3, 1.85, 2.15),
            str("last-two orders %.3f, %.3f in [1.85, 2.15]", o2, o3));
    c.check(sec4 <= 30.0, str("four-mesh run %.1f s <= 30 s, single-threaded", sec4));
    ConvergenceTable t3 = run_linear("linear1", {182, 242, 302});
    c.info("fine-mesh errors " + error_list(t3) + " at sides {182, 242, 302}");
    c.check(all_solved(t3) && c.seconds() <= 600.0,
            str("full sequence to side 302 solved in %.1f s <= 600 s", c.seconds()));
    c.finish();
}

void criterion_2() {
    Criterion c(2, "low-regularity linear problem, reduced order");
    ConvergenceTable t = run_linear("linear2", {12, 42, 82, 122, 182, 242, 302});
    c.info("errors " + error_list(t));
    double o4 = order_at(t, 4), o5 = order_at(t, 5), o6 = order_at(t, 6);
    c.check(all_solved(t), "all meshes solved");
    c.check(in_window(o4, 1.25, 1.55) && in_window(o5, 1.25, 1.55) && in_window(o6, 1.25, 1.55),
            str("final-three orders %.3f, %.3f, %.3f in [1.25, 1.55]", o4, o5, o6));
    c.finish();
}

void criterion_3() {
    Criterion c(3, "bellman problem along the gamma ramp");
    ControlSet cs;
    cs.phi_count = 16;
    cs.rot_count = 256;
    ProblemDef prob = make_problem("hjb", cs);
    ConvergenceRun run;
    run.sides = {10, 16, 24, 32};
    run.basis = OrderBasis::diag;
    run.schedule = {{1000, 0}, {100, 0}, {10, 0}, {1, 0}, {0, 0}};
    run.solve.threads = pick_threads();
    SchemeParams sp;
    std::vector<ConvergenceTable> tables = run_convergence_stages(prob, sp, run);
    const ConvergenceTable& g1000 = tables[0];
    const ConvergenceTable& g10 = tables[2];
    const ConvergenceTable& g0 = tables[4];
    c.info("control sample 16 x 256 (required >= 16 x 32)");
    c.info("gamma=1000 errors " + error_list(g1000));
    c.info("gamma=10   errors " + error_list(g10));
    c.info("gamma=0    errors " + error_list(g0));
    bool solved = true;
    for (const auto& t : tables) solved = solved && all_solved(t);
    c.check(solved, "every stage solved on every mesh");
    double o0 = order_at(g0, 3);
    c.check(in_window(o0, 1.6, 2.0), str("gamma=0 final-pair order %.4f in [1.6, 2.0]", o0));
    double o10 = order_at(g10, 3);
    c.check(in_window(o10, 1.8, 2.3), str("gamma=10 final-pair order %.4f in [1.8, 2.3]", o10));
    bool ordering = true;
    for (std::size_t k = 0; k < 4; ++k)
        ordering = ordering && g1000.rows[k].error_linf > g0.rows[k].error_linf;
    c.check(ordering, "gamma=1000 errors exceed gamma=0 errors at every mesh");
    bool near = errors_within(g1000, {1.30, 1.27, 1.22, 1.15}, 3.0) &&
                errors_within(g10, {6.08e-01, 3.34e-01, 1.73e-01, 1.01e-01}, 3.0) &&
                errors_within(g0, {2.35e-02, 1.03e-02, 4.96e-03, 2.92e-03}, 3.0);
    c.check(near, "errors within a factor 3 of the references");
    c.check(c.seconds() <= 300.0, str("runtime %.1f s <= 300 s", c.seconds()));
    c.finish();
}

void criterion_4() {
    Criterion c(4, "determinant problem, moment families");
    ProblemDef prob = make_problem("monge_ampere");
    ConvergenceRun run;
    run.sides = {6, 12, 24, 48};
    run.basis = OrderBasis::diag;
    run.solve.threads = pick_threads();

    run.schedule = default_schedule(prob, 0, 0);
    SchemeParams sp;
    ConvergenceTable t0 = run_convergence(prob, sp, run);
    c.info("(0,0) errors " + error_list(t0) + " vs references {1.570e-02, 3.410e-03, 7.870e-04, 1.880e-04}");
    c.check(errors_within(t0, {1.57e-02, 3.41e-03, 7.87e-04, 1.88e-04}, 2.0),
            "(0,0) errors within a factor 2");
    double o2 = order_at(t0, 2), o3 = order_at(t0, 3);
    c.check(in_window(o2, 1.9, 2.1) && in_window(o3, 1.9, 2.1),
            str("(0,0) last-two orders %.3f, %.3f in [1.9, 2.1]", o2, o3));

    run.schedule = default_schedule(prob, -1, 1);
    ConvergenceTable t1 = run_convergence(prob, sp, run);
    c.info("sigma=1 errors " + error_list(t1) + " vs references {1.470e-02, 3.050e-03, 7.000e-04, 1.670e-04}");
    c.check(errors_within(t1, {1.47e-02, 3.05e-03, 7.00e-04, 1.67e-04}, 2.0),
            "sigma=1 errors within a factor 2");
    double o1 = order_at(t1, 3);
    c.check(in_window(o1, 1.9, 2.1), str("sigma=1 final order %.3f in [1.9, 2.1]", o1));
    c.check(c.seconds() <= 180.0, str("runtime %.1f s <= 180 s", c.seconds()));
    c.finish();
}

void criterion_5() {
    Criterion c(5, "curvature problem, unstabilized targets");
    ProblemDef prob = make_problem("gauss_curvature");
    ConvergenceRun run;
    run.sides = {6, 12, 24, 48};
    run.basis = OrderBasis::diag;
    run.solve.threads = pick_threads();
    run.schedule = default_schedule(prob, 0, 0);
    SchemeParams sp;
    ConvergenceTable t = run_convergence(prob, sp, run);
    c.info("errors " + error_list(t) + " vs references {2.190e-02, 3.890e-03, 8.200e-04, 1.900e-04}");
    c.check(errors_within(t, {2.19e-02, 3.89e-03, 8.20e-04, 1.90e-04}, 2.0),
            "errors within a factor 2 of the references");
    double o = order_at(t, 3);
    c.check(in_window(o, 1.9, 2.2), str("final-pair order %.3f in [1.9, 2.2]", o));
    c.finish();
}

void criterion_6() {
    Criterion c(6, "determinant cold start fails, continuation recovers");
    ProblemDef prob = make_problem("monge_ampere");
    Grid g = build_grid(prob.domain, {24, 24});
    SchemeParams sp;
    SolveConfig sc;
    GridFunction cold(g);
    SolveReport rep = solve_newton(prob, sp, cold, sc);
    c.check(!rep.converged, str("zero-guess solve at (0,0) reports converged=false (%s)",
                                rep.failure.empty() ? "no failure text" : rep.failure.c_str()));
    GridFunction u(g);
    SolveReport rep2 = solve_continuation(prob, sp, default_schedule(prob, 0, 0), u, sc);
    double err = rep2.converged ? linf_error(u, prob.exact) : std::numeric_limits<double>::quiet_NaN();
    c.check(rep2.converged, str("continuation from sigma=1000 converges, error %.3e", err));
    c.finish();
}

void criterion_7() {
    Criterion c(7, "operator lemma battery");
    std::vector<CheckResult> checks = run_verification(42);
    int bad = 0;
    for (const auto& r : checks)
        if (!r.pass) ++bad;
    c.check(bad == 0, str("%zu property checks pass on interior sides {2..8}", checks.size()));
    if (bad) {
        for (const auto& r : checks)
            if (!r.pass) c.info("failed: " + r.name + " " + r.detail);
    }
    c.check(c.seconds() <= 60.0, str("runtime %.1f s <= 60 s", c.seconds()));
    c.finish();
}

void criterion_8() {
    Criterion c(8, "structural audits and negative controls");
    SchemeParams sp;
    sp.sigma = 1;
    const std::vector<std::string> names{"linear1", "hjb", "monge_ampere", "gauss_curvature"};
    double worst_cons = 0, worst_red = 0;
    bool cons_ok = true, red_ok = true;
    for (const auto& name : names) {
        ProblemDef prob = make_problem(name);
        Grid g = build_grid(prob.domain, {14, 14});
        AuditReport cons = audit_consistency(g, prob, sp, 1000, 7);
        cons_ok = cons_ok && cons.pass && cons.worst <= 1e-10;
        worst_cons = std::max(worst_cons, cons.worst);
        GridFunction u = GridFunction::sample(g, prob.exact, true);
        impose_boundary(u, prob);
        AuditReport red = audit_reduced_form(g, prob, sp, u, 40, 11);
        red_ok = red_ok && red.pass && red.worst <= 1e-12;
        worst_red = std::max(worst_red, red.worst);
    }
    c.check(cons_ok, str("consistency on 1000 quadratics per problem, worst %.2e <= 1e-10", worst_cons));
    c.check(red_ok, str("reduced-form invariance, worst %.2e <= 1e-12", worst_red));

    bool mono_ok = true;
    for (const auto& name : {"monge_ampere", "gauss_curvature"}) {
        ProblemDef prob = make_problem(name);
        Grid g = build_grid(prob.domain, {24, 24});
        SchemeParams target;
        target.gamma = -1;
        target.sigma = 1;
        GridFunction u(g);
        SolveReport rep = solve_continuation(prob, target, default_schedule(prob, -1, 1), u, {});
        AuditReport mono = audit_gmonotonicity(g, prob, target, u, 80, 13);
        mono_ok = mono_ok && rep.converged && mono.pass;
        c.info(str("%s converged iterate at sigma=1: slot margin %.2e (%s)", name, mono.worst,
                   mono.pass ? "monotone" : mono.detail.c_str()));
    }
    c.check(mono_ok, "g-monotonicity holds at the sigma=1 converged iterates");

    ProblemDef ma = make_problem("monge_ampere");
    Grid g14 = build_grid(ma.domain, {14, 14});
    SlotEvaluator base = make_slot_evaluator(ma, sp);
    SlotEvaluator corrupted = [base](const Eigen::MatrixXd& pmm, const Eigen::MatrixXd& pmp,
                                     const Eigen::MatrixXd& ppm, const Eigen::MatrixXd& ppp,
                                     const Eigen::VectorXd& q, double v, const Eigen::VectorXd& x) {
        return base(pmm, pmp, ppm, ppp, q, v, x) + 0.01 * ppp(0, 0);
    };
    AuditReport bad = audit_consistency(g14, ma, sp, 200, 7, &corrupted);
    c.check(!bad.pass, str("negative control: corrupted operator detected, deviation %.2e", bad.worst));

    GridFunction flip = GridFunction::sample(g14, [&](const Eigen::VectorXd& x) { return -ma.exact(x); }, true);
    impose_boundary(flip, ma);
    AuditReport ec = audit_elliptic_compat(g14, ma, sp, flip, 60, 17);
    c.check(!ec.pass && ec.worst < 0,
            str("negative control: concave state detected, compatibility margin %.2f", ec.worst));

    std::vector<CheckResult> con = verify_contraction({3.0}, 42);
    bool rho_flagged = con.size() == 1 && con[0].pass && con[0].worst > 1;
    c.check(rho_flagged, str("negative control: oversized pseudo-time step flagged, ratio %.2f",
                             con.empty() ? 0.0 : con[0].worst));
    c.finish();
}

void criterion_9() {
    Criterion c(9, "difference operators are polynomial exact");
    Domain dom;
    dom.lo = Eigen::Vector2d(0, 0);
    dom.hi = Eigen::Vector2d(1, 1);
    Grid g = build_grid(dom, {10, 10});
    Rng rng(2026);
    double worst = 0;
    long samples = 0;
    for (int trial = 0; trial < 25; ++trial) {
        Eigen::Matrix2d q;
        double qd = rng.uniform(-2, 2);
        q << rng.uniform(-2, 2), qd, qd, rng.uniform(-2, 2);
        Eigen::Vector2d b(rng.uniform(-2, 2), rng.uniform(-2, 2));
        double c0 = rng.uniform(-2, 2);
        auto quad = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(q * x) + b.dot(x) + c0; };
        Eigen::Vector2d slope(rng.uniform(-2, 2), rng.uniform(-2, 2));
        auto affine = [&](const Eigen::VectorXd& x) { return slope.dot(x) + c0; };
        Eigen::Matrix2d w;
        double wd = rng.uniform(-1, 1);
        w << rng.uniform(-1, 1), wd, wd, rng.uniform(-1, 1);

        GridFunction uq = GridFunction::sample(g, quad, true);
        GridFunction ua = GridFunction::sample(g, affine, true);
        for (int node : g.interior_ids) {
            Eigen::VectorXd x = g.point(node);
            for (int axis = 0; axis < 2; ++axis)
                for (Diff1Mode mode : {Diff1Mode::forward, Diff1Mode::backward, Diff1Mode::central})
                    worst = std::max(worst, std::abs(diff1(ua, node, axis, mode) - slope[axis]));
            worst = std::max(worst, (grad_central(uq, node) - (q * x + b)).cwiseAbs().maxCoeff());
            HessianBundle hb = hessian_bundle(uq, node);
            for (const Eigen::MatrixXd* m : {&hb.dpp, &hb.dpm, &hb.dmp, &hb.dmm, &hb.dhat, &hb.dtilde, &hb.dbar})
                worst = std::max(worst, (*m - q).cwiseAbs().maxCoeff());
            worst = std::max(worst, std::abs(moment(hb, w)));
            auto [lap_h, lap_2h] = discrete_laplacians(uq, node);
            worst = std::max(worst, std::abs(lap_h - q.trace()));
            worst = std::max(worst, std::abs(lap_2h - q.trace()));
            ++samples;
        }
    }
    c.check(worst <= 1e-11,
            str("max deviation %.2e <= 1e-11 over %ld interior-node evaluations", worst, samples));
    c.finish();
}

} // namespace

int main() {
    std::printf("acceptance run: 9 criteria\n");
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("acceptance: %d/9 criteria passed\n", 9 - g_failed);
    return g_failed;
}
