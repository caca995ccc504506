#include "nsfd/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "nsfd/problems.hpp"
#include "nsfd/rng.hpp"

namespace nsfd {

namespace {

/// values of the averaged operators at one node
struct NodeOps {
    Eigen::MatrixXd pbar; ///< averaged Hessian
    Eigen::MatrixXd tmh;  ///< dtilde - dhat
    Eigen::VectorXd q;    ///< central gradient
    double v = 0;
};

NodeOps gather_ops(const GridFunction& u, int node) {
    const Grid& g = *u.grid;
    const int d = g.dim;
    NodeOps ops;
    ops.pbar.setZero(d, d);
    ops.tmh.setZero(d, d);
    ops.q.resize(d);
    ops.v = u[node];
    for (int i = 0; i < d; ++i) {
        double h = g.h[i], h2 = h * h;
        double up = u[g.neighbor(node, i, +1)], um = u[g.neighbor(node, i, -1)];
        double up2 = u[g.neighbor(node, i, +2)], um2 = u[g.neighbor(node, i, -2)];
        double narrow = (up - 2 * ops.v + um) / h2;
        double wide = (up2 - 2 * ops.v + um2) / (4 * h2);
        ops.pbar(i, i) = wide;
        ops.tmh(i, i) = 2 * (wide - narrow);
        ops.q[i] = (up - um) / (2 * h);
        for (int j = i + 1; j < d; ++j) {
            double hh = g.h[i] * g.h[j];
            int pj = g.neighbor(node, j, +1), mj = g.neighbor(node, j, -1);
            double upj = u[pj], umj = u[mj];
            double upi = u[g.neighbor(node, i, +1)], umi = u[g.neighbor(node, i, -1)];
            double upp = u[g.neighbor(pj, i, +1)], ump = u[g.neighbor(pj, i, -1)];
            double upm = u[g.neighbor(mj, i, +1)], umm = u[g.neighbor(mj, i, -1)];
            double bar = (upp - ump - upm + umm) / (4 * hh);
            double tmh = (0.5 * (upp + umm + upm + ump) - upi - umi - upj - umj + 2 * ops.v) / hh;
            ops.pbar(i, j) = ops.pbar(j, i) = bar;
            ops.tmh(i, j) = ops.tmh(j, i) = tmh;
        }
    }
    return ops;
}

/// min over controls of the per-control upwinded objective
/// -A : pbar + M : tmh - cost
double bellman_min(const ControlFamily& fam, const NodeOps& ops, int* argmin_out) {
    double p11 = ops.pbar(0, 0), p22 = ops.pbar(1, 1), p12 = ops.pbar(0, 1);
    double t11 = ops.tmh(0, 0), t22 = ops.tmh(1, 1), t12 = ops.tmh(0, 1);
    int best = 0;
    double bestv = std::numeric_limits<double>::infinity();
    const Control* cs = fam.controls.data();
    const int n = static_cast<int>(fam.controls.size());
    for (int k = 0; k < n; ++k) {
        const Control& c = cs[k];
        double val = -(c.a11 * p11 + 2 * c.a12 * p12 + c.a22 * p22) + c.m11 * t11 + 2 * c.m12 * t12 +
                     c.m22 * t22 - c.cost;
        if (val < bestv) {
            bestv = val;
            best = k;
        }
    }
    if (argmin_out) *argmin_out = best;
    return bestv;
}

double gamma_sigma_part(const SchemeParams& sp, const Eigen::MatrixXd& tmh) {
    const int d = static_cast<int>(tmh.rows());
    double gs = 0;
    for (int i = 0; i < d; ++i) {
        gs += (sp.gamma + sp.sigma) * tmh(i, i);
        for (int j = i + 1; j < d; ++j) gs += 2 * sp.sigma * tmh(i, j);
    }
    return gs;
}

Eigen::MatrixXd moment_weight(const ProblemDef& prob, const SchemeParams& sp, const NodeOps& ops,
                              const Eigen::VectorXd& x) {
    if (sp.mode == SchemeParams::MomentMode::auto_weight)
        return 0.5 * prob.dF_dP(ops.pbar, ops.q, ops.v, x).cwiseAbs();
    return sp.fixed_weight;
}

template <class Fn>
void run_partitioned(int n, int threads, const Fn& work) {
    threads = std::max(1, std::min(threads, n));
    if (threads <= 1) {
        work(0, 0, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    int chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        int lo = t * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(work, t, lo, hi);
    }
    for (auto& th : pool) th.join();
}

} // namespace

void validate(const SchemeParams& sp, int dim) {
    if (!sp.allow_unsafe) {
        if (sp.sigma < 0) throw std::invalid_argument("scheme: sigma >= 0 required");
        if (sp.gamma + sp.sigma < 0) throw std::invalid_argument("scheme: gamma + sigma >= 0 required");
    }
    if (sp.mode == SchemeParams::MomentMode::fixed) {
        if (sp.fixed_weight.rows() != dim || sp.fixed_weight.cols() != dim)
            throw std::invalid_argument("scheme: fixed weight must be d x d");
        double scale = 1 + sp.fixed_weight.cwiseAbs().maxCoeff();
        if ((sp.fixed_weight - sp.fixed_weight.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw std::invalid_argument("scheme: fixed weight must be symmetric");
    }
}

void impose_boundary(GridFunction& u, const ProblemDef& prob) {
    const Grid& g = *u.grid;
    for (std::int32_t b : g.boundary_ids) u[b] = prob.g(g.point(b));
    fill_ghosts(u);
}

double eval_Fhat(const GridFunction& u, const ProblemDef& prob, const SchemeParams& sp, int node,
                 int* argmin_out) {
    const Grid& g = *u.grid;
    NodeOps ops = gather_ops(u, node);
    Eigen::VectorXd x = g.point(node);
    double gs = gamma_sigma_part(sp, ops.tmh);
    if (prob.controls && sp.mode == SchemeParams::MomentMode::auto_weight) {
        int arg = -1;
        double m = bellman_min(*prob.controls, ops, &arg);
        if (argmin_out) *argmin_out = arg;
        return m + prob.controls->zeroth * ops.v - prob.controls->data(x) + gs;
    }
    if (argmin_out) *argmin_out = -1;
    double f = prob.F(ops.pbar, ops.q, ops.v, x);
    Eigen::MatrixXd w = moment_weight(prob, sp, ops, x);
    return f + (w.array() * ops.tmh.array()).sum() + gs;
}

Eigen::VectorXd assemble_residual(const ProblemDef& prob, const SchemeParams& sp, const GridFunction& u,
                                  int threads) {
    validate(sp, prob.dim);
    const Grid& g = *u.grid;
    const int n = static_cast<int>(g.interior_ids.size());
    Eigen::VectorXd r(n);
    run_partitioned(n, threads, [&](int, int lo, int hi) {
        for (int k = lo; k < hi; ++k) r[k] = eval_Fhat(u, prob, sp, g.interior_ids[k]);
    });
    return r;
}

SparseOperator assemble_jacobian(const ProblemDef& prob, const SchemeParams& sp, const GridFunction& u,
                                 int threads) {
    validate(sp, prob.dim);
    const Grid& g = *u.grid;
    const int d = g.dim;
    const int n = static_cast<int>(g.interior_ids.size());
    const int row_cap = 4 * d + 2 * d * (d - 1) + 1;

    int nchunks = std::max(1, std::min(threads, n));
    std::vector<std::vector<Eigen::Triplet<double>>> bufs(static_cast<std::size_t>(nchunks));

    auto build_rows = [&](int chunk, int lo, int hi) {
        auto& out = bufs[chunk];
        std::vector<std::pair<int, double>> acc;
        acc.reserve(row_cap);
        for (int r = lo; r < hi; ++r) {
            int node = g.interior_ids[r];
            NodeOps ops = gather_ops(u, node);
            Eigen::VectorXd x = g.point(node);

            Eigen::MatrixXd cm, wm;
            Eigen::VectorXd dq;
            double dv;
            if (prob.controls && sp.mode == SchemeParams::MomentMode::auto_weight) {
                int arg = -1;
                bellman_min(*prob.controls, ops, &arg);
                const Control& c = prob.controls->controls[arg];
                cm.resize(2, 2);
                cm << -c.a11, -c.a12, -c.a12, -c.a22;
                wm.resize(2, 2);
                wm << c.m11, c.m12, c.m12, c.m22;
                dq = Eigen::VectorXd::Zero(2);
                dv = prob.controls->zeroth;
            } else {
                cm = prob.dF_dP(ops.pbar, ops.q, ops.v, x);
                wm = sp.mode == SchemeParams::MomentMode::auto_weight ? Eigen::MatrixXd(0.5 * cm.cwiseAbs())
                                                                      : sp.fixed_weight;
                dq = prob.dF_dq(ops.pbar, ops.q, ops.v, x);
                dv = prob.dF_dv(ops.pbar, ops.q, ops.v, x);
            }
            wm.diagonal().array() += sp.gamma + sp.sigma;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    if (i != j) wm(i, j) += sp.sigma;

            acc.clear();
            // Dirichlet columns drop; a ghost only shows up on the node's own
            // +-2 arms, so the auxiliary elimination folds -coeff onto the
            // center.
            auto add = [&](int id, double c) {
                NodeClass cl = g.node_class[id];
                if (cl == NodeClass::boundary || cl == NodeClass::sh) return;
                if (cl == NodeClass::ghost) {
                    id = node;
                    c = -c;
                }
                for (auto& e : acc) {
                    if (e.first == id) {
                        e.second += c;
                        return;
                    }
                }
                acc.emplace_back(id, c);
            };

            for (int i = 0; i < d; ++i) {
                double h = g.h[i], h2 = h * h;
                int p1 = g.neighbor(node, i, +1), m1 = g.neighbor(node, i, -1);
                int p2 = g.neighbor(node, i, +2), m2 = g.neighbor(node, i, -2);
                double cc = cm(i, i), ww = wm(i, i);
                add(p2, cc / (4 * h2) + ww / (2 * h2));
                add(m2, cc / (4 * h2) + ww / (2 * h2));
                add(node, -cc / (2 * h2) + 3 * ww / h2);
                add(p1, -2 * ww / h2 + dq[i] / (2 * h));
                add(m1, -2 * ww / h2 - dq[i] / (2 * h));
                for (int j = i + 1; j < d; ++j) {
                    double hh = g.h[i] * g.h[j];
                    double cc2 = cm(i, j) + cm(j, i), ww2 = wm(i, j) + wm(j, i);
                    int pj = g.neighbor(node, j, +1), mj = g.neighbor(node, j, -1);
                    add(g.neighbor(pj, i, +1), cc2 / (4 * hh) + ww2 / (2 * hh));
                    add(g.neighbor(mj, i, -1), cc2 / (4 * hh) + ww2 / (2 * hh));
                    add(g.neighbor(mj, i, +1), -cc2 / (4 * hh) + ww2 / (2 * hh));
                    add(g.neighbor(pj, i, -1), -cc2 / (4 * hh) + ww2 / (2 * hh));
                    add(g.neighbor(node, i, +1), -ww2 / hh);
                    add(g.neighbor(node, i, -1), -ww2 / hh);
                    add(pj, -ww2 / hh);
                    add(mj, -ww2 / hh);
                    add(node, 2 * ww2 / hh);
                }
            }
            add(node, dv);

            for (const auto& e : acc)
                out.emplace_back(r, g.interior_index[e.first], e.second);
        }
    };

    if (nchunks <= 1) {
        build_rows(0, 0, n);
    } else {
        std::vector<std::thread> pool;
        int chunk = (n + nchunks - 1) / nchunks;
        for (int t = 0; t < nchunks; ++t) {
            int lo = t * chunk, hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(build_rows, t, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    SparseOperator jac(n, n);
    for (const auto& buf : bufs)
        for (const auto& t : buf) jac.add(static_cast<int>(t.row()), static_cast<int>(t.col()), t.value());
    jac.finalize();
    return jac;
}

SlotEvaluator make_slot_evaluator(const ProblemDef& prob, const SchemeParams& sp) {
    validate(sp, prob.dim);
    return [prob, sp](const Eigen::MatrixXd& pmm, const Eigen::MatrixXd& pmp, const Eigen::MatrixXd& ppm,
                      const Eigen::MatrixXd& ppp, const Eigen::VectorXd& q, double v,
                      const Eigen::VectorXd& x) {
        Eigen::MatrixXd ptilde = 0.5 * (ppp + pmm);
        Eigen::MatrixXd phat = 0.5 * (ppm + pmp);
        NodeOps ops;
        ops.pbar = 0.5 * (ptilde + phat);
        ops.tmh = ptilde - phat;
        ops.q = q;
        ops.v = v;
        double gs = gamma_sigma_part(sp, ops.tmh);
        if (prob.controls && sp.mode == SchemeParams::MomentMode::auto_weight) {
            double m = bellman_min(*prob.controls, ops, nullptr);
            return m + prob.controls->zeroth * v - prob.controls->data(x) + gs;
        }
        double f = prob.F(ops.pbar, q, v, x);
        Eigen::MatrixXd w = moment_weight(prob, sp, ops, x);
        return f + (w.array() * ops.tmh.array()).sum() + gs;
    };
}

std::string to_text(const AuditReport& r) {
    std::ostringstream os;
    os << "audit " << r.name << ": " << (r.pass ? "pass" : "FAIL") << " (worst " << r.worst << ", tol "
       << r.tolerance << ", " << r.samples << " samples)";
    if (!r.detail.empty()) os << " " << r.detail;
    return os.str();
}

std::string to_json(const AuditReport& r) {
    nlohmann::json j;
    j["name"] = r.name;
    j["pass"] = r.pass;
    j["worst"] = r.worst;
    j["tolerance"] = r.tolerance;
    j["samples"] = r.samples;
    j["detail"] = r.detail;
    return j.dump();
}

namespace {

std::vector<int> sample_nodes(const std::vector<std::int32_t>& ids, int max_nodes, Rng& rng) {
    std::vector<int> out(ids.begin(), ids.end());
    if (max_nodes <= 0 || max_nodes >= static_cast<int>(out.size())) return out;
    for (int k = 0; k < max_nodes; ++k) {
        int j = k + rng.index(static_cast<int>(out.size()) - k);
        std::swap(out[k], out[j]);
    }
    out.resize(max_nodes);
    return out;
}

struct SlotState {
    Eigen::MatrixXd s[4]; ///< dmm, dmp, dpm, dpp
    Eigen::VectorXd q;
    double v;
    Eigen::VectorXd x;
};

SlotState slot_state(const GridFunction& u, int node) {
    HessianBundle b = hessian_bundle(u, node);
    SlotState st;
    st.s[0] = b.dmm;
    st.s[1] = b.dmp;
    st.s[2] = b.dpm;
    st.s[3] = b.dpp;
    st.q = grad_central(u, node);
    st.v = u[node];
    st.x = u.grid->point(node);
    return st;
}

double eval_state(const SlotEvaluator& ev, const SlotState& st) {
    return ev(st.s[0], st.s[1], st.s[2], st.s[3], st.q, st.v, st.x);
}

/// Slot evaluator with the auto weight held at the node's base state, the
/// lagged form the solver iterates. Differentiating through the weight would
/// charge the audits an O(h^2) weight-variation term that says nothing about
/// the monotone structure of the scheme. Bellman problems keep their
/// per-control constants and pass through.
SlotEvaluator lagged_evaluator(const ProblemDef& prob, const SchemeParams& sp, const SlotState& st) {
    if (sp.mode != SchemeParams::MomentMode::auto_weight || prob.controls) return make_slot_evaluator(prob, sp);
    NodeOps ops;
    Eigen::MatrixXd ptilde = 0.5 * (st.s[3] + st.s[0]);
    Eigen::MatrixXd phat = 0.5 * (st.s[2] + st.s[1]);
    ops.pbar = 0.5 * (ptilde + phat);
    ops.tmh = ptilde - phat;
    ops.q = st.q;
    ops.v = st.v;
    SchemeParams frozen = sp;
    frozen.mode = SchemeParams::MomentMode::fixed;
    frozen.fixed_weight = moment_weight(prob, sp, ops, st.x);
    return make_slot_evaluator(prob, frozen);
}

} // namespace

AuditReport audit_consistency(const Grid& g, const ProblemDef& prob, const SchemeParams& sp, int n_samples,
                              std::uint64_t seed, const SlotEvaluator* eval) {
    SlotEvaluator ev = eval ? *eval : make_slot_evaluator(prob, sp);
    Rng rng(seed);
    const int d = g.dim;
    AuditReport rep;
    rep.name = "consistency";
    rep.tolerance = 1e-10;
    for (int s = 0; s < n_samples; ++s) {
        Eigen::MatrixXd qm(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) qm(i, j) = qm(j, i) = rng.uniform(-2, 2);
        Eigen::VectorXd bv(d);
        for (int i = 0; i < d; ++i) bv[i] = rng.uniform(-2, 2);
        double c0 = rng.uniform(-2, 2);
        auto quad = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(qm * x) + bv.dot(x) + c0; };
        GridFunction uq = GridFunction::sample(g, quad, true);
        for (int t = 0; t < 3; ++t) {
            int node = g.interior_ids[rng.index(static_cast<int>(g.interior_ids.size()))];
            SlotState st = slot_state(uq, node);
            double fh = eval_state(ev, st);
            Eigen::VectorXd x = g.point(node);
            double f = prob.F(qm, Eigen::VectorXd(qm * x + bv), quad(x), x);
            rep.worst = std::max(rep.worst, std::abs(fh - f));
            ++rep.samples;
        }
    }
    rep.pass = rep.worst <= rep.tolerance;
    return rep;
}

AuditReport audit_gmonotonicity(const Grid& g, const ProblemDef& prob, const SchemeParams& sp,
                                const GridFunction& u, int max_nodes, std::uint64_t seed,
                                const SlotEvaluator* eval) {
    Rng rng(seed);
    const int d = g.dim;
    AuditReport rep;
    rep.name = "gmonotonicity";
    rep.tolerance = 1e-8;
    static const char* slot_names[] = {"d--", "d-+", "d+-", "d++"};
    auto note = [&](double violation, int node, const std::string& where) {
        if (violation > rep.worst) {
            rep.worst = violation;
            std::ostringstream os;
            os << "node " << node << " " << where;
            rep.detail = os.str();
        }
    };
    for (int node : sample_nodes(g.interior_ids, max_nodes, rng)) {
        SlotState st = slot_state(u, node);
        SlotEvaluator ev = eval ? *eval : lagged_evaluator(prob, sp, st);
        for (int s = 0; s < 4; ++s) {
            bool tilde = s == 0 || s == 3; // d--, d++ feed the tilde average
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    double step = 1e-6 * (1 + std::abs(st.s[s](i, j)));
                    SlotState pert = st;
                    pert.s[s](i, j) += step;
                    double fp = eval_state(ev, pert);
                    pert.s[s](i, j) -= 2 * step;
                    double fm = eval_state(ev, pert);
                    double deriv = (fp - fm) / (2 * step);
                    double violation = tilde ? -deriv : deriv;
                    std::ostringstream os;
                    os << slot_names[s] << "(" << i << "," << j << ")";
                    note(violation, node, os.str());
                    ++rep.samples;
                }
        }
        double step = 1e-6 * (1 + std::abs(st.v));
        SlotState pert = st;
        pert.v += step;
        double fp = eval_state(ev, pert);
        pert.v -= 2 * step;
        double fm = eval_state(ev, pert);
        note(-(fp - fm) / (2 * step), node, "v");
        ++rep.samples;
    }
    rep.worst = std::max(rep.worst, 0.0);
    rep.pass = rep.worst <= rep.tolerance;
    return rep;
}

AuditReport audit_reduced_form(const Grid& g, const ProblemDef& prob, const SchemeParams& sp,
                               const GridFunction& u, int max_nodes, std::uint64_t seed,
                               const SlotEvaluator* eval) {
    SlotEvaluator ev = eval ? *eval : make_slot_evaluator(prob, sp);
    Rng rng(seed);
    const int d = g.dim;
    AuditReport rep;
    rep.name = "reduced_form";
    rep.tolerance = 1e-12;
    for (int node : sample_nodes(g.interior_ids, max_nodes, rng)) {
        SlotState st = slot_state(u, node);
        double base = eval_state(ev, st);
        for (int t = 0; t < 3; ++t) {
            Eigen::MatrixXd e(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) e(i, j) = rng.uniform(-1, 1);
            SlotState pert = st; // tilde pair: dpp + E, dmm - E
            pert.s[3] += e;
            pert.s[0] -= e;
            rep.worst = std::max(rep.worst, std::abs(eval_state(ev, pert) - base));
            pert = st; // hat pair: dpm + E, dmp - E
            pert.s[2] += e;
            pert.s[1] -= e;
            rep.worst = std::max(rep.worst, std::abs(eval_state(ev, pert) - base));
            rep.samples += 2;
        }
    }
    rep.pass = rep.worst <= rep.tolerance;
    return rep;
}

AuditReport audit_elliptic_compat(const Grid& g, const ProblemDef& prob, const SchemeParams& sp,
                                  const GridFunction& u, int max_nodes, std::uint64_t seed,
                                  const SlotEvaluator* eval) {
    Rng rng(seed);
    const int d = g.dim;
    AuditReport rep;
    rep.name = "elliptic_compat";
    rep.tolerance = 1e-8; // smallest acceptable ellipticity ratio c
    // prefer nodes whose +-2 stencil stays on the base grid
    std::vector<std::int32_t> deep;
    for (std::int32_t id : g.interior_ids) {
        bool ok = true;
        for (int i = 0; i < d; ++i) {
            int m = g.multi(id, i);
            if (m < 3 || m > g.counts[i] - 2) ok = false;
        }
        if (ok) deep.push_back(id);
    }
    const auto& pool = deep.empty() ? g.interior_ids : deep;
    SlotEvaluator ev;
    auto two_slot = [&](const Eigen::MatrixXd& pt, const Eigen::MatrixXd& ph, const SlotState& st) {
        return ev(pt, ph, ph, pt, st.q, st.v, st.x);
    };
    double lam = prob.lambda > 0 ? prob.lambda : 1.0;
    double worst_c = std::numeric_limits<double>::infinity();
    for (int node : sample_nodes(pool, max_nodes, rng)) {
        SlotState st = slot_state(u, node);
        ev = eval ? *eval : lagged_evaluator(prob, sp, st);
        Eigen::MatrixXd pt = 0.5 * (st.s[3] + st.s[0]);
        Eigen::MatrixXd ph = 0.5 * (st.s[2] + st.s[1]);
        Eigen::MatrixXd sum(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                double step = 1e-6 * (1 + std::abs(pt(i, j)));
                Eigen::MatrixXd p = pt;
                p(i, j) += step;
                double fp = two_slot(p, ph, st);
                p(i, j) -= 2 * step;
                double fm = two_slot(p, ph, st);
                double dtilde = (fp - fm) / (2 * step);
                step = 1e-6 * (1 + std::abs(ph(i, j)));
                p = ph;
                p(i, j) += step;
                fp = two_slot(pt, p, st);
                p(i, j) -= 2 * step;
                fm = two_slot(pt, p, st);
                sum(i, j) = dtilde + (fp - fm) / (2 * step);
            }
        Eigen::MatrixXd symm = -0.5 * (sum + sum.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symm);
        double c = es.eigenvalues().minCoeff() / lam;
        if (c < worst_c) {
            worst_c = c;
            std::ostringstream os;
            os << "node " << node;
            rep.detail = os.str();
        }
        ++rep.samples;
    }
    rep.worst = rep.samples ? worst_c : 0.0;
    rep.pass = rep.samples > 0 && rep.worst >= rep.tolerance;
    return rep;
}

} // namespace nsfd
