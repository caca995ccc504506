#include "nsfd/fd_ops.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace nsfd {

namespace {

int need_neighbor(const Grid& g, int node, int axis, int step) {
    int n = g.neighbor(node, axis, step);
    if (n < 0) throw std::invalid_argument("fd_ops: stencil leaves the extended grid");
    return n;
}

void stencil_add(Stencil& s, int id, double c) {
    for (auto& t : s) {
        if (t.id == id) {
            t.c += c;
            return;
        }
    }
    s.push_back({static_cast<std::int32_t>(id), c});
}

} // namespace

double diff1(const GridFunction& u, int node, int axis, Diff1Mode mode) {
    const Grid& g = *u.grid;
    double h = g.h[axis];
    switch (mode) {
        case Diff1Mode::forward:
            return (u[need_neighbor(g, node, axis, +1)] - u[node]) / h;
        case Diff1Mode::backward:
            return (u[node] - u[need_neighbor(g, node, axis, -1)]) / h;
        case Diff1Mode::central:
            return (u[need_neighbor(g, node, axis, +1)] - u[need_neighbor(g, node, axis, -1)]) / (2 * h);
    }
    throw std::logic_error("diff1: bad mode");
}

Eigen::VectorXd grad_central(const GridFunction& u, int node) {
    const Grid& g = *u.grid;
    Eigen::VectorXd q(g.dim);
    for (int i = 0; i < g.dim; ++i) q[i] = diff1(u, node, i, Diff1Mode::central);
    return q;
}

HessianBundle hessian_bundle(const GridFunction& u, int node) {
    const Grid& g = *u.grid;
    const int d = g.dim;
    HessianBundle b;
    b.dpp.setZero(d, d);
    b.dpm.setZero(d, d);
    b.dmp.setZero(d, d);
    b.dmm.setZero(d, d);
    for (int i = 0; i < d; ++i) {
        double h2 = g.h[i] * g.h[i];
        double u0 = u[node];
        double up = u[need_neighbor(g, node, i, +1)];
        double um = u[need_neighbor(g, node, i, -1)];
        double up2 = u[need_neighbor(g, node, i, +2)];
        double um2 = u[need_neighbor(g, node, i, -2)];
        b.dpm(i, i) = b.dmp(i, i) = (up - 2 * u0 + um) / h2;
        b.dpp(i, i) = (up2 - 2 * up + u0) / h2;
        b.dmm(i, i) = (u0 - 2 * um + um2) / h2;
        for (int j = 0; j < d; ++j) {
            if (j == i) continue;
            double hh = g.h[i] * g.h[j];
            int pj = need_neighbor(g, node, j, +1);
            int mj = need_neighbor(g, node, j, -1);
            double upj = u[pj], umj = u[mj];
            double upi = u[need_neighbor(g, node, i, +1)];
            double umi = u[need_neighbor(g, node, i, -1)];
            double upp = u[need_neighbor(g, pj, i, +1)];
            double ump = u[need_neighbor(g, pj, i, -1)];
            double upm = u[need_neighbor(g, mj, i, +1)];
            double umm = u[need_neighbor(g, mj, i, -1)];
            b.dpp(i, j) = (upp - upj - upi + u0) / hh;
            b.dpm(i, j) = (upi - u0 - upm + umj) / hh;
            b.dmp(i, j) = (upj - ump - u0 + umi) / hh;
            b.dmm(i, j) = (u0 - umj - umi + umm) / hh;
        }
    }
    b.dhat = 0.5 * (b.dpm + b.dmp);
    b.dtilde = 0.5 * (b.dpp + b.dmm);
    b.dbar = 0.5 * (b.dhat + b.dtilde);
    return b;
}

double moment(const HessianBundle& b, const Eigen::MatrixXd& w) {
    return (w.array() * (b.dtilde - b.dhat).array()).sum();
}

std::pair<double, double> discrete_laplacians(const GridFunction& u, int node) {
    const Grid& g = *u.grid;
    double lap_h = 0, lap_2h = 0;
    for (int i = 0; i < g.dim; ++i) {
        double h2 = g.h[i] * g.h[i];
        lap_h += (u[need_neighbor(g, node, i, +1)] - 2 * u[node] + u[need_neighbor(g, node, i, -1)]) / h2;
        int p2 = g.neighbor(node, i, +2), m2 = g.neighbor(node, i, -2);
        if (p2 < 0 || m2 < 0) {
            lap_2h = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        lap_2h += (u[p2] - 2 * u[node] + u[m2]) / (4 * h2);
    }
    return {lap_h, lap_2h};
}

void fill_ghosts(GridFunction& u) {
    const Grid& g = *u.grid;
    for (std::int32_t gh : g.ghost_ids) {
        auto a = g.ghost_anchor(gh);
        double tangential = 0;
        for (int j = 0; j < g.dim; ++j) {
            if (j == a.axis) continue;
            double d2 = (u[need_neighbor(g, a.face, j, +1)] - 2 * u[a.face] + u[need_neighbor(g, a.face, j, -1)]) /
                        (g.h[j] * g.h[j]);
            tangential += d2;
        }
        u[gh] = 2 * u[a.face] - u[a.anchor] - g.h[a.axis] * g.h[a.axis] * tangential;
    }
}

void SparseOperator::add(int r, int c, double v) {
    if (finalized_) throw std::logic_error("SparseOperator: add after finalize");
    if (r < 0 || r >= rows_ || c < 0 || c >= cols_)
        throw std::out_of_range("SparseOperator: entry out of range");
    pending_.emplace_back(r, c, v);
}

void SparseOperator::finalize() {
    if (finalized_) return;
    mat_.resize(rows_, cols_);
    mat_.setFromTriplets(pending_.begin(), pending_.end());
    mat_.makeCompressed();
    pending_.clear();
    pending_.shrink_to_fit();
    finalized_ = true;
}

const Eigen::SparseMatrix<double>& SparseOperator::matrix() const {
    if (!finalized_) throw std::logic_error("SparseOperator: matrix() before finalize");
    return mat_;
}

int SparseOperator::max_row_nnz() const {
    std::vector<int> count(static_cast<std::size_t>(rows_), 0);
    const auto& m = matrix();
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) ++count[it.row()];
    return count.empty() ? 0 : *std::max_element(count.begin(), count.end());
}

void SparseOperator::write_matrix_market(std::ostream& os) const {
    const auto& m = matrix();
    os << "%%MatrixMarket matrix coordinate real general\n";
    os << m.rows() << ' ' << m.cols() << ' ' << m.nonZeros() << '\n';
    char buf[64];
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%.16e", it.value());
            os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << buf << '\n';
        }
}

Stencil stencil_diff1(const Grid& g, int node, int axis, Diff1Mode mode) {
    Stencil s;
    double h = g.h[axis];
    switch (mode) {
        case Diff1Mode::forward:
            stencil_add(s, need_neighbor(g, node, axis, +1), 1 / h);
            stencil_add(s, node, -1 / h);
            break;
        case Diff1Mode::backward:
            stencil_add(s, node, 1 / h);
            stencil_add(s, need_neighbor(g, node, axis, -1), -1 / h);
            break;
        case Diff1Mode::central:
            stencil_add(s, need_neighbor(g, node, axis, +1), 1 / (2 * h));
            stencil_add(s, need_neighbor(g, node, axis, -1), -1 / (2 * h));
            break;
    }
    return s;
}

Stencil stencil_second(const Grid& g, int node, int axis, int spacing) {
    if (spacing != 1 && spacing != 2) throw std::invalid_argument("stencil_second: spacing must be 1 or 2");
    double hs = spacing * g.h[axis];
    Stencil s;
    stencil_add(s, need_neighbor(g, node, axis, +spacing), 1 / (hs * hs));
    stencil_add(s, node, -2 / (hs * hs));
    stencil_add(s, need_neighbor(g, node, axis, -spacing), 1 / (hs * hs));
    return s;
}

Stencil stencil_onesided(const Grid& g, int node, int i, int j, int mu, int nu) {
    if ((mu != 1 && mu != -1) || (nu != 1 && nu != -1))
        throw std::invalid_argument("stencil_onesided: signs must be +-1");
    double c = mu * nu / (g.h[i] * g.h[j]);
    int xj = need_neighbor(g, node, j, nu);
    Stencil s;
    stencil_add(s, need_neighbor(g, xj, i, mu), c);
    stencil_add(s, xj, -c);
    stencil_add(s, need_neighbor(g, node, i, mu), -c);
    stencil_add(s, node, c);
    return s;
}

namespace {

void stencil_axpy(Stencil& out, const Stencil& s, double a) {
    for (const auto& t : s) stencil_add(out, t.id, a * t.c);
}

} // namespace

Stencil stencil_hessian(const Grid& g, int node, int i, int j, HessianKind kind) {
    Stencil s;
    switch (kind) {
        case HessianKind::hat:
            stencil_axpy(s, stencil_onesided(g, node, i, j, +1, -1), 0.5);
            stencil_axpy(s, stencil_onesided(g, node, i, j, -1, +1), 0.5);
            break;
        case HessianKind::tilde:
            stencil_axpy(s, stencil_onesided(g, node, i, j, +1, +1), 0.5);
            stencil_axpy(s, stencil_onesided(g, node, i, j, -1, -1), 0.5);
            break;
        case HessianKind::bar:
            stencil_axpy(s, stencil_hessian(g, node, i, j, HessianKind::hat), 0.5);
            stencil_axpy(s, stencil_hessian(g, node, i, j, HessianKind::tilde), 0.5);
            break;
    }
    return s;
}

EliminatedRow eliminate(const Grid& g, const Stencil& s,
                        const std::function<double(const Eigen::VectorXd&)>* gfun) {
    EliminatedRow row;
    auto fold = [&](int id, double c) {
        for (auto& t : row.cols) {
            if (t.id == id) {
                t.c += c;
                return;
            }
        }
        row.cols.push_back({static_cast<std::int32_t>(id), c});
    };
    for (const auto& t : s) {
        switch (g.node_class[t.id]) {
            case NodeClass::interior:
                fold(t.id, t.c);
                break;
            case NodeClass::boundary:
            case NodeClass::sh:
                if (gfun) row.data += t.c * (*gfun)(g.point(t.id));
                break;
            case NodeClass::ghost: {
                auto a = g.ghost_anchor(t.id);
                fold(a.anchor, -t.c);
                if (gfun) {
                    double val = 2 * (*gfun)(g.point(a.face));
                    double hi2 = g.h[a.axis] * g.h[a.axis];
                    for (int j = 0; j < g.dim; ++j) {
                        if (j == a.axis) continue;
                        double gp = (*gfun)(g.point(need_neighbor(g, a.face, j, +1)));
                        double gm = (*gfun)(g.point(need_neighbor(g, a.face, j, -1)));
                        double g0 = (*gfun)(g.point(a.face));
                        val -= hi2 * (gp - 2 * g0 + gm) / (g.h[j] * g.h[j]);
                    }
                    row.data += t.c * val;
                }
                break;
            }
        }
    }
    std::sort(row.cols.begin(), row.cols.end(),
              [](const StencilTerm& a, const StencilTerm& b) { return a.id < b.id; });
    return row;
}

namespace {

SparseOperator assemble_rows(const Grid& g, const std::function<Stencil(int)>& make) {
    const int n = static_cast<int>(g.interior_ids.size());
    SparseOperator op(n, n);
    for (int r = 0; r < n; ++r) {
        auto row = eliminate(g, make(g.interior_ids[r]));
        for (const auto& t : row.cols) op.add(r, g.interior_index[t.id], t.c);
    }
    op.finalize();
    return op;
}

} // namespace

SparseOperator assemble_first_central(const Grid& g, int axis) {
    return assemble_rows(g, [&](int node) { return stencil_diff1(g, node, axis, Diff1Mode::central); });
}

SparseOperator assemble_second(const Grid& g, int axis, int spacing) {
    return assemble_rows(g, [&](int node) { return stencil_second(g, node, axis, spacing); });
}

WideLaplacian assemble_wide_laplacian(const Grid& g) {
    const int n = static_cast<int>(g.interior_ids.size());
    SparseOperator m(n, n);
    std::vector<Eigen::VectorXd> bs;
    for (int axis = 0; axis < g.dim; ++axis) {
        SparseOperator di = assemble_first_central(g, axis);
        SparseOperator mi = assemble_rows(g, [&](int node) {
            Stencil s;
            stencil_axpy(s, stencil_second(g, node, axis, 2), -1.0);
            return s;
        });
        Eigen::SparseMatrix<double> rem = mi.matrix() + di.matrix() * di.matrix();
        Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
        double scale = 0;
        for (int k = 0; k < rem.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(rem, k); it; ++it)
                scale = std::max(scale, std::abs(it.value()));
        for (int k = 0; k < rem.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(rem, k); it; ++it) {
                if (it.row() == it.col()) {
                    b[it.row()] = it.value();
                } else if (std::abs(it.value()) > 1e-12 * scale) {
                    throw std::logic_error("assemble_wide_laplacian: B_i not diagonal");
                }
            }
        if (n > 0 && b.minCoeff() < -1e-12 * std::max(1.0, scale))
            throw std::logic_error("assemble_wide_laplacian: negative B_i entry");
        b = b.cwiseMax(0.0);
        bs.push_back(std::move(b));
        for (int k = 0; k < mi.matrix().outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(mi.matrix(), k); it; ++it)
                m.add(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
    m.finalize();
    return WideLaplacian{std::move(m), std::move(bs)};
}

SparseOperator assemble_hessian_block(const Grid& g, int i, int j, HessianKind kind) {
    return assemble_rows(g, [&](int node) { return stencil_hessian(g, node, i, j, kind); });
}

} // namespace nsfd
