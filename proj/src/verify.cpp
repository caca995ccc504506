#include "nsfd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <json.hpp>

#include "nsfd/fd_ops.hpp"
#include "nsfd/grid.hpp"
#include "nsfd/problem.hpp"
#include "nsfd/rng.hpp"
#include "nsfd/scheme.hpp"

namespace nsfd {

std::string to_json(const std::vector<CheckResult>& checks) {
    nlohmann::json j;
    j["all_pass"] = all_pass(checks);
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json jc;
        jc["name"] = c.name;
        jc["pass"] = c.pass;
        jc["worst"] = c.worst;
        jc["detail"] = c.detail;
        j["checks"].push_back(jc);
    }
    return j.dump(2);
}

bool all_pass(const std::vector<CheckResult>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

namespace {

Eigen::MatrixXd dense(const SparseOperator& op) { return Eigen::MatrixXd(op.matrix()); }

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double min_eig(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().minCoeff();
}

Grid square_grid(int interior_side, double ly = 1.0) {
    Domain dom;
    dom.lo = Eigen::Vector2d(0, 0);
    dom.hi = Eigen::Vector2d(1, ly);
    return build_grid(dom, {interior_side + 2, interior_side + 2});
}

void hessian_lemma_on_grid(const Grid& g, const std::string& tag, std::vector<CheckResult>& out) {
    double worst_asym = 0, worst_dev = 0;
    double min_spd = std::numeric_limits<double>::infinity();
    std::string spd_where;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Eigen::MatrixXd hat = dense(assemble_hessian_block(g, i, j, HessianKind::hat));
            Eigen::MatrixXd til = dense(assemble_hessian_block(g, i, j, HessianKind::tilde));
            Eigen::MatrixXd bar = dense(assemble_hessian_block(g, i, j, HessianKind::bar));
            Eigen::MatrixXd t = til - hat;
            worst_asym = std::max(worst_asym, max_abs(t - t.transpose()));
            Eigen::MatrixXd dii = dense(assemble_second(g, i, 1));
            Eigen::MatrixXd djj = dense(assemble_second(g, j, 1));
            worst_dev = std::max(worst_dev, max_abs(t - 0.5 * g.h[i] * g.h[j] * (dii * djj)));
            double gap1 = min_eig(bar - hat);
            double gap2 = min_eig(til - bar);
            double spd = std::min({min_eig(t), gap1, gap2});
            if (spd < min_spd) {
                min_spd = spd;
                std::ostringstream os;
                os << "block (" << i << "," << j << ")";
                spd_where = os.str();
            }
        }
    out.push_back({"hessian_lemma_symmetry_" + tag, worst_asym <= 1e-12, worst_asym, "max |T - T^t|"});
    out.push_back({"hessian_lemma_identity_" + tag, worst_dev <= 1e-12, worst_dev,
                   "max |T - (h_i h_j/2) dhat_ii dhat_jj|"});
    out.push_back({"hessian_lemma_spd_" + tag, min_spd > 0, min_spd, "min eig over blocks, " + spd_where});
}

ProblemDef const_linear(const Eigen::Matrix2d& a) {
    ProblemDef p;
    p.name = "const_linear";
    p.dim = 2;
    p.domain.lo = Eigen::Vector2d(0, 0);
    p.domain.hi = Eigen::Vector2d(1, 1);
    p.affine = true;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
    p.lambda = es.eigenvalues().minCoeff();
    Eigen::MatrixXd am = a;
    p.F = [am](const Eigen::MatrixXd& P, const Eigen::VectorXd&, double, const Eigen::VectorXd&) {
        return -(am.array() * P.array()).sum();
    };
    p.dF_dP = [am](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&) {
        return Eigen::MatrixXd(-am);
    };
    p.dF_dq = [](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&) {
        return Eigen::VectorXd::Zero(2);
    };
    p.dF_dv = [](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&) {
        return 0.0;
    };
    p.g = [](const Eigen::VectorXd&) { return 0.0; };
    return p;
}

void spd_L_on_grid(const Grid& g, const Eigen::Matrix2d& a, const std::string& tag,
                   std::vector<CheckResult>& out) {
    Eigen::MatrixXd d[2] = {dense(assemble_first_central(g, 0)), dense(assemble_first_central(g, 1))};
    WideLaplacian wl = assemble_wide_laplacian(g);
    Eigen::MatrixXd m = dense(wl.M);

    const int n = static_cast<int>(m.rows());
    Eigen::MatrixXd ell = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) ell -= a(i, j) * d[i] * d[j];
    for (int i = 0; i < 2; ++i) ell += a(i, i) * wl.B[i].asDiagonal().toDenseMatrix();

    double asym = max_abs(ell - ell.transpose());
    out.push_back({"spd_L_symmetry_" + tag, asym <= 1e-12, asym, "max |L - L^t|"});

    double eig_l = min_eig(ell);
    out.push_back({"spd_L_posdef_" + tag, eig_l > 0, eig_l, "min eig L"});

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a);
    double lam0 = es.eigenvalues().minCoeff();
    double eig_gap = min_eig(ell - lam0 * m);
    out.push_back({"spd_L_dominates_M_" + tag, eig_gap >= -1e-10, eig_gap, "min eig (L - lambda0 M)"});

    // same matrix through the scheme path at zero moment weight
    ProblemDef prob = const_linear(a);
    SchemeParams sp;
    sp.mode = SchemeParams::MomentMode::fixed;
    sp.fixed_weight = Eigen::MatrixXd::Zero(2, 2);
    GridFunction u(g);
    Eigen::MatrixXd jac = dense(assemble_jacobian(prob, sp, u, 1));
    double dev = max_abs(jac - ell);
    out.push_back({"spd_L_jacobian_match_" + tag, dev <= 1e-11, dev, "max |J - L|"});
}

} // namespace

std::vector<CheckResult> verify_hessian_lemma(const std::vector<int>& interior_sides) {
    std::vector<CheckResult> out;
    for (int n : interior_sides) {
        if (n < 2 || n > 10) throw std::invalid_argument("verify_hessian_lemma: interior side out of range");
        Grid g = square_grid(n);
        hessian_lemma_on_grid(g, "n" + std::to_string(n), out);
    }
    Grid ga = square_grid(5, 1.3);
    hessian_lemma_on_grid(ga, "n5_anisotropic", out);
    return out;
}

std::vector<CheckResult> verify_spd_L(const std::vector<int>& interior_sides, std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng(seed);
    for (int n : interior_sides) {
        if (n < 2 || n > 10) throw std::invalid_argument("verify_spd_L: interior side out of range");
        Grid g = square_grid(n);
        std::string tag = "n" + std::to_string(n);

        Eigen::Matrix2d eye = Eigen::Matrix2d::Identity();
        spd_L_on_grid(g, eye, tag + "_identity", out);
        {
            // A = I collapses L to M entrywise
            WideLaplacian wl = assemble_wide_laplacian(g);
            Eigen::MatrixXd m = dense(wl.M);
            Eigen::MatrixXd d[2] = {dense(assemble_first_central(g, 0)),
                                    dense(assemble_first_central(g, 1))};
            Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(m.rows(), m.cols());
            for (int i = 0; i < 2; ++i)
                lhs += -d[i] * d[i] + wl.B[i].asDiagonal().toDenseMatrix();
            double dev = max_abs(lhs - m);
            out.push_back({"spd_L_collapse_" + tag, dev <= 1e-12, dev, "max |L(I) - M|"});
        }

        Eigen::Matrix2d a21;
        a21 << 2, 1, 1, 2;
        spd_L_on_grid(g, a21, tag + "_a21", out);

        Eigen::Matrix2d gmat;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) gmat(r, c) = rng.normal();
        Eigen::Matrix2d rnd = gmat * gmat.transpose() + 0.1 * Eigen::Matrix2d::Identity();
        spd_L_on_grid(g, rnd, tag + "_random", out);
    }
    return out;
}

std::vector<CheckResult> verify_symmetrization(const std::vector<int>& sizes, int trials,
                                               std::uint64_t seed) {
    std::vector<CheckResult> out;
    Rng rng(seed);
    auto spectral_norm = [](const Eigen::MatrixXd& m) {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
        return svd.singularValues()(0);
    };
    for (int n : sizes) {
        double worst = -std::numeric_limits<double>::infinity();
        int count = 0;
        auto check_pair = [&](const Eigen::MatrixXd& f, const Eigen::MatrixXd& b, double eps) {
            Eigen::LLT<Eigen::MatrixXd> llt(f);
            Eigen::MatrixXd lo = llt.matrixL();
            Eigen::MatrixXd rbr = lo.transpose() * b * lo;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (rbr + rbr.transpose()));
            double lam = es.eigenvalues().maxCoeff();
            double sigma = lam > 0 ? (1 + eps) * lam : 1.0;
            // FB = R^T (R B R^T) R^{-T}, so the contraction bound lives in the
            // F^{-1} weighted operator norm, where it equals the spectral norm
            // of sigma I - R B R^T; the plain Euclidean norm of sigma I - FB
            // can exceed sigma when F is ill conditioned.
            Eigen::MatrixXd gap = sigma * Eigen::MatrixXd::Identity(n, n) - rbr;
            worst = std::max(worst, (spectral_norm(gap) - sigma) / sigma);
            // The same similarity keeps the spectrum of FB real inside
            // [0, lam], so every eigenvalue sits within sigma of sigma.
            Eigen::EigenSolver<Eigen::MatrixXd> ges(f * b);
            double farthest = 0;
            for (int k = 0; k < n; ++k)
                farthest = std::max(farthest, std::abs(std::complex<double>(sigma, 0) - ges.eigenvalues()(k)));
            worst = std::max(worst, (farthest - sigma) / sigma);
            ++count;
        };
        auto random_spd = [&] {
            Eigen::MatrixXd h(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) h(r, c) = rng.normal();
            return Eigen::MatrixXd(h.transpose() * h + 0.1 * Eigen::MatrixXd::Identity(n, n));
        };
        auto random_nonneg = [&] {
            Eigen::MatrixXd gmat(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) gmat(r, c) = rng.normal();
            return Eigen::MatrixXd(gmat.transpose() * gmat);
        };
        check_pair(random_spd(), Eigen::MatrixXd::Zero(n, n), 0.01);
        check_pair(Eigen::MatrixXd::Identity(n, n), random_spd(), 0.01);
        for (int t = 0; t < trials; ++t) check_pair(random_spd(), random_nonneg(), t % 2 ? 1.0 : 0.01);
        std::ostringstream os;
        os << count << " pairs, seed " << seed;
        out.push_back(
            {"symmetrization_n" + std::to_string(n), worst <= 1e-10, worst, os.str() + ", worst relative excess"});
    }
    return out;
}

std::vector<CheckResult> verify_contraction(const std::vector<double>& rho_factors, std::uint64_t seed) {
    std::vector<CheckResult> out;
    ProblemDef prob = const_linear(Eigen::Matrix2d::Identity());
    SchemeParams sp;
    Grid g = square_grid(5);
    GridFunction zero(g);
    Eigen::MatrixXd ell = Eigen::MatrixXd(assemble_jacobian(prob, sp, zero, 1).matrix());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (ell + ell.transpose()));
    double lam_min = es.eigenvalues().minCoeff();
    double lam_max = es.eigenvalues().maxCoeff();

    Rng rng(seed);
    for (double factor : rho_factors) {
        double rho = factor / lam_max;
        double predicted = 0;
        for (int k = 0; k < es.eigenvalues().size(); ++k)
            predicted = std::max(predicted, std::abs(1 - rho * es.eigenvalues()[k]));

        GridFunction u(g);
        GridFunction v(g);
        for (std::int32_t id : g.interior_ids) {
            u[id] = rng.uniform(-1, 1);
            v[id] = rng.uniform(-1, 1);
        }
        impose_boundary(u, prob);
        impose_boundary(v, prob);

        auto step = [&](GridFunction& w) {
            Eigen::VectorXd r = assemble_residual(prob, sp, w, 1);
            for (std::size_t k = 0; k < g.interior_ids.size(); ++k) w[g.interior_ids[k]] -= rho * r[k];
            fill_ghosts(w);
        };
        auto diff_norm = [&] {
            double s = 0;
            for (std::int32_t id : g.interior_ids) s += (u[id] - v[id]) * (u[id] - v[id]);
            return std::sqrt(s);
        };

        double prev = diff_norm(), ratio = 0;
        for (int sweep = 0; sweep < 50; ++sweep) {
            step(u);
            step(v);
            double cur = diff_norm();
            ratio = prev > 0 ? cur / prev : 0;
            prev = cur;
        }

        std::ostringstream os;
        os << "rho " << rho << ", measured " << ratio << ", spectral radius " << predicted;
        if (factor < 2) {
            bool ok = ratio < 1 && std::abs(ratio - predicted) <= 0.05 * predicted &&
                      ratio <= 1 - rho * lam_min / 2 + 1e-12;
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", factor);
            out.push_back({std::string("contraction_rho_") + buf, ok, ratio, os.str()});
        } else {
            out.push_back({"contraction_negative_control", ratio > 1, ratio, os.str() + ", expansion expected"});
        }
    }
    return out;
}

std::vector<CheckResult> run_verification(std::uint64_t seed) {
    std::vector<int> sides{2, 3, 4, 5, 6, 7, 8};
    std::vector<CheckResult> out = verify_hessian_lemma(sides);
    auto spd = verify_spd_L(sides, seed);
    out.insert(out.end(), spd.begin(), spd.end());
    auto symm = verify_symmetrization(sides, 100, seed);
    out.insert(out.end(), symm.begin(), symm.end());
    auto con = verify_contraction({0.2, 1.9, 3.0}, seed);
    out.insert(out.end(), con.begin(), con.end());
    return out;
}

} // namespace nsfd
