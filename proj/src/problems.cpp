#include "nsfd/problems.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace nsfd {

namespace {

Domain unit_box() {
    Domain d;
    d.lo = Eigen::Vector2d(0, 0);
    d.hi = Eigen::Vector2d(1, 1);
    return d;
}

Domain sym_box() {
    Domain d;
    d.lo = Eigen::Vector2d(-1, -1);
    d.hi = Eigen::Vector2d(1, 1);
    return d;
}

constexpr double kPi = 3.141592653589793238462643;

double sgn(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

// ---- linear nondivergence coefficient ------------------------------------
//
// Four orthonormal frames built from direction vectors tied to the finest
// mesh spacing h = 2/301; the frame switches per quadrant, the eigenvalues
// oscillate in x and jump in y, so the operator is nowhere grid-aligned and
// not continuous.

struct Frame {
    double q11, q21; // first column
    double q12, q22; // second column
};

Frame frame_from(double vx, double vy) {
    double n = std::hypot(vx, vy);
    Frame f;
    f.q11 = vx / n;
    f.q21 = vy / n;
    f.q12 = -f.q21;
    f.q22 = f.q11;
    return f;
}

struct LinearCoef {
    Frame q[4];

    LinearCoef() {
        const double h = 2.0 / 301.0;
        q[0] = frame_from(1.0, h / 2);
        q[1] = frame_from(h, 5 * h);
        q[2] = frame_from(10 * h, h);
        q[3] = frame_from(h / 2, 2.0);
    }

    const Frame& pick(double x, double y) const {
        if (x >= 0 && y >= 0) return q[0];
        if (x < 0 && y >= 0) return q[1];
        if (x < 0 && y < 0) return q[2];
        return q[3];
    }

    Eigen::Matrix2d at(double x, double y) const {
        double l1 = 2.0 - std::sin(std::exp(5 * x)) * std::cos(std::exp(-3 * y));
        double l2 = 2.0 - sgn(std::cos(6 * kPi * x) * std::sin(6 * kPi * y));
        const Frame& f = pick(x, y);
        Eigen::Matrix2d qm;
        qm << f.q11, f.q12, f.q21, f.q22;
        return qm * Eigen::Vector2d(l1, l2).asDiagonal() * qm.transpose();
    }
};

// exact solutions for the linear tests, values and Hessians in closed form

double u1_val(double x, double y) {
    double w = x + y;
    return std::sin(kPi * w * w / 2);
}

void u1_hess(double x, double y, double& uxx, double& uxy, double& uyy) {
    double w = x + y;
    double s = std::sin(kPi * w * w / 2), c = std::cos(kPi * w * w / 2);
    double v = kPi * c - kPi * kPi * w * w * s;
    uxx = uxy = uyy = v;
}

// x^3 (3 log x^2 - 11)/18 + (y-1/2)^{8/3} |x+1/5|^{5/2}; C^2 but not C^3
// across x=0 and y=1/2. The log term and its derivatives vanish at x=0.

double u2_val(double x, double y) {
    double t1 = x == 0.0 ? 0.0 : x * x * x * (3 * std::log(x * x) - 11) / 18;
    double r = std::cbrt(y - 0.5);
    double s = std::abs(x + 0.2);
    double r2 = r * r;
    double t2 = r2 * r2 * r2 * r2 * s * s * std::sqrt(s);
    return t1 + t2;
}

void u2_hess(double x, double y, double& uxx, double& uxy, double& uyy) {
    double t1xx = x == 0.0 ? 0.0 : x * std::log(x * x) - 2 * x;
    double r = std::cbrt(y - 0.5);
    double s = x + 0.2;
    double as = std::abs(s), ss = sgn(s);
    double r2 = r * r, r5 = r2 * r2 * r, r8 = r5 * r2 * r;
    uxx = t1xx + (15.0 / 4.0) * std::sqrt(as) * r8;
    uxy = (20.0 / 3.0) * r5 * as * std::sqrt(as) * ss;
    uyy = (40.0 / 9.0) * r2 * as * as * std::sqrt(as);
}

// ---- common Hessian/gradient of e^{(x^2+y^2)/2} --------------------------

double bowl_val(double x, double y) { return std::exp((x * x + y * y) / 2); }

void bowl_grad_hess(double x, double y, double& ux, double& uy, double& uxx, double& uxy, double& uyy) {
    double u = bowl_val(x, y);
    ux = x * u;
    uy = y * u;
    uxx = (1 + x * x) * u;
    uyy = (1 + y * y) * u;
    uxy = x * y * u;
}

double det2(const Eigen::MatrixXd& p) { return p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0); }

Eigen::MatrixXd det2_grad(const Eigen::MatrixXd& p) {
    Eigen::MatrixXd g(2, 2);
    g << p(1, 1), -p(1, 0), -p(0, 1), p(0, 0);
    return g;
}

// smallest eigenvalue of adj(D^2 u), optionally scaled by the gradient
// factor, minimized over a coordinate sample of (0,1)^2
double bowl_ellipticity_floor(bool gradient_factor) {
    double lo = std::numeric_limits<double>::infinity();
    const int n = 51;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double x = i / double(n - 1), y = j / double(n - 1);
            double ux, uy, uxx, uxy, uyy;
            bowl_grad_hess(x, y, ux, uy, uxx, uxy, uyy);
            double det = uxx * uyy - uxy * uxy;
            double tr = uxx + uyy;
            double lmax = (tr + std::sqrt(std::max(0.0, tr * tr - 4 * det))) / 2;
            double v = det / lmax;
            if (gradient_factor) {
                double q2 = ux * ux + uy * uy;
                v /= (1 + q2) * (1 + q2);
            }
            lo = std::min(lo, v);
        }
    return lo;
}

} // namespace

int argmin_index(const double* vals, int n) {
    int best = 0;
    for (int k = 1; k < n; ++k)
        if (vals[k] < vals[best]) best = k;
    return best;
}

int argmin_control(const ControlFamily& fam, const Eigen::MatrixXd& P) {
    double p11 = P(0, 0), p22 = P(1, 1), p12 = P(0, 1) + P(1, 0);
    int best = 0;
    double bestv = std::numeric_limits<double>::infinity();
    for (int k = 0; k < static_cast<int>(fam.controls.size()); ++k) {
        const Control& c = fam.controls[k];
        double v = -(c.a11 * p11 + c.a12 * p12 + c.a22 * p22) - c.cost;
        if (v < bestv) {
            bestv = v;
            best = k;
        }
    }
    return best;
}

ProblemDef make_linear_nonaligned(int which) {
    if (which != 1 && which != 2) throw std::invalid_argument("make_linear_nonaligned: which must be 1 or 2");
    auto coef = std::make_shared<LinearCoef>();
    auto exact = [which](const Eigen::VectorXd& x) {
        return which == 1 ? u1_val(x[0], x[1]) : u2_val(x[0], x[1]);
    };
    auto rhs = [coef, which](const Eigen::VectorXd& x) {
        double uxx, uxy, uyy;
        if (which == 1) u1_hess(x[0], x[1], uxx, uxy, uyy);
        else u2_hess(x[0], x[1], uxx, uxy, uyy);
        Eigen::Matrix2d a = coef->at(x[0], x[1]);
        return -(a(0, 0) * uxx + 2 * a(0, 1) * uxy + a(1, 1) * uyy);
    };

    ProblemDef p;
    p.name = which == 1 ? "linear1" : "linear2";
    p.dim = 2;
    p.domain = sym_box();
    p.affine = true;
    p.lambda = 1.0;
    p.F = [coef, rhs](const Eigen::MatrixXd& P, const Eigen::VectorXd&, double, const Eigen::VectorXd& x) {
        Eigen::Matrix2d a = coef->at(x[0], x[1]);
        double ap = a(0, 0) * P(0, 0) + a(0, 1) * (P(0, 1) + P(1, 0)) + a(1, 1) * P(1, 1);
        return -ap - rhs(x);
    };
    p.dF_dP = [coef](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd& x) {
        return Eigen::MatrixXd(-coef->at(x[0], x[1]));
    };
    p.dF_dq = [](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&) {
        return Eigen::VectorXd(Eigen::VectorXd::Zero(2));
    };
    p.dF_dv = [](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&) { return 0.0; };
    p.g = exact;
    p.exact = exact;
    return p;
}

ProblemDef make_hjb(const ControlSet& cs) {
    if (cs.phi_count < 1 || cs.rot_count < 1)
        throw std::invalid_argument("make_hjb: control counts must be positive");

    auto fam = std::make_shared<ControlFamily>();
    fam->set = cs;
    fam->zeroth = kPi * kPi;
    fam->controls.reserve(static_cast<std::size_t>(cs.phi_count) * cs.rot_count);
    for (int kp = 0; kp < cs.phi_count; ++kp) {
        double phi = cs.phi_count == 1 ? 0.0 : cs.phi_max * kp / (cs.phi_count - 1);
        double sp = std::sin(phi), cp = std::cos(phi);
        // B B^T for B = [[1, sin phi],[0, cos phi]]
        double b11 = 1 + sp * sp, b12 = sp * cp, b22 = cp * cp;
        double cost = std::sqrt(3.0) * std::pow(std::sin(phi / (kPi * kPi)), 2);
        for (int kr = 0; kr < cs.rot_count; ++kr) {
            double t = cs.rot_max * kr / cs.rot_count;
            double ct = std::cos(t), st = std::sin(t);
            // A = R^T (BB^T) R / 2 with R = [[ct, st], [-st, ct]]
            double r11 = ct, r12 = st, r21 = -st, r22 = ct;
            double t11 = b11 * r11 + b12 * r21, t12 = b11 * r12 + b12 * r22;
            double t21 = b12 * r11 + b22 * r21, t22 = b12 * r12 + b22 * r22;
            Control c;
            c.a11 = 0.5 * (r11 * t11 + r21 * t21);
            c.a12 = 0.5 * (r11 * t12 + r21 * t22);
            c.a22 = 0.5 * (r12 * t12 + r22 * t22);
            c.m11 = 0.5 * std::abs(c.a11);
            c.m12 = 0.5 * std::abs(c.a12);
            c.m22 = 0.5 * std::abs(c.a22);
            c.cost = cost;
            fam->controls.push_back(c);
        }
    }

    auto exact = [](const Eigen::VectorXd& x) {
        return std::exp(x[0] * x[1]) * std::sin(kPi * x[0]) * std::sin(kPi * x[1]);
    };
    // data term manufactured from the continuous infimum: for H = D^2 u,
    // inf_theta(-A:H - cost) = -tr(H)/2 - sin(phi_max)/2 * |dev H| - cost(phi_max)
    // with |dev H| = sqrt((H11-H22)^2 + 4 H12^2); both phi terms decrease in
    // phi on [0, pi/3], so the scalar infimum sits at the endpoint.
    double phi_arg = cs.phi_max;
    double cost_arg = std::sqrt(3.0) * std::pow(std::sin(phi_arg / (kPi * kPi)), 2);
    double sin_arg = std::sin(phi_arg);
    auto data = [exact, cost_arg, sin_arg](const Eigen::VectorXd& xv) {
        double x = xv[0], y = xv[1];
        double e = std::exp(x * y), sx = std::sin(kPi * x), cx = std::cos(kPi * x);
        double sy = std::sin(kPi * y), cy = std::cos(kPi * y);
        double uxx = e * sy * ((y * y - kPi * kPi) * sx + 2 * kPi * y * cx);
        double uyy = e * sx * ((x * x - kPi * kPi) * sy + 2 * kPi * x * cy);
        double uxy = e * (x * (y * sx + kPi * cx) * sy + sx * sy + kPi * (y * sx + kPi * cx) * cy);
        double dev = std::sqrt((uxx - uyy) * (uxx - uyy) + 4 * uxy * uxy);
        return kPi * kPi * exact(xv) - 0.5 * (uxx + uyy) - 0.5 * sin_arg * dev - cost_arg;
    };
    fam->data = data;

    ProblemDef p;
    p.name = "hjb";
    p.dim = 2;
    p.domain = unit_box();
    p.affine = false;
    p.lambda = 0.5 * (1 - std::sin(cs.phi_max));
    p.F = [fam](const Eigen::MatrixXd& P, const Eigen::VectorXd&, double v, const Eigen::VectorXd& x) {
        int k = argmin_control(*fam, P);
        const Control& c = fam->controls[k];
        double ap = c.a11 * P(0, 0) + c.a12 * (P(0, 1) + P(1, 0)) + c.a22 * P(1, 1);
        return -ap - c.cost + fam->zeroth * v - fam->data(x);
    };
    p.dF_dP = [fam](const Eigen::MatrixXd& P, const Eigen::VectorXd&, double, const Eigen::VectorXd&) {
        const Control& c = fam->controls[argmin_control(*fam, P)];
        Eigen::MatrixXd g(2, 2);
        g << -c.a11, -c.a12, -c.a12, -c.a22;
        return g;
    };
    p.dF_dq = [](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&) {
        return Eigen::VectorXd(Eigen::VectorXd::Zero(2));
    };
    p.dF_dv = [fam](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&) {
        return fam->zeroth;
    };
    p.g = exact;
    p.exact = exact;
    p.controls = *fam;
    return p;
}

ProblemDef make_monge_ampere() {
    auto exact = [](const Eigen::VectorXd& x) { return bowl_val(x[0], x[1]); };
    auto rhs = [](const Eigen::VectorXd& x) {
        double r2 = x[0] * x[0] + x[1] * x[1];
        return std::exp(r2) * (1 + r2);
    };
    ProblemDef p;
    p.name = "monge_ampere";
    p.dim = 2;
    p.domain = unit_box();
    p.affine = false;
    p.lambda = 0.999 * bowl_ellipticity_floor(false);
    p.F = [rhs](const Eigen::MatrixXd& P, const Eigen::VectorXd&, double, const Eigen::VectorXd& x) {
        return -det2(P) + rhs(x);
    };
    p.dF_dP = [](const Eigen::MatrixXd& P, const Eigen::VectorXd&, double, const Eigen::VectorXd&) {
        return Eigen::MatrixXd(-det2_grad(P));
    };
    p.dF_dq = [](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&) {
        return Eigen::VectorXd(Eigen::VectorXd::Zero(2));
    };
    p.dF_dv = [](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&) { return 0.0; };
    p.g = exact;
    p.exact = exact;
    return p;
}

ProblemDef make_gauss_curvature() {
    const double kappa = 0.1;
    auto exact = [](const Eigen::VectorXd& x) { return bowl_val(x[0], x[1]); };
    auto rhs = [kappa](const Eigen::VectorXd& x) {
        double ux, uy, uxx, uxy, uyy;
        bowl_grad_hess(x[0], x[1], ux, uy, uxx, uxy, uyy);
        double det = uxx * uyy - uxy * uxy;
        double q2 = ux * ux + uy * uy;
        return det / (kappa * (1 + q2) * (1 + q2));
    };
    ProblemDef p;
    p.name = "gauss_curvature";
    p.dim = 2;
    p.domain = unit_box();
    p.affine = false;
    p.lambda = 0.999 * bowl_ellipticity_floor(true);
    p.F = [rhs, kappa](const Eigen::MatrixXd& P, const Eigen::VectorXd& q, double, const Eigen::VectorXd& x) {
        double w = 1 + q.squaredNorm();
        return -det2(P) / (w * w) + kappa * rhs(x);
    };
    p.dF_dP = [](const Eigen::MatrixXd& P, const Eigen::VectorXd& q, double, const Eigen::VectorXd&) {
        double w = 1 + q.squaredNorm();
        return Eigen::MatrixXd(-det2_grad(P) / (w * w));
    };
    p.dF_dq = [](const Eigen::MatrixXd& P, const Eigen::VectorXd& q, double, const Eigen::VectorXd&) {
        double w = 1 + q.squaredNorm();
        return Eigen::VectorXd(4 * det2(P) / (w * w * w) * q);
    };
    p.dF_dv = [](const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&) { return 0.0; };
    p.g = exact;
    p.exact = exact;
    return p;
}

ProblemDef make_problem(const std::string& name, const ControlSet& cs) {
    if (name == "linear1") return make_linear_nonaligned(1);
    if (name == "linear2") return make_linear_nonaligned(2);
    if (name == "hjb") return make_hjb(cs);
    if (name == "monge_ampere") return make_monge_ampere();
    if (name == "gauss_curvature") return make_gauss_curvature();
    throw std::invalid_argument("make_problem: unknown problem '" + name + "'");
}

std::vector<std::string> problem_names() {
    return {"linear1", "linear2", "hjb", "monge_ampere", "gauss_curvature"};
}

} // namespace nsfd
