#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nsfd/grid.hpp"

namespace nsfd {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// Sampling of the two-parameter control set (angle phi, rotation): phi
/// uniform on [0, phi_max] endpoints included, rotation uniform on
/// [0, rot_max) half-open since the diffusion is rotation-periodic.
struct ControlSet {
    int phi_count = 16;
    int rot_count = 32;
    double phi_max = 1.0471975511965977; // pi/3
    double rot_max = 3.141592653589793;  // pi
};

/// One sampled control: diffusion matrix A, its entrywise |A|/2 upwinding
/// weight, and the control-dependent part of the running cost.
struct Control {
    double a11, a12, a22;
    double m11, m12, m22;
    double cost;
};

/// Bellman-type structure min_theta(-A^theta : P + zeroth*v - cost_theta -
/// data(x)) attached to a problem; the scheme evaluates the min with
/// per-control upwinding.
struct ControlFamily {
    ControlSet set;
    std::vector<Control> controls;
    double zeroth = 0.0;
    ScalarField data;
};

/// Fully nonlinear operator F(P, q, v, x) with hand-coded partials, Dirichlet
/// data, and (when known) the exact solution. P is the Hessian slot, q the
/// gradient, v the value. dF_dP treats the d*d entries independently, so
/// symmetric operators report the symmetric split (dF/dP12 = dF/dP21).
struct ProblemDef {
    std::string name;
    int dim = 2;
    Domain domain;       ///< the box the tables are run on
    bool affine = false; ///< residual affine in u: coefficients independent of the state
    double lambda = 1.0; ///< ellipticity lower bound at reference states
    std::function<double(const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&)> F;
    std::function<Eigen::MatrixXd(const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&)> dF_dP;
    std::function<Eigen::VectorXd(const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&)> dF_dq;
    std::function<double(const Eigen::MatrixXd&, const Eigen::VectorXd&, double, const Eigen::VectorXd&)> dF_dv;
    ScalarField g;
    ScalarField exact; ///< empty when no closed form is known
    std::optional<ControlFamily> controls;

    bool has_exact() const { return static_cast<bool>(exact); }
};

} // namespace nsfd
