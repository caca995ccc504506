#pragma once

#include <string>
#include <vector>

#include "nsfd/problem.hpp"

namespace nsfd {

/// Linear nondivergence problem -A(x):D^2 u = f on (-1,1)^2 with a
/// discontinuous, non-grid-aligned coefficient frame. which selects the
/// manufactured solution: 1 smooth, 2 of limited regularity (C^2 only).
ProblemDef make_linear_nonaligned(int which);

/// Bellman problem min_theta(-A^theta:D^2 u + pi^2 u - f_theta) = 0 on
/// (0,1)^2 over the sampled control set; exact solution
/// e^{xy} sin(pi x) sin(pi y).
ProblemDef make_hjb(const ControlSet& cs);

/// Monge-Ampere problem -det(D^2 u) + f = 0 on (0,1)^2, exact solution
/// e^{(x^2+y^2)/2}.
ProblemDef make_monge_ampere();

/// Prescribed-Gauss-curvature problem -det(D^2 u)/(1+|Du|^2)^2 + K f = 0 on
/// (0,1)^2, K = 0.1, same exact solution as the Monge-Ampere case.
ProblemDef make_gauss_curvature();

/// Registry by CLI name: linear1, linear2, hjb, monge_ampere,
/// gauss_curvature. Throws std::invalid_argument on unknown names.
ProblemDef make_problem(const std::string& name, const ControlSet& cs = {});

std::vector<std::string> problem_names();

/// index of the smallest value, lowest index on ties
int argmin_index(const double* vals, int n);

/// argmin over the sampled controls of -A^theta : P - cost_theta
int argmin_control(const ControlFamily& fam, const Eigen::MatrixXd& P);

} // namespace nsfd
