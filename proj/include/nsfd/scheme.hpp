#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "nsfd/fd_ops.hpp"
#include "nsfd/problem.hpp"

namespace nsfd {

/// Moment configuration: the scheme adds (W + gamma I + sigma 11^T) :
/// (dtilde - dhat) to F evaluated on the averaged operators, where W is
/// |dF/dP|/2 at the current state (auto_weight) or a caller-supplied constant
/// matrix (fixed). sigma >= 0 and gamma + sigma >= 0 keep the scheme
/// g-monotone; allow_unsafe waives the check for negative-control tests.
struct SchemeParams {
    double gamma = 0.0;
    double sigma = 0.0;
    enum class MomentMode { auto_weight, fixed } mode = MomentMode::auto_weight;
    Eigen::MatrixXd fixed_weight;
    bool allow_unsafe = false;
};

/// Throws std::invalid_argument on violated monotonicity constraints or a
/// malformed fixed weight.
void validate(const SchemeParams& sp, int dim);

/// Writes problem.g onto the boundary nodes, then fills ghosts through the
/// auxiliary condition.
void impose_boundary(GridFunction& u, const ProblemDef& prob);

/// Scheme value at one interior node; u must carry boundary and ghost values
/// (impose_boundary). For Bellman problems the per-control upwinding weight
/// sits inside the min and argmin_out (when non-null) receives the selected
/// control index, -1 for plain problems.
double eval_Fhat(const GridFunction& u, const ProblemDef& prob, const SchemeParams& sp, int node,
                 int* argmin_out = nullptr);

/// Residual over interior nodes, ordered like grid.interior_ids.
Eigen::VectorXd assemble_residual(const ProblemDef& prob, const SchemeParams& sp, const GridFunction& u,
                                  int threads = 1);

/// Jacobian of the residual with the moment weight (and, for Bellman
/// problems, the argmin control) frozen at the current state. Row sparsity
/// is bounded by the 13-point union stencil in d=2.
SparseOperator assemble_jacobian(const ProblemDef& prob, const SchemeParams& sp, const GridFunction& u,
                                 int threads = 1);

// ---- audits ---------------------------------------------------------------

/// The scheme as a function of the four one-sided Hessian slots, in the
/// order D^{--}, D^{-+}, D^{+-}, D^{++} (letters = inner, outer signs).
/// Injectable so tests can aim the audits at corrupted variants.
using SlotEvaluator =
    std::function<double(const Eigen::MatrixXd& pmm, const Eigen::MatrixXd& pmp, const Eigen::MatrixXd& ppm,
                         const Eigen::MatrixXd& ppp, const Eigen::VectorXd& q, double v, const Eigen::VectorXd& x)>;

SlotEvaluator make_slot_evaluator(const ProblemDef& prob, const SchemeParams& sp);

struct AuditReport {
    std::string name;
    bool pass = false;
    double worst = 0.0; ///< largest violation, 0 when clean
    double tolerance = 0.0;
    int samples = 0;
    std::string detail;
};

std::string to_text(const AuditReport& r);
std::string to_json(const AuditReport& r);

/// F_hat(P,P,P,P,q,v,x) = F(P,q,v,x) on random quadratics sampled onto the
/// extended grid (ghosts carry exact samples). Tolerance 1e-10.
AuditReport audit_consistency(const Grid& g, const ProblemDef& prob, const SchemeParams& sp, int n_samples,
                              std::uint64_t seed, const SlotEvaluator* eval = nullptr);

/// Slot monotonicity at the states carried by u: nondecreasing in the tilde
/// slots (D^{--}, D^{++}), nonincreasing in the hat slots (D^{-+}, D^{+-}).
/// Centered differences with step 1e-6 (1+|entry|), tolerance 1e-8. The auto
/// moment weight is held at each node's base state, the lagged form the
/// solver iterates.
AuditReport audit_gmonotonicity(const Grid& g, const ProblemDef& prob, const SchemeParams& sp,
                                const GridFunction& u, int max_nodes, std::uint64_t seed,
                                const SlotEvaluator* eval = nullptr);

/// Invariance under slot perturbations that keep the hat and tilde averages
/// fixed. Tolerance 1e-12.
AuditReport audit_reduced_form(const Grid& g, const ProblemDef& prob, const SchemeParams& sp,
                               const GridFunction& u, int max_nodes, std::uint64_t seed,
                               const SlotEvaluator* eval = nullptr);

/// dF_hat/dPtilde + dF_hat/dPhat <= -lambda I at the states carried by u,
/// lambda from the problem metadata, with the auto moment weight held at
/// each node's base state (the weight contributions then cancel exactly
/// between the two slots). States are sampled away from the auxiliary
/// boundary layer (full +-2 stencil inside the base grid) whenever such
/// nodes exist, since layer-polluted Hessians are not representative.
AuditReport audit_elliptic_compat(const Grid& g, const ProblemDef& prob, const SchemeParams& sp,
                                  const GridFunction& u, int max_nodes, std::uint64_t seed,
                                  const SlotEvaluator* eval = nullptr);

} // namespace nsfd
