#pragma once

#include <string>
#include <vector>

#include "nsfd/problem.hpp"
#include "nsfd/scheme.hpp"

namespace nsfd {

enum class SolveMethod { linear_direct, newton, pseudo_time };
enum class Damping { none, backtracking };
enum class InitialGuess { zero, given, previous_stage };

struct ContinuationStage {
    double gamma = 0;
    double sigma = 0;

    bool operator==(const ContinuationStage&) const = default;
};

struct SolveConfig {
    SolveMethod method = SolveMethod::newton;
    /// residual tolerance at (gamma, sigma) = (0, 0); internally scaled by
    /// 1 + |gamma| + 2|sigma| to track the size of the assembled coefficients
    double newton_tol = 1e-10;
    int newton_max_iter = 100;
    Damping damping = Damping::backtracking;
    double rho = 0;
    int max_sweeps = 200000;
    std::vector<ContinuationStage> continuation;
    InitialGuess initial_guess = InitialGuess::zero;
    int threads = 1;
    bool verbose = false;
};

void validate(const SolveConfig& cfg);

struct StageRecord {
    double gamma = 0;
    double sigma = 0;
    int iterations = 0;
    double residual_linf = 0;
    bool converged = false;
    std::string failure;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    double final_residual_linf = 0;
    std::vector<StageRecord> stage_history;
    double wall_time = 0;
    double contraction_ratio = 0;
    std::string failure;
};

std::string to_json(const SolveReport& r);

/// one-shot assembled linear solve for problems affine in (P, q, v);
/// sparse LU, or conjugate gradient when the matrix is symmetric
SolveReport solve_linear(const ProblemDef& prob, const SchemeParams& sp, GridFunction& u,
                         const SolveConfig& cfg = {});

/// damped Newton with the analytic sparse Jacobian; on failure reports
/// converged=false and leaves the best iterate in u
SolveReport solve_newton(const ProblemDef& prob, const SchemeParams& sp, GridFunction& u,
                         const SolveConfig& cfg = {});

/// forward Euler pseudo-time sweeps U <- U - rho residual(U)
SolveReport solve_pseudo_time(const ProblemDef& prob, const SchemeParams& sp, GridFunction& u,
                              const SolveConfig& cfg = {});

/// stagewise solve along a (gamma, sigma) schedule, each stage warm-started
/// from the previous converged iterate
SolveReport solve_continuation(const ProblemDef& prob, const SchemeParams& base,
                               const std::vector<ContinuationStage>& schedule, GridFunction& u,
                               const SolveConfig& cfg = {});

/// ramp schedule ending at (target_gamma, target_sigma): gamma stages
/// {1000,100,10,1} for control problems, sigma stages with gamma = -sigma
/// otherwise
std::vector<ContinuationStage> default_schedule(const ProblemDef& prob, double target_gamma = 0,
                                                double target_sigma = 0);

/// crude stability bound for the pseudo-time step from power iteration on
/// the Jacobian at the given state
double estimate_rho(const ProblemDef& prob, const SchemeParams& sp, const GridFunction& u, int iters = 30);

struct PointwiseMin {
    double value = 0;
    int argmin = -1;
};

/// enumerates the sampled controls at one node, returning the minimal
/// upwinded objective and the first minimizing control
PointwiseMin hjb_pointwise_min(const GridFunction& u, int node, const ControlFamily& fam);

} // namespace nsfd
