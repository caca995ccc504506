#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nsfd {

struct CheckResult {
    std::string name;
    bool pass = false;
    double worst = 0; ///< worst margin; sign convention per check, see detail
    std::string detail;
};

std::string to_json(const std::vector<CheckResult>& checks);
bool all_pass(const std::vector<CheckResult>& checks);

/// For each interior side n and entry (i,j): dtilde_ij - dhat_ij assembled
/// with zero data is symmetric positive definite, equals
/// (h_i h_j / 2) dhat_ii dhat_jj entrywise, and orders the three averaged
/// Hessians: -dhat > -dbar > -dtilde in the quadratic-form sense.
std::vector<CheckResult> verify_hessian_lemma(const std::vector<int>& interior_sides);

/// L = -sum a_ij D_i D_j + sum a_ii B_i for constant SPD A: symmetry,
/// L >= lambda0 M, positive definiteness, and agreement with the assembled
/// scheme Jacobian at zero moment weight.
std::vector<CheckResult> verify_spd_L(const std::vector<int>& interior_sides, std::uint64_t seed = 42);

/// ||sigma I - F B|| <= sigma in the F^{-1} weighted operator norm, i.e.
/// ||sigma I - R B R^T||_2 <= sigma, for symmetric nonnegative B and SPD
/// F = R^T R with sigma = (1+eps) lambda_max(R B R^T), eps in {0.01, 1};
/// also checks the spectrum of F B stays within sigma of sigma. Dense
/// spectral norms.
std::vector<CheckResult> verify_symmetrization(const std::vector<int>& sizes, int trials,
                                               std::uint64_t seed = 42);

/// Pseudo-time map contraction on a constant-coefficient linear problem:
/// measured l2 ratios against the spectral radius of I - rho L, including a
/// deliberately oversized rho that must be flagged as expanding.
std::vector<CheckResult> verify_contraction(const std::vector<double>& rho_factors,
                                            std::uint64_t seed = 42);

/// full battery at the default sizes from the acceptance setup
std::vector<CheckResult> run_verification(std::uint64_t seed = 42);

} // namespace nsfd
