#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsfd/problem.hpp"
#include "nsfd/scheme.hpp"
#include "nsfd/solver.hpp"

namespace nsfd {

/// max over base-grid nodes (interior and boundary) of |U - exact|
double linf_error(const GridFunction& u, const ScalarField& exact);

enum class OrderBasis { axis, diag };

struct ConvergenceRow {
    double h_axis = 0;
    double h_diag = 0;
    double error_linf = 0;
    std::optional<double> order;
    bool solved = false;
    std::string note;
};

struct ConvergenceTable {
    std::string problem;
    std::string params;
    OrderBasis basis = OrderBasis::diag;
    std::vector<ConvergenceRow> rows;
};

struct ConvergenceRun {
    std::vector<int> sides;                  ///< total nodes per side, boundary included
    std::vector<ContinuationStage> schedule; ///< empty: single stage at the given params
    OrderBasis basis = OrderBasis::diag;
    SolveConfig solve;
};

/// fills the order column from consecutive solved rows
void compute_orders(ConvergenceTable& t);

ConvergenceTable run_convergence(const ProblemDef& prob, const SchemeParams& params,
                                 const ConvergenceRun& run);

/// one table per schedule stage; within each mesh later stages warm-start
/// from earlier ones
std::vector<ConvergenceTable> run_convergence_stages(const ProblemDef& prob, const SchemeParams& params,
                                                     const ConvergenceRun& run);

/// header "h_axis,h_diag,error_linf,order"; empty order cell when undefined
std::string to_csv(const ConvergenceTable& t);
void write_csv(const ConvergenceTable& t, const std::string& path);

} // namespace nsfd
