#pragma once

#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "nsfd/grid.hpp"

namespace nsfd {

enum class Diff1Mode { forward, backward, central };

/// One-sided and averaged discrete Hessians at a node. Entry (i,j) of dpm is
/// the mixed difference with the inner first difference forward (+) along
/// axis i and the outer difference backward (-) along axis j; the letters
/// name (inner, outer) signs in that order. Derived members:
///   dhat   = (dpm + dmp)/2   narrow diagonal, second-order mixed
///   dtilde = (dpp + dmm)/2   wide diagonal (+-2h arms on the diagonal)
///   dbar   = (dhat + dtilde)/2, whose diagonal equals the 2h-spaced central
///            second difference and whose off-diagonal equals the tensored
///            central first differences.
struct HessianBundle {
    Eigen::MatrixXd dpp, dpm, dmp, dmm;
    Eigen::MatrixXd dhat, dtilde, dbar;
};

/// First difference along one axis. Requires the +-1 neighbors used by the
/// mode to exist (interior nodes and sh nodes along their interior axis).
double diff1(const GridFunction& u, int node, int axis, Diff1Mode mode);

/// Central gradient at an interior node.
Eigen::VectorXd grad_central(const GridFunction& u, int node);

/// All seven Hessian operators at an interior node. Requires u to carry
/// values on the full stencil: +-1 box neighbors and +-2 axis arms (ghosts
/// included near the boundary).
HessianBundle hessian_bundle(const GridFunction& u, int node);

/// w : (dtilde - dhat), the numerical-moment bilinear term.
double moment(const HessianBundle& b, const Eigen::MatrixXd& w);

/// {h-spaced, 2h-spaced} discrete Laplacians at a node. The h-spaced form is
/// also defined at sh nodes (their axis neighbors exist on the base grid or
/// as ghosts); the 2h-spaced slot is NaN wherever a +-2 arm leaves the
/// extended grid.
std::pair<double, double> discrete_laplacians(const GridFunction& u, int node);

/// Overwrites ghost values so the h-spaced Laplacian vanishes at every sh
/// node, reading the current base-grid values:
///   u_ghost = 2 u_face - u_anchor - h_i^2 sum_{j != axis} d2_j u_face.
void fill_ghosts(GridFunction& u);

/// Triplet-buffered sparse matrix with an explicit finalize step; duplicate
/// entries are summed on finalize.
class SparseOperator {
public:
    SparseOperator(int rows, int cols) : rows_(rows), cols_(cols) {}

    void add(int r, int c, double v);
    void finalize();
    bool finalized() const { return finalized_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Eigen::SparseMatrix<double>& matrix() const;
    int max_row_nnz() const;
    /// coordinate-format MatrixMarket dump
    void write_matrix_market(std::ostream& os) const;

private:
    int rows_, cols_;
    bool finalized_ = false;
    std::vector<Eigen::Triplet<double>> pending_;
    Eigen::SparseMatrix<double> mat_;
};

/// One linear-combination term over extended flat ids.
struct StencilTerm {
    std::int32_t id;
    double c;
};
using Stencil = std::vector<StencilTerm>;

/// Raw stencils at an interior node, over extended ids (ghosts kept).
Stencil stencil_diff1(const Grid& g, int node, int axis, Diff1Mode mode);
/// spacing-scaled central second difference along one axis, spacing in {1,2}
Stencil stencil_second(const Grid& g, int node, int axis, int spacing);
/// D^{mu nu}_{ij}: inner sign mu along axis i, outer sign nu along axis j
Stencil stencil_onesided(const Grid& g, int node, int i, int j, int mu, int nu);

enum class HessianKind { hat, tilde, bar };
Stencil stencil_hessian(const Grid& g, int node, int i, int j, HessianKind kind);

/// Dirichlet/auxiliary elimination of a raw stencil: boundary ids turn into
/// data (dropped, or accumulated through gfun when given), ghost ids fold
/// onto their interior anchor with coefficient -1 plus data from the face
/// values. Returns interior-only terms and the accumulated data constant.
struct EliminatedRow {
    std::vector<StencilTerm> cols; ///< ids are interior flat ids
    double data = 0.0;
};
EliminatedRow eliminate(const Grid& g, const Stencil& s,
                        const std::function<double(const Eigen::VectorXd&)>* gfun = nullptr);

/// Matrix of the central first difference over interior unknowns with zero
/// boundary data; antisymmetric for every axis.
SparseOperator assemble_first_central(const Grid& g, int axis);

/// Matrix of the spacing-scaled second difference over interior unknowns,
/// zero Dirichlet data, ghosts eliminated through the auxiliary condition.
SparseOperator assemble_second(const Grid& g, int axis, int spacing);

/// M = sum_i rep(-d2_{2h,i}) and the per-axis diagonal remainders
/// B_i = rep(-d2_{2h,i}) + D_i D_i, so M + sum_i D_i D_i = sum_i B_i.
/// Throws if a B_i comes out non-diagonal or with a negative entry.
struct WideLaplacian {
    SparseOperator M;
    std::vector<Eigen::VectorXd> B;
};
WideLaplacian assemble_wide_laplacian(const Grid& g);

/// Matrix of the (i,j) entry of the selected averaged Hessian over interior
/// unknowns with zero data.
SparseOperator assemble_hessian_block(const Grid& g, int i, int j, HessianKind kind);

} // namespace nsfd
