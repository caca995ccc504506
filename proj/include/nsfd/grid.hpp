#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace nsfd {

/// Axis-aligned box (lo[i], hi[i]).
struct Domain {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    int dim() const { return static_cast<int>(lo.size()); }
};

/// Node roles on the extended grid. "sh" marks boundary nodes that carry an
/// auxiliary equation: they have an interior neighbor along some axis and a
/// ghost mirror opposite it. Corners stay plain "boundary".
enum class NodeClass : std::uint8_t { interior, boundary, sh, ghost };

std::string to_string(NodeClass c);

/// Uniform Cartesian grid with counts[i] nodes along axis i (boundary
/// included), extended by the one ghost layer reachable through the +-2h
/// stencil arms of interior nodes. Ghost layers carry no corner nodes.
///
/// Flat ids: base nodes first in lexicographic order with axis 0 fastest,
/// then ghosts appended per axis, low side before high, face nodes in
/// lexicographic order of the remaining axes.
///
/// Extended multi-index: m[i] in [0, counts[i]+1]; the base grid occupies
/// 1..counts[i] and matches the usual 1-based stencil indexing, so
/// coord = lo[i] + (m[i]-1)*h[i].
class Grid {
public:
    Domain domain;
    std::vector<int> counts;
    Eigen::VectorXd h;
    int dim = 0;
    int n_base = 0;  ///< prod(counts)
    int n_total = 0; ///< base + ghosts

    std::vector<NodeClass> node_class;       ///< by flat id
    std::vector<std::int32_t> interior_ids;
    std::vector<std::int32_t> boundary_ids;  ///< includes sh nodes
    std::vector<std::int32_t> sh_ids;
    std::vector<std::int32_t> ghost_ids;
    std::vector<std::int32_t> interior_index; ///< flat -> rank in interior_ids, -1 otherwise

    int multi(int flat, int axis) const { return multi_[static_cast<std::size_t>(flat) * dim + axis]; }

    double coord(int flat, int axis) const {
        return domain.lo[axis] + (multi(flat, axis) - 1) * h[axis];
    }

    Eigen::VectorXd point(int flat) const {
        Eigen::VectorXd x(dim);
        for (int i = 0; i < dim; ++i) x[i] = coord(flat, i);
        return x;
    }

    /// Flat id of the node `step` cells away along `axis`, or -1 when the
    /// extended grid has no node there.
    int neighbor(int flat, int axis, int step) const {
        int m = multi(flat, axis) + step;
        if (m < 0 || m > counts[axis] + 1) return -1;
        std::int64_t key = 0;
        for (int i = 0; i < dim; ++i)
            key += static_cast<std::int64_t>(i == axis ? m : multi(flat, i)) * ext_strides_[i];
        return ext_to_flat_[static_cast<std::size_t>(key)];
    }

    bool is_interior(int flat) const { return node_class[flat] == NodeClass::interior; }
    bool is_ghost(int flat) const { return node_class[flat] == NodeClass::ghost; }
    bool is_boundary(int flat) const {
        return node_class[flat] == NodeClass::boundary || node_class[flat] == NodeClass::sh;
    }

    /// For a ghost node: the face (sh) node it mirrors across and the
    /// interior anchor two steps in. axis/side tell which face.
    struct GhostAnchor {
        int axis;
        int side; ///< -1 low face, +1 high face
        int face; ///< flat id of the sh node
        int anchor; ///< flat id of the interior node opposite the ghost
    };
    GhostAnchor ghost_anchor(int ghost_flat) const;

    friend Grid build_grid(const Domain& domain, const std::vector<int>& counts);

private:
    std::vector<std::int32_t> multi_;       ///< n_total x dim
    std::vector<std::int64_t> ext_strides_; ///< strides over the (counts+2)^d index box
    std::vector<std::int32_t> ext_to_flat_; ///< -1 where the extended grid has no node
};

/// Validates and constructs the grid with node classification baked in.
/// Throws std::invalid_argument on dimension mismatch, counts[i] < 3, or a
/// degenerate box.
Grid build_grid(const Domain& domain, const std::vector<int>& counts);

/// CSV dump: flat_id,class,x,y[,z...] over every node including ghosts.
void dump_grid_csv(const Grid& g, std::ostream& os);

/// Values over the extended node set of one grid.
struct GridFunction {
    const Grid* grid = nullptr;
    Eigen::VectorXd values;

    GridFunction() = default;
    explicit GridFunction(const Grid& g) : grid(&g), values(Eigen::VectorXd::Zero(g.n_total)) {}

    double& operator[](int flat) { return values[flat]; }
    double operator[](int flat) const { return values[flat]; }

    /// Samples fn over the base nodes (and the ghost layer too when
    /// include_ghosts is set; otherwise ghosts stay zero).
    static GridFunction sample(const Grid& g, const std::function<double(const Eigen::VectorXd&)>& fn,
                               bool include_ghosts = false);
};

/// Solution dump over base nodes: x,y[,z...],U rows in flat order.
void dump_solution_csv(const GridFunction& u, std::ostream& os);

} // namespace nsfd
