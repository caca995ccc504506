#include "nsfd/grid.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace nsfd {

std::string to_string(NodeClass c) {
    switch (c) {
        case NodeClass::interior: return "interior";
        case NodeClass::boundary: return "boundary";
        case NodeClass::sh: return "sh";
        case NodeClass::ghost: return "ghost";
    }
    return "?";
}

Grid build_grid(const Domain& domain, const std::vector<int>& counts) {
    const int d = domain.dim();
    if (d < 1) throw std::invalid_argument("build_grid: empty domain");
    if (static_cast<int>(counts.size()) != d)
        throw std::invalid_argument("build_grid: counts/domain dimension mismatch");
    if (domain.hi.size() != d) throw std::invalid_argument("build_grid: lo/hi dimension mismatch");

    Grid g;
    g.domain = domain;
    g.counts = counts;
    g.dim = d;
    g.h.resize(d);
    std::int64_t nb = 1, next = 1;
    for (int i = 0; i < d; ++i) {
        if (counts[i] < 3) throw std::invalid_argument("build_grid: counts[i] >= 3 required");
        if (!(domain.hi[i] > domain.lo[i]))
            throw std::invalid_argument("build_grid: hi[i] > lo[i] required");
        g.h[i] = (domain.hi[i] - domain.lo[i]) / (counts[i] - 1);
        nb *= counts[i];
        next *= counts[i] + 2;
    }
    g.n_base = static_cast<int>(nb);

    g.ext_strides_.resize(d);
    std::int64_t s = 1;
    for (int i = 0; i < d; ++i) {
        g.ext_strides_[i] = s;
        s *= counts[i] + 2;
    }
    g.ext_to_flat_.assign(static_cast<std::size_t>(next), -1);

    // base nodes in lex order, axis 0 fastest
    g.multi_.reserve(static_cast<std::size_t>(nb + 1) * d);
    std::vector<int> m(d, 1);
    for (int flat = 0; flat < g.n_base; ++flat) {
        std::int64_t key = 0;
        for (int i = 0; i < d; ++i) {
            g.multi_.push_back(m[i]);
            key += static_cast<std::int64_t>(m[i]) * g.ext_strides_[i];
        }
        g.ext_to_flat_[static_cast<std::size_t>(key)] = flat;
        for (int i = 0; i < d; ++i) {
            if (++m[i] <= counts[i]) break;
            m[i] = 1;
        }
    }

    // ghosts: per axis, low face then high, remaining axes in lex order over
    // the interior range (ghosts exist only opposite interior nodes)
    for (int axis = 0; axis < d; ++axis) {
        for (int side = 0; side < 2; ++side) {
            std::vector<int> mm(d, 2);
            mm[axis] = side == 0 ? 0 : counts[axis] + 1;
            bool done = false;
            for (int i = 0; i < d && !done; ++i)
                if (i != axis && counts[i] < 3) done = true; // no interior along i -> no face
            while (!done) {
                std::int64_t key = 0;
                for (int i = 0; i < d; ++i) {
                    g.multi_.push_back(mm[i]);
                    key += static_cast<std::int64_t>(mm[i]) * g.ext_strides_[i];
                }
                g.ext_to_flat_[static_cast<std::size_t>(key)] = static_cast<int>(g.multi_.size() / d) - 1;
                done = true;
                for (int i = 0; i < d; ++i) {
                    if (i == axis) continue;
                    if (++mm[i] <= counts[i] - 1) {
                        done = false;
                        break;
                    }
                    mm[i] = 2;
                }
            }
        }
    }
    g.n_total = static_cast<int>(g.multi_.size() / d);

    // classification
    g.node_class.resize(g.n_total);
    g.interior_index.assign(g.n_total, -1);
    for (int flat = 0; flat < g.n_total; ++flat) {
        if (flat >= g.n_base) {
            g.node_class[flat] = NodeClass::ghost;
            g.ghost_ids.push_back(flat);
            continue;
        }
        bool interior = true, on_face = false;
        for (int i = 0; i < d; ++i) {
            int mi = g.multi(flat, i);
            if (mi == 1 || mi == counts[i]) {
                interior = false;
                on_face = true;
            } else if (mi < 2 || mi > counts[i] - 1) {
                interior = false;
            }
        }
        (void)on_face;
        if (interior) {
            g.interior_index[flat] = static_cast<std::int32_t>(g.interior_ids.size());
            g.interior_ids.push_back(flat);
            g.node_class[flat] = NodeClass::interior;
        } else {
            g.node_class[flat] = NodeClass::boundary;
            g.boundary_ids.push_back(flat);
        }
    }
    // sh: boundary nodes with an interior axis neighbor
    for (std::int32_t b : g.boundary_ids) {
        for (int i = 0; i < d; ++i) {
            int lo = g.neighbor(b, i, -1), hi = g.neighbor(b, i, +1);
            if ((lo >= 0 && g.node_class[lo] == NodeClass::interior) ||
                (hi >= 0 && g.node_class[hi] == NodeClass::interior)) {
                g.node_class[b] = NodeClass::sh;
                g.sh_ids.push_back(b);
                break;
            }
        }
    }
    return g;
}

Grid::GhostAnchor Grid::ghost_anchor(int ghost_flat) const {
    if (node_class[ghost_flat] != NodeClass::ghost)
        throw std::invalid_argument("ghost_anchor: node is not a ghost");
    for (int i = 0; i < dim; ++i) {
        int m = multi(ghost_flat, i);
        if (m == 0 || m == counts[i] + 1) {
            int side = m == 0 ? -1 : +1;
            int face = neighbor(ghost_flat, i, -side);
            int anchor = neighbor(ghost_flat, i, -2 * side);
            return GhostAnchor{i, side, face, anchor};
        }
    }
    throw std::logic_error("ghost_anchor: ghost without a face offset");
}

void dump_grid_csv(const Grid& g, std::ostream& os) {
    os << "flat_id,class";
    const char* names = "xyzw";
    for (int i = 0; i < g.dim; ++i) {
        os << ',';
        if (i < 4) os << names[i];
        else os << 'x' << i;
    }
    os << "\r\n";
    char buf[64];
    for (int flat = 0; flat < g.n_total; ++flat) {
        os << flat << ',' << to_string(g.node_class[flat]);
        for (int i = 0; i < g.dim; ++i) {
            std::snprintf(buf, sizeof buf, "%.9e", g.coord(flat, i));
            os << ',' << buf;
        }
        os << "\r\n";
    }
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(const Eigen::VectorXd&)>& fn,
                                  bool include_ghosts) {
    GridFunction u(g);
    int n = include_ghosts ? g.n_total : g.n_base;
    for (int flat = 0; flat < n; ++flat) u.values[flat] = fn(g.point(flat));
    return u;
}

void dump_solution_csv(const GridFunction& u, std::ostream& os) {
    const Grid& g = *u.grid;
    const char* names = "xyzw";
    for (int i = 0; i < g.dim; ++i) {
        if (i < 4) os << names[i];
        else os << 'x' << i;
        os << ',';
    }
    os << "U\r\n";
    char buf[64];
    for (int flat = 0; flat < g.n_base; ++flat) {
        for (int i = 0; i < g.dim; ++i) {
            std::snprintf(buf, sizeof buf, "%.9e", g.coord(flat, i));
            os << buf << ',';
        }
        std::snprintf(buf, sizeof buf, "%.9e", u.values[flat]);
        os << buf << "\r\n";
    }
}

} // namespace nsfd
