#pragma once

#include <vector>

#include "kramers/domain.hpp"

namespace kramers {

enum class BC { neumann, dirichlet };

// Uniform lattice restricted to a domain. 1D nodes are a linspace over [a,b]
// (Dirichlet drops the endpoints); 2D nodes are the strict-interior points of
// a square lattice that pads the disc by one cell on each side.
struct Grid {
    int dim = 1;
    BC bc = BC::neumann;
    Domain domain;
    double dx = 0.0;
    std::vector<Pt> nodes;

    struct GridEdge {
        int i, j;
    };
    std::vector<GridEdge> edges;  // axis-aligned neighbor pairs, i < j

    // Dirichlet closures: active node, fraction of dx to the true boundary
    // (clamped >= 1e-3), and the boundary point itself.
    struct Cut {
        int node;
        double theta;
        Pt bpoint;
    };
    std::vector<Cut> cuts;

    // 2D lattice bookkeeping (node id or -1 per lattice cell, row-major in i).
    int nx = 0, ny = 0;
    double x0 = 0.0, y0 = 0.0;
    std::vector<int> dof;

    int size() const { return static_cast<int>(nodes.size()); }
    int dof_at(int i, int j) const {
        if (i < 0 || j < 0 || i >= nx || j >= ny) return -1;
        return dof[static_cast<size_t>(i) * ny + j];
    }
};

Grid build_grid(const Domain& domain, double dx, BC bc);

}  // namespace kramers
