#include "kramers/grid.hpp"

#include <cmath>

namespace kramers {

namespace {

Grid build_grid_1d(const Domain& dom, double dx, BC bc) {
    long ncell = std::lround((dom.b - dom.a) / dx);
    if (ncell + 1 < 8)
        throw TooCoarseError("need at least 8 nodes across the interval");
    double step = (dom.b - dom.a) / static_cast<double>(ncell);

    Grid g;
    g.dim = 1;
    g.bc = bc;
    g.domain = dom;
    g.dx = step;
    long lo = (bc == BC::dirichlet) ? 1 : 0;
    long hi = (bc == BC::dirichlet) ? ncell - 1 : ncell;
    for (long i = lo; i <= hi; ++i) {
        double x = (i == ncell) ? dom.b : dom.a + step * static_cast<double>(i);
        g.nodes.push_back(pt(x));
    }
    int n = g.size();
    for (int i = 0; i + 1 < n; ++i) g.edges.push_back({i, i + 1});
    if (bc == BC::dirichlet) {
        g.cuts.push_back({0, 1.0, pt(dom.a)});
        g.cuts.push_back({n - 1, 1.0, pt(dom.b)});
    }
    return g;
}

// Circle crossing of the lattice edge p -> p + dx*dir, for p inside the disc.
double crossing_fraction(const Pt& p, const Pt& dir, double dx, const Domain& dom) {
    Pt rel = p - dom.center;
    double A = dx * dx;
    double B = 2.0 * dx * dot(rel, dir);
    double E = dot(rel, rel) - dom.radius * dom.radius;
    double disc = B * B - 4.0 * A * E;
    double t = (-B + std::sqrt(std::max(disc, 0.0))) / (2.0 * A);
    return std::min(1.0, std::max(t, 0.0));
}

Grid build_grid_2d(const Domain& dom, double dx, BC bc) {
    if (2.0 * dom.radius / dx < 8.0)
        throw TooCoarseError("need at least 8 nodes across the disc");

    Grid g;
    g.dim = 2;
    g.bc = bc;
    g.domain = dom;
    g.dx = dx;
    double cx = dom.center[0], cy = dom.center[1], rad = dom.radius;
    g.x0 = (cx - rad) - dx;
    g.y0 = (cy - rad) - dx;
    double hx = (cx + rad) + dx, hy = (cy + rad) + dx;
    g.nx = static_cast<int>(std::ceil((hx - g.x0) / dx));
    g.ny = static_cast<int>(std::ceil((hy - g.y0) / dx));
    g.dof.assign(static_cast<size_t>(g.nx) * g.ny, -1);

    double r2 = rad * rad;
    for (int i = 0; i < g.nx; ++i) {
        double x = g.x0 + dx * static_cast<double>(i);
        double tx = x - cx;
        for (int j = 0; j < g.ny; ++j) {
            double y = g.y0 + dx * static_cast<double>(j);
            double ty = y - cy;
            if (tx * tx + ty * ty < r2) {
                g.dof[static_cast<size_t>(i) * g.ny + j] = g.size();
                g.nodes.push_back({x, y});
            }
        }
    }

    static const int DI[4] = {1, 0, -1, 0};
    static const int DJ[4] = {0, 1, 0, -1};
    for (int i = 0; i < g.nx; ++i) {
        for (int j = 0; j < g.ny; ++j) {
            int id = g.dof_at(i, j);
            if (id < 0) continue;
            for (int d = 0; d < 4; ++d) {
                int nb = g.dof_at(i + DI[d], j + DJ[d]);
                if (nb >= 0) {
                    if (d < 2) g.edges.push_back({id, nb});  // each pair once
                } else if (bc == BC::dirichlet) {
                    Pt p = g.nodes[id];
                    Pt dir = {static_cast<double>(DI[d]), static_cast<double>(DJ[d])};
                    double t = crossing_fraction(p, dir, dx, dom);
                    Pt bp = {p[0] + t * dx * dir[0], p[1] + t * dx * dir[1]};
                    g.cuts.push_back({id, std::max(t, 1e-3), bp});
                }
            }
        }
    }
    return g;
}

}  // namespace

Grid build_grid(const Domain& domain, double dx, BC bc) {
    if (!(dx > 0.0)) throw UsageError("grid spacing must be positive");
    return domain.dim == 1 ? build_grid_1d(domain, dx, bc)
                           : build_grid_2d(domain, dx, bc);
}

}  // namespace kramers
