#include "kramers/agmon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace kramers {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

AgmonGraph agmon_graph(const ScalarField& f, const Grid& grid,
                       bool use_diagonals) {
    if (f.dim() != grid.dim)
        throw DimensionError("field/grid dimension mismatch");
    AgmonGraph g;
    g.dim = grid.dim;
    g.xs = grid.nodes;
    int n = (int)g.xs.size();
    g.fvals.resize(n);
    g.gnorm.resize(n);
    for (int i = 0; i < n; ++i) {
        g.fvals[i] = f.value(g.xs[i]);
        g.gnorm[i] = norm2(f.grad(g.xs[i]));
    }

    std::vector<std::pair<int, int>> pairs;
    if (grid.dim == 1) {
        for (const Grid::GridEdge& e : grid.edges) pairs.push_back({e.i, e.j});
    } else {
        const int kNeigh8[8][2] = {{1, 0},  {0, 1},  {1, 1},  {1, -1},
                                   {-1, 0}, {0, -1}, {-1, -1}, {-1, 1}};
        int count = use_diagonals ? 8 : 4;
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i) {
                int a = grid.dof_at(i, j);
                if (a < 0) continue;
                for (int k = 0; k < count; ++k) {
                    int ii = i + kNeigh8[k][0], jj = j + kNeigh8[k][1];
                    if (ii < 0 || jj < 0 || ii >= grid.nx || jj >= grid.ny)
                        continue;
                    int b = grid.dof_at(ii, jj);
                    if (b < 0 || b <= a) continue;
                    pairs.push_back({a, b});
                }
            }
    }

    std::vector<int> degree(n, 0);
    for (auto [a, b] : pairs) {
        ++degree[a];
        ++degree[b];
    }
    g.offsets.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) g.offsets[i + 1] = g.offsets[i] + degree[i];
    g.targets.resize(g.offsets[n]);
    g.weights.resize(g.offsets[n]);
    std::vector<int> cursor(g.offsets.begin(), g.offsets.end() - 1);
    for (auto [a, b] : pairs) {
        double len = norm2(g.xs[a] - g.xs[b]);
        double w = 0.5 * (g.gnorm[a] + g.gnorm[b]) * len;
        g.targets[cursor[a]] = b;
        g.weights[cursor[a]++] = w;
        g.targets[cursor[b]] = a;
        g.weights[cursor[b]++] = w;
    }
    return g;
}

std::vector<double> agmon_distance_field(const AgmonGraph& g,
                                         const std::vector<int>& sources) {
    if (sources.empty()) throw UsageError("empty source set");
    std::vector<double> dist(g.size(), kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (int s : sources) {
        if (s < 0 || s >= g.size()) throw UsageError("source out of range");
        dist[s] = 0.0;
        heap.push({0.0, s});
    }
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (int e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
            int v = g.targets[e];
            double nd = d + g.weights[e];
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.push({nd, v});
            }
        }
    }
    return dist;
}

double agmon_distance(const AgmonGraph& g, const std::vector<int>& sources,
                      const std::vector<int>& targets) {
    if (targets.empty()) throw UsageError("empty target set");
    std::vector<double> dist = agmon_distance_field(g, sources);
    double best = kInf;
    for (int t : targets) {
        if (t < 0 || t >= g.size()) throw UsageError("target out of range");
        best = std::min(best, dist[t]);
    }
    return best;
}

std::vector<std::vector<double>> agmon_all_pairs(const AgmonGraph& g) {
    int n = g.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
    for (int i = 0; i < n; ++i) d[i][i] = 0.0;
    for (int u = 0; u < n; ++u)
        for (int e = g.offsets[u]; e < g.offsets[u + 1]; ++e)
            d[u][g.targets[e]] = std::min(d[u][g.targets[e]], g.weights[e]);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            if (d[i][k] == kInf) continue;
            for (int j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
        }
    return d;
}

void snap_weights(AgmonGraph& g, double quantum) {
    if (quantum <= 0.0) throw UsageError("quantum must be positive");
    for (double& w : g.weights) w = std::round(w / quantum) * quantum;
}

int nearest_node(const AgmonGraph& g, const Pt& x) {
    int best = -1;
    double bd = kInf;
    for (int i = 0; i < g.size(); ++i) {
        double d = norm2(g.xs[i] - x);
        if (d < bd) {
            bd = d;
            best = i;
        }
    }
    return best;
}

AgmonConditionResult check_agmon_condition(const ScalarField& f,
                                           const DomainPair& pair, double dx,
                                           double margin) {
    AgmonConditionResult res;
    const Domain& in = pair.inner;
    CriticalSet cs = find_critical_points(f, in, std::max(dx, in.diameter() / 4000.0));
    res.heuristic = !cs.morse;

    double max_saddle = -kInf, min_min = kInf;
    for (const CriticalPoint& cp : cs.points) {
        if (cp.index == 0) {
            res.minima.push_back(cp.location);
            min_min = std::min(min_min, cp.value);
        } else if (cp.index == 1) {
            res.saddles.push_back(cp.location);
            max_saddle = std::max(max_saddle, cp.value);
        }
    }
    if (res.minima.empty())
        throw EmptyCriticalSetError("no index-0 critical points in the inner domain");
    res.rhs = res.saddles.empty() ? -kInf : max_saddle - min_min;

    Grid grid = build_grid(in, dx, BC::neumann);
    AgmonGraph g = agmon_graph(f, grid, true);

    std::vector<int> sources;
    double edge = in.dim == 1 ? 1.0001 * dx : 1.5 * dx;
    for (int i = 0; i < g.size(); ++i)
        if (in.boundary_clearance(g.xs[i]) <= edge) sources.push_back(i);
    if (sources.empty()) throw UsageError("no boundary nodes at this spacing");

    double gscale = 1.0;
    for (double gn : g.gnorm) gscale = std::max(gscale, gn);
    std::vector<int> targets;
    for (const CriticalPoint& cp : cs.points) {
        if (cp.index != 0) continue;
        if (cp.degenerate) {
            // flat component: nodes inside the inflated extent box; the
            // gradient filter keeps box-enclosed non-flat nodes out
            for (int i = 0; i < g.size(); ++i) {
                if (g.gnorm[i] > 1e-6 * gscale) continue;
                bool inside = true;
                for (int k = 0; k < in.dim; ++k)
                    if (g.xs[i][k] < cp.extent_lo[k] - dx ||
                        g.xs[i][k] > cp.extent_hi[k] + dx)
                        inside = false;
                if (inside) targets.push_back(i);
            }
        } else {
            targets.push_back(nearest_node(g, cp.location));
        }
    }
    res.lhs = agmon_distance(g, sources, targets);
    res.ok = res.lhs > res.rhs + margin;
    return res;
}

}  // namespace kramers
