#include "kramers/witten.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace kramers {

double DiscreteOperator::energy(const Eigen::VectorXd& v) const {
    double acc = 0.0;
    for (const auto& t : eterms) {
        double s = std::exp(0.5 * t.e);
        double d = v[t.i] * s - v[t.j] / s;
        acc += conductance * d * d;
    }
    for (const auto& t : cterms) {
        double s = std::exp(0.5 * t.e);
        double d = v[t.i] * s;
        acc += conductance / t.theta * d * d;
    }
    return acc;
}

Eigen::VectorXd DiscreteOperator::gibbs_half_weight() const {
    Eigen::VectorXd v(static_cast<long>(fshift.size()));
    for (size_t i = 0; i < fshift.size(); ++i) v[i] = std::exp(-fshift[i] / h);
    return v;
}

DiscreteOperator assemble_witten0(const ScalarField& f, const Grid& grid, double h) {
    if (!(h > 0.0)) throw UsageError("h must be positive");
    if (f.dim() != grid.dim)
        throw DimensionError("field and grid dimension mismatch");

    int n = grid.size();
    DiscreteOperator op;
    op.h = h;
    op.bc = grid.bc;
    op.dim = grid.dim;
    op.dx = grid.dx;
    op.conductance = h * h / (grid.dx * grid.dx);

    op.fshift.resize(n);
    double fmin = std::numeric_limits<double>::infinity();
    double gmax = 0.0;
    for (int i = 0; i < n; ++i) {
        op.fshift[i] = f.value(grid.nodes[i]);
        fmin = std::min(fmin, op.fshift[i]);
        gmax = std::max(gmax, norm2(f.grad(grid.nodes[i])));
    }
    op.fmin = fmin;
    for (int i = 0; i < n; ++i) op.fshift[i] -= fmin;
    op.grad_max = gmax;
    op.mesh_warning = grid.dx > h / (2.0 * std::max(gmax, 1e-300));

    double c = op.conductance;
    std::vector<double> diag(n, 0.0);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(2 * grid.edges.size() + n);

    op.eterms.reserve(grid.edges.size());
    for (const auto& ed : grid.edges) {
        double e = (op.fshift[ed.i] - op.fshift[ed.j]) / h;
        if (std::abs(e) > 709.0)
            throw OverflowError("edge exponent exceeds double range; refine dx or raise h");
        diag[ed.i] += c * std::exp(e);
        diag[ed.j] += c * std::exp(-e);
        trip.emplace_back(ed.i, ed.j, -c);
        trip.emplace_back(ed.j, ed.i, -c);
        op.eterms.push_back({ed.i, ed.j, e});
    }
    op.cterms.reserve(grid.cuts.size());
    for (const auto& cu : grid.cuts) {
        double fb = f.value(cu.bpoint) - fmin;
        double e = (op.fshift[cu.node] - fb) / h;
        if (std::abs(e) > 709.0)
            throw OverflowError("boundary exponent exceeds double range");
        diag[cu.node] += c / cu.theta * std::exp(e);
        op.cterms.push_back({cu.node, e, cu.theta});
    }
    for (int i = 0; i < n; ++i) trip.emplace_back(i, i, diag[i]);

    op.A.resize(n, n);
    op.A.setFromTriplets(trip.begin(), trip.end());

    std::vector<double> rowsum(n, 0.0);
    for (int k = 0; k < op.A.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(op.A, k); it; ++it)
            rowsum[it.row()] += std::abs(it.value());
    op.anorm_inf = *std::max_element(rowsum.begin(), rowsum.end());
    return op;
}

DiscreteOperator assemble_witten1_1d(const FieldPtr& f, const Domain& dom,
                                     double dx, double h, BC bc) {
    if (f->dim() != 1 || dom.dim != 1)
        throw DimensionError("1-form duality assembly is one-dimensional only");
    BC swapped = (bc == BC::neumann) ? BC::dirichlet : BC::neumann;
    Grid g = build_grid(dom, dx, swapped);
    NegatedField nf(f);
    DiscreteOperator op = assemble_witten0(nf, g, h);
    op.bc = bc;
    op.form_degree = 1;
    return op;
}

}  // namespace kramers
