#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kramers/field.hpp"
#include "kramers/grid.hpp"

namespace kramers {

// Exponential-fitted discretization of the 0-form operator
// -h^2 Lap u + (|grad f|^2 - h Lap f) u on a grid. Symmetric and PSD by
// construction; with Neumann closure the vector e^{-f_i/h} is an exact kernel.
struct DiscreteOperator {
    Eigen::SparseMatrix<double> A;
    double h = 0.0;
    double conductance = 0.0;  // h^2/dx^2
    BC bc = BC::neumann;
    int form_degree = 0;
    int dim = 1;
    double dx = 0.0;
    double fmin = 0.0;            // subtracted from f before exponentials
    std::vector<double> fshift;   // f - fmin at the nodes
    double anorm_inf = 0.0;
    double grad_max = 0.0;        // max |grad f| over nodes
    bool mesh_warning = false;    // dx > h / (2 max|grad f|)

    struct EdgeTerm {
        int i, j;
        double e;  // (f_i - f_j)/h
    };
    struct CutTerm {
        int i;
        double e;  // (f_i - f_bnd)/h
        double theta;
    };
    std::vector<EdgeTerm> eterms;
    std::vector<CutTerm> cterms;

    // v^T A v summed edge by edge as c (v_i s - v_j / s)^2, s = e^{e/2}:
    // no cancellation, so exponentially small Rayleigh quotients keep their
    // leading digits (and stay nonnegative).
    double energy(const Eigen::VectorXd& v) const;

    // e^{-(f_i - fmin)/h}; exact Neumann kernel direction.
    Eigen::VectorXd gibbs_half_weight() const;
};

DiscreteOperator assemble_witten0(const ScalarField& f, const Grid& grid, double h);

// 1-form operator on an interval, realized through the f -> -f duality with
// swapped boundary condition. `bc` is the 1-form condition being requested.
DiscreteOperator assemble_witten1_1d(const FieldPtr& f, const Domain& dom,
                                     double dx, double h, BC bc);

}  // namespace kramers
