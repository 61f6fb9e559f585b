#pragma once

#include <vector>

#include "kramers/witten.hpp"

namespace kramers {

// Smallest eigenpairs, ascending. Columns of `vectors` are normalized in the
// uniform grid inner product sum_i v_i^2 dx^dim = 1 and sign-fixed so the
// entry of largest magnitude is positive. `residuals` are ||A v - lambda v||_2
// for the unit-Euclidean vectors.
struct SpectralResult {
    std::vector<double> eigenvalues;
    Eigen::MatrixXd vectors;
    std::vector<double> residuals;
    double h = 0.0;
    BC bc = BC::neumann;
    int form_degree = 0;
    int dim = 1;
    double dx = 0.0;
};

SpectralResult smallest_eigenpairs(const DiscreteOperator& op, int k);

// Number of eigenvalues <= nu. Grows the computed window until one exceeds
// nu; InconclusiveError if the whole spectrum fits under nu.
int count_small(const DiscreteOperator& op, double nu);

// Quasi-stationary density u_1 e^{-f/h} on the nodes, normalized to unit
// trapezoid integral. SignError if u_1 changes sign beyond roundoff.
std::vector<double> qsd_density(const DiscreteOperator& op, const Grid& grid,
                                const SpectralResult& sr);

// Law of the exit location: two point masses in 1D (locations 0 and 1 in
// boundary coordinates), a sampled density over the boundary angle in 2D.
struct BoundaryDensity {
    std::vector<double> locations;  // boundary coordinate of each sample/atom
    std::vector<double> values;     // atom masses (1D) or density values (2D)
    bool atoms = true;
    double measure_step = 1.0;  // arc length per sample in 2D
    double mass(int k) const { return atoms ? values[k] : values[k] * measure_step; }
};

BoundaryDensity exit_density_pde(const DiscreteOperator& op, const Grid& grid,
                                 const SpectralResult& sr);

// Jump rate of the exit event generator at inverse temperature beta = 2/h.
inline double generator_rate(double lambda1, double h) { return lambda1 / (2.0 * h); }

// Total variation between two densities on the same boundary layout.
double boundary_tv(const BoundaryDensity& p, const BoundaryDensity& q);

}  // namespace kramers
