#pragma once

#include <vector>

#include "kramers/core.hpp"
#include "kramers/domain.hpp"
#include "kramers/field.hpp"

namespace kramers {

enum class PointKind { interior, boundary };

// A critical point of f, or one flat critical component collapsed to a
// representative. Boundary entries describe critical points of f restricted
// to the domain boundary, annotated with the normal derivative.
struct CriticalPoint {
    Pt location = pt(0.0);
    double value = 0.0;
    // interior: negative-eigenvalue count of the Hessian.
    // boundary: restriction index + 1 when dnf > 0 (Dirichlet-generalized),
    //           restriction index when dnf <= 0 (Neumann-generalized).
    int index = 0;
    // interior: det of the Hessian. boundary: second derivative of f along
    // the boundary in arc length (1 in 1D, the empty product).
    double hessian_det = 0.0;
    PointKind kind = PointKind::interior;
    bool degenerate = false;
    // bounding box of the flat component; equals location for plain points
    Pt extent_lo = pt(0.0);
    Pt extent_hi = pt(0.0);
    // boundary entries only
    double normal_derivative = 0.0;
    double boundary_coord = 0.0;
    int restriction_index = 0;
};

struct CriticalSet {
    std::vector<CriticalPoint> points;  // sorted by value
    bool morse = true;
};

// Newton refinement from grid seeds at the given spacing; duplicates merged
// within radius 2*spacing; flat regions (|grad| and Hessian both below
// tolerance on a connected seed set) returned as one degenerate record.
// tol_grad <= 0 selects 1e-8 times the sampled gradient scale.
CriticalSet find_critical_points(const ScalarField& f, const Domain& dom,
                                 double spacing, double tol_grad = 0.0);

// Critical points of f restricted to the boundary. 1D: both endpoints.
// 2D: 4096-sample angular scan polished by Newton; a constant restriction
// yields a single degenerate representative.
std::vector<CriticalPoint> boundary_critical_points(const ScalarField& f,
                                                    const Domain& dom);

// The subset with restriction index 0 (local minima of f on the boundary).
std::vector<CriticalPoint> boundary_minima(const ScalarField& f,
                                           const Domain& dom);

double min_boundary_value(const ScalarField& f, const Domain& dom);

// min over the boundary minus min over the domain (grid scan refined by the
// critical minima).
double kappa(const ScalarField& f, const Domain& omega_plus, double spacing);

// max critical value among interior critical points/components.
// Throws EmptyCriticalSetError when none are found.
double cvmax(const ScalarField& f, const Domain& omega_minus, double spacing);

}  // namespace kramers
