#pragma once

#include <vector>

#include "kramers/core.hpp"
#include "kramers/critical.hpp"
#include "kramers/domain.hpp"
#include "kramers/field.hpp"
#include "kramers/spectra.hpp"

namespace kramers {

enum class IntegralMethod { quadrature, hessian };
enum class RateMethod { flux, hessian };
enum class DensityForm { flux, gaussian_mixture };

// Integral of e^{-2(f - fshift)/h} over the domain, with fshift = min f on
// the evaluation set so the stored value is overflow-safe. The quadrature
// method also carries the two-sided bracket
//   h^{d/2} / C_f <= value <= Vol(domain), C_f = 2 (K/pi)^{d/2},
// K = max Hessian eigenvalue over the grid clamped >= 1.
struct VolumeIntegral {
    double value = 0.0;
    double fshift = 0.0;
    double lower = 0.0, upper = 0.0;
    bool within_bracket = true;
};

// dx is the quadrature grid step; spacing seeds critical-point search for the
// hessian method (<= 0 selects diameter/400).
VolumeIntegral laplace_volume_integral(const ScalarField& f, const Domain& dom,
                                       double h, IntegralMethod method,
                                       double dx, double spacing = 0.0);

// Integral of 2 dnf e^{-2(f - fshift)/h} over the boundary. quadrature:
// two-term sum in 1D, 4096-sample arc trapezoid in 2D. hessian: Laplace sum
// over the local minima of f on the boundary with the (pi h)^{(d-1)/2} and
// 1/sqrt(boundary Hessian) factors (both 1 in 1D).
double boundary_flux_integral(const ScalarField& f, const Domain& dom,
                              double h, IntegralMethod method, double fshift);

// Leading-order exit rate on omega_plus. flux: h * (boundary flux
// integral)/(volume integral), both by quadrature on a grid of step dx.
// hessian: h times the ratio of the Laplace sums, summed over all boundary
// minima and all interior minima (reduces to the single-minimum formula when
// the interior minimum is unique).
double lambda1_asymptotic(const ScalarField& f, const Domain& omega_plus,
                          double h, RateMethod method, double dx,
                          double spacing = 0.0);

// Exit-location density at leading order. flux: normalized profile
// 2 dnf e^{-2 f/h} on the boundary. gaussian_mixture: one Gaussian per
// boundary minimum with variance h/(2 * tangential Hessian), truncated at
// six standard deviations, weights from the Laplace flux terms.
BoundaryDensity exit_density_asymptotic(const ScalarField& f,
                                        const Domain& omega_plus, double h,
                                        DensityForm form, double spacing = 0.0);

// B = (integral of e^{-2f/h} over omega_plus) / (same for f + delta_f).
// SupportViolationError if delta_f is nonzero outside the inner domain.
double boost_factor(const ScalarField& f, const ScalarField& delta_f,
                    const DomainPair& pair, double h, double dx);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;  // the h -> 0 extrapolation of h log lambda1
    double r2 = 0.0;
};

// Affine least squares of y = h log lambda1 against h.
// IllConditionedError for fewer than 3 points or an h span under x1.5.
SlopeFit slope_fit(const std::vector<double>& hs,
                   const std::vector<double>& lambda1s);

}  // namespace kramers
