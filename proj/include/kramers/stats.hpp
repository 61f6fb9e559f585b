#pragma once

#include <vector>

#include "kramers/core.hpp"

namespace kramers {

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
    double n_effective = 0.0;
};

// Survival function of the Kolmogorov distribution at t. Callers pass
// t = (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D for the finite-size correction.
double kolmogorov_p(double t);

// One-sample KS of taus against Exp(rate). TooFewSamplesError under 50
// samples, UsageError for rate <= 0 or a nonpositive sample.
KsResult ks_exponential(const std::vector<double>& taus, double rate);

// Two-sample KS with n_effective = n1 n2 / (n1 + n2). TooFewSamplesError if
// either sample has fewer than 50 points.
KsResult ks_two_sample(const std::vector<double>& a,
                       const std::vector<double>& b);

// Regularized upper incomplete gamma Q(a, x): power series for x < a + 1,
// Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

inline double chi2_sf(double x, int dof) {
    return regularized_gamma_q(0.5 * dof, 0.5 * x);
}

struct Chi2Result {
    double statistic = 0.0;
    double p_value = 0.0;
    int dof = 0;
    int tau_bins = 0;  // binning that was actually used, after merges
    int loc_bins = 0;
};

// Chi-square independence test on the tau-quantile x exit-location table.
// Location bins: one category per distinct value when there are at most 8
// (the 1D two-endpoint case), quantile bins otherwise; loc_bins > 0 forces
// quantile binning. Bins are merged down to 2x2 until every expected count
// reaches 5; SparseTableError if none of the binnings is dense enough.
Chi2Result chi2_independence(const std::vector<double>& tau,
                             const std::vector<double>& loc, int tau_bins = 4,
                             int loc_bins = 0);

// Total variation between the empirical laws of a and b on `bins` equal
// cells of [lo, hi]; values outside clamp to the end cells.
double tv_histogram(const std::vector<double>& a, const std::vector<double>& b,
                    double lo, double hi, int bins);

}  // namespace kramers
