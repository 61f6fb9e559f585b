#pragma once

#include <vector>

#include "kramers/field.hpp"
#include "kramers/grid.hpp"
#include "kramers/rng.hpp"
#include "kramers/spectra.hpp"
#include "kramers/stats.hpp"

namespace kramers {

struct ExitSample {
    double tau = 0.0;  // linear crossing interpolation, tau = (k + theta) dt
    Pt location{0.0, 0.0};        // exit point, projected onto the boundary
    double boundary_coord = 0.0;  // 0/1 endpoint label in 1D, angle in 2D
    long steps = 0;
    bool censored = false;  // hit the step budget; excluded from fits
};

struct McConfig {
    double beta = 1.0;
    double dt = 1e-3;
    long max_steps = 1000000000L;
    uint64_t seed = 0;
    int threads = 1;
    int n = 0;
};

// Exit-time and location statistics over the uncensored samples.
struct ExitStatistics {
    std::vector<ExitSample> samples;  // ordered by sample index
    McConfig config;
    int dim = 1;
    int censored_count = 0;
    double mean_tau = 0.0;
    double se_tau = 0.0;
    double empirical_rate = 0.0;  // 1 / mean_tau

    std::vector<double> taus() const;             // uncensored only
    std::vector<double> boundary_coords() const;  // uncensored only
};

// One Euler-Maruyama update x - grad f(x) dt + sqrt(2 dt / beta) noise.
Pt em_step(const ScalarField& f, const Pt& x, double dt, double beta,
           const Pt& noise);

// Draw from a normalized node density. 1D inverts the trapezoid CDF with
// linear interpolation inside the selected cell; 2D rejection-samples the
// bilinear interpolant against a flat envelope of 1.01 x the max node value
// over the bounding box (EnvelopeBustError if the envelope is ever exceeded,
// NoConvergenceError if acceptance stalls).
Pt sample_qsd(const std::vector<double>& density, const Grid& grid,
              RngStream& rng);

// Simulate until the state leaves omega_plus; the crossing time and point
// come from linear interpolation of the last step. A sample that exhausts
// cfg.max_steps is returned censored.
ExitSample simulate_exit(const ScalarField& f, const Domain& omega_plus,
                         const Pt& x0, const McConfig& cfg, RngStream& rng);

// cfg.n independent exits, each started from its own QSD draw. Sample i uses
// RngStream(cfg.seed, index_offset + i) for both the start and the path, so
// the result is byte-identical for any cfg.threads. Enforces the step-size
// guards dt <= h^2/10 and dt <= 1e-3 at h = 2/beta.
ExitStatistics run_exits(const ScalarField& f, const Domain& omega_plus,
                         const std::vector<double>& qsd, const Grid& grid,
                         const McConfig& cfg, uint64_t index_offset = 0);

// TV between the sampled exit locations and a reference boundary law,
// both projected onto `bins` equal cells of the boundary coordinate range.
double exit_location_tv(const ExitStatistics& stats,
                        const BoundaryDensity& reference, int bins = 20);

struct HyperdynReport {
    double boost = 1.0;
    KsResult ks;   // taus of the base run vs boost-scaled taus of the biased
    double tv = 0.0;  // exit-location histograms, 20 bins
    bool ks_ok = false;
    bool tv_ok = false;
    double mean_tau_base = 0.0;
    double mean_tau_biased = 0.0;  // after scaling by boost
};

// Tests the accelerated-dynamics identity: (tau, X) of the base potential
// against (B tau', X') of the biased one.
HyperdynReport hyperdyn_compare(const ExitStatistics& base,
                                const ExitStatistics& biased, double boost,
                                double significance = 0.01,
                                double tv_tol = 0.05);

}  // namespace kramers
