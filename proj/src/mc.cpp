#include "kramers/mc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <thread>

namespace kramers {

std::vector<double> ExitStatistics::taus() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const ExitSample& s : samples)
        if (!s.censored) out.push_back(s.tau);
    return out;
}

std::vector<double> ExitStatistics::boundary_coords() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const ExitSample& s : samples)
        if (!s.censored) out.push_back(s.boundary_coord);
    return out;
}

Pt em_step(const ScalarField& f, const Pt& x, double dt, double beta,
           const Pt& noise) {
    Pt g = f.grad(x);
    double sq = std::sqrt(2.0 * dt / beta);
    if (f.dim() == 1) return pt(x[0] - g[0] * dt + sq * noise[0]);
    return pt(x[0] - g[0] * dt + sq * noise[0],
              x[1] - g[1] * dt + sq * noise[1]);
}

namespace {

double bilinear(const Grid& g, const std::vector<double>& w, const Pt& p) {
    double sx = (p[0] - g.x0) / g.dx, sy = (p[1] - g.y0) / g.dx;
    int i = (int)std::floor(sx), j = (int)std::floor(sy);
    double fx = sx - i, fy = sy - j;
    auto val = [&](int ii, int jj) {
        int id = g.dof_at(ii, jj);
        return id < 0 ? 0.0 : w[id];
    };
    return (1 - fx) * (1 - fy) * val(i, j) + fx * (1 - fy) * val(i + 1, j) +
           (1 - fx) * fy * val(i, j + 1) + fx * fy * val(i + 1, j + 1);
}

}  // namespace

Pt sample_qsd(const std::vector<double>& density, const Grid& grid,
              RngStream& rng) {
    int n = grid.size();
    if ((int)density.size() != n || n < 2) throw UsageError("bad density");

    if (grid.dim == 1) {
        std::vector<double> cdf(n, 0.0);
        for (int i = 1; i < n; ++i)
            cdf[i] = cdf[i - 1] +
                     0.5 * (density[i - 1] + density[i]) * grid.dx;
        double total = cdf[n - 1];
        if (total <= 0.0) throw UsageError("density has no mass");
        double u = rng.uniform() * total;
        int cell =
            (int)(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        cell = std::clamp(cell, 1, n - 1);
        double lo = cdf[cell - 1], hi = cdf[cell];
        double t = hi > lo ? (u - lo) / (hi - lo) : 0.5;
        return pt(grid.nodes[cell - 1][0] + t * grid.dx);
    }

    double dmax = 0.0;
    for (double v : density) dmax = std::max(dmax, v);
    if (dmax <= 0.0) throw UsageError("density has no mass");
    double envelope = 1.01 * dmax;
    const Domain& dom = grid.domain;
    for (long it = 0; it < 10000000L; ++it) {
        double px = dom.center[0] + (2.0 * rng.uniform() - 1.0) * dom.radius;
        double py = dom.center[1] + (2.0 * rng.uniform() - 1.0) * dom.radius;
        Pt p = pt(px, py);
        double u = rng.uniform();
        if (!dom.contains(p)) continue;
        double v = bilinear(grid, density, p);
        if (v > envelope)
            throw EnvelopeBustError("density exceeds the rejection envelope");
        if (u * envelope < v) return p;
    }
    throw NoConvergenceError("rejection sampler made no progress");
}

ExitSample simulate_exit(const ScalarField& f, const Domain& omega_plus,
                         const Pt& x0, const McConfig& cfg, RngStream& rng) {
    if (!omega_plus.contains(x0)) throw UsageError("start outside the domain");
    if (cfg.dt <= 0.0 || cfg.beta <= 0.0)
        throw UsageError("dt and beta must be positive");
    const int d = f.dim();
    const double dt = cfg.dt;
    const double sq = std::sqrt(2.0 * dt / cfg.beta);

    Pt x = x0;
    for (long k = 0; k < cfg.max_steps; ++k) {
        Pt xn;
        if (d == 1) {
            Pt g = f.grad(x);
            xn = pt(x[0] - g[0] * dt + sq * rng.normal());
        } else {
            Pt g = f.grad(x);
            double n0 = rng.normal(), n1 = rng.normal();
            xn = pt(x[0] - g[0] * dt + sq * n0, x[1] - g[1] * dt + sq * n1);
        }
        if (!omega_plus.contains(xn)) {
            ExitSample s;
            s.steps = k + 1;
            double theta;
            Pt hit;
            if (d == 1) {
                double edge = xn[0] >= omega_plus.b ? omega_plus.b
                                                    : omega_plus.a;
                theta = (edge - x[0]) / (xn[0] - x[0]);
                hit = pt(edge);
            } else {
                // first root of |x + theta (xn - x) - c|^2 = R^2 in (0, 1]
                Pt dxv = xn - x;
                Pt rel = x - omega_plus.center;
                double a = dot(dxv, dxv);
                double b = dot(rel, dxv);
                double c = dot(rel, rel) -
                           omega_plus.radius * omega_plus.radius;
                double disc = std::max(b * b - a * c, 0.0);
                theta = (-b + std::sqrt(disc)) / a;
                Pt q = x + theta * dxv;
                Pt rad = q - omega_plus.center;
                double rn = norm2(rad);
                hit = omega_plus.center +
                      (omega_plus.radius / rn) * rad;
            }
            theta = std::clamp(theta, 0.0, 1.0);
            s.tau = ((double)k + theta) * dt;
            s.location = hit;
            s.boundary_coord = omega_plus.boundary_coordinate(hit);
            return s;
        }
        x = xn;
    }
    ExitSample s;
    s.censored = true;
    s.steps = cfg.max_steps;
    s.tau = (double)cfg.max_steps * dt;
    s.location = x;
    s.boundary_coord = omega_plus.boundary_coordinate(x);
    return s;
}

ExitStatistics run_exits(const ScalarField& f, const Domain& omega_plus,
                         const std::vector<double>& qsd, const Grid& grid,
                         const McConfig& cfg, uint64_t index_offset) {
    if (cfg.n < 0) throw UsageError("n must be nonnegative");
    if (cfg.beta <= 0.0 || cfg.dt <= 0.0)
        throw UsageError("dt and beta must be positive");
    double h = 2.0 / cfg.beta;
    double dt_cap = std::min(h * h / 10.0, 1e-3);
    if (cfg.dt > dt_cap * (1.0 + 1e-12))
        throw UsageError("dt exceeds the weak-bias guard min(h^2/10, 1e-3)");

    ExitStatistics out;
    out.config = cfg;
    out.dim = f.dim();
    out.samples.resize(cfg.n);

    auto worker = [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) {
            RngStream rng(cfg.seed, index_offset + (uint64_t)i);
            Pt x0 = sample_qsd(qsd, grid, rng);
            out.samples[i] = simulate_exit(f, omega_plus, x0, cfg, rng);
        }
    };

    int workers = std::clamp(cfg.threads, 1, std::max(cfg.n, 1));
    if (workers <= 1 || cfg.n == 0) {
        worker(0, cfg.n);
    } else {
        std::vector<std::thread> pool;
        int chunk = (cfg.n + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            int lo = w * chunk, hi = std::min(cfg.n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (std::thread& t : pool) t.join();
    }

    double sum = 0.0, sumsq = 0.0;
    long m = 0;
    for (const ExitSample& s : out.samples) {
        if (s.censored) {
            ++out.censored_count;
            continue;
        }
        sum += s.tau;
        sumsq += s.tau * s.tau;
        ++m;
    }
    if (m > 0) {
        out.mean_tau = sum / m;
        out.empirical_rate = 1.0 / out.mean_tau;
        if (m > 1) {
            double var = (sumsq - sum * sum / m) / (m - 1);
            out.se_tau = std::sqrt(std::max(var, 0.0) / m);
        }
    }
    return out;
}

namespace {

std::pair<double, double> coord_range(bool atoms) {
    if (atoms) return {0.0, 1.0};
    return {0.0, 2.0 * std::numbers::pi};
}

}  // namespace

double exit_location_tv(const ExitStatistics& stats,
                        const BoundaryDensity& reference, int bins) {
    if (bins < 1) throw UsageError("bins must be positive");
    auto [lo, hi] = coord_range(reference.atoms);
    auto bin_at = [&](double x) {
        int k = (int)std::floor((x - lo) / (hi - lo) * bins);
        return std::clamp(k, 0, bins - 1);
    };
    std::vector<double> mc(bins, 0.0), ref(bins, 0.0);
    long m = 0;
    for (const ExitSample& s : stats.samples)
        if (!s.censored) ++m;
    if (m == 0) throw UsageError("no uncensored samples");
    for (const ExitSample& s : stats.samples)
        if (!s.censored) mc[bin_at(s.boundary_coord)] += 1.0 / m;
    double total = 0.0;
    for (size_t k = 0; k < reference.locations.size(); ++k)
        total += reference.mass((int)k);
    if (total <= 0.0) throw UsageError("reference law has no mass");
    for (size_t k = 0; k < reference.locations.size(); ++k)
        ref[bin_at(reference.locations[k])] += reference.mass((int)k) / total;
    double tv = 0.0;
    for (int k = 0; k < bins; ++k) tv += std::abs(mc[k] - ref[k]);
    return 0.5 * tv;
}

HyperdynReport hyperdyn_compare(const ExitStatistics& base,
                                const ExitStatistics& biased, double boost,
                                double significance, double tv_tol) {
    if (boost <= 0.0) throw UsageError("boost must be positive");
    HyperdynReport rep;
    rep.boost = boost;

    std::vector<double> ta = base.taus(), tb = biased.taus();
    for (double& t : tb) t *= boost;
    rep.ks = ks_two_sample(ta, tb);
    rep.ks_ok = rep.ks.p_value > significance;

    double sa = 0.0, sb = 0.0;
    for (double t : ta) sa += t;
    for (double t : tb) sb += t;
    rep.mean_tau_base = sa / ta.size();
    rep.mean_tau_biased = sb / tb.size();

    double hi = base.dim == 1 ? 1.0 : 2.0 * std::numbers::pi;
    rep.tv = tv_histogram(base.boundary_coords(), biased.boundary_coords(),
                          0.0, hi, 20);
    rep.tv_ok = rep.tv <= tv_tol;
    return rep;
}

}  // namespace kramers
