#include "kramers/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "kramers/grid.hpp"

namespace kramers {

namespace {

double default_spacing(const Domain& dom, double spacing) {
    return spacing > 0.0 ? spacing : dom.diameter() / 400.0;
}

std::vector<CriticalPoint> interior_minima(const ScalarField& f,
                                           const Domain& dom, double spacing) {
    CriticalSet cs = find_critical_points(f, dom, spacing);
    std::vector<CriticalPoint> mins;
    for (const CriticalPoint& cp : cs.points)
        if (cp.index == 0) mins.push_back(cp);
    if (mins.empty())
        throw EmptyCriticalSetError("no interior minima found");
    for (const CriticalPoint& cp : mins)
        if (cp.degenerate)
            throw DegenerateMinimumError(
                "degenerate interior minimum; use the quadrature method");
    return mins;
}

}  // namespace

VolumeIntegral laplace_volume_integral(const ScalarField& f, const Domain& dom,
                                       double h, IntegralMethod method,
                                       double dx, double spacing) {
    if (h <= 0.0) throw UsageError("h must be positive");
    VolumeIntegral out;

    if (method == IntegralMethod::hessian) {
        std::vector<CriticalPoint> mins =
            interior_minima(f, dom, default_spacing(dom, spacing));
        out.fshift = 1e300;
        for (const CriticalPoint& cp : mins)
            out.fshift = std::min(out.fshift, cp.value);
        double acc = 0.0;
        int d = dom.dim;
        for (const CriticalPoint& cp : mins) {
            if (cp.hessian_det <= 0.0)
                throw DegenerateMinimumError("non-positive Hessian at minimum");
            acc += std::pow(std::numbers::pi * h, 0.5 * d) /
                   std::sqrt(cp.hessian_det) *
                   std::exp(-2.0 * (cp.value - out.fshift) / h);
        }
        out.value = acc;
        out.lower = 0.0;
        out.upper = 0.0;
        return out;
    }

    if (dx <= 0.0) throw UsageError("dx must be positive");
    double kmax = 1.0;  // largest Hessian eigenvalue over the grid
    if (dom.dim == 1) {
        int n = std::max(8, (int)std::lround((dom.b - dom.a) / dx));
        double step = (dom.b - dom.a) / n;
        std::vector<double> fv(n + 1);
        out.fshift = 1e300;
        for (int i = 0; i <= n; ++i) {
            Pt x = pt(i == n ? dom.b : dom.a + step * i);
            fv[i] = f.value(x);
            out.fshift = std::min(out.fshift, fv[i]);
            kmax = std::max(kmax, f.hess(x).xx);
        }
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            double w = (i == 0 || i == n) ? 0.5 : 1.0;
            acc += w * std::exp(-2.0 * (fv[i] - out.fshift) / h);
        }
        out.value = acc * step;
        out.upper = dom.b - dom.a;
    } else {
        Grid grid = build_grid(dom, dx, BC::neumann);
        out.fshift = 1e300;
        std::vector<double> fv(grid.nodes.size());
        for (size_t i = 0; i < grid.nodes.size(); ++i) {
            fv[i] = f.value(grid.nodes[i]);
            out.fshift = std::min(out.fshift, fv[i]);
            kmax = std::max(kmax, f.hess(grid.nodes[i]).eigs(2)[1]);
        }
        double acc = 0.0;
        for (double v : fv) acc += std::exp(-2.0 * (v - out.fshift) / h);
        out.value = acc * dx * dx;
        out.upper = std::numbers::pi * dom.radius * dom.radius;
    }
    double cf = 2.0 * std::pow(kmax / std::numbers::pi, 0.5 * dom.dim);
    out.lower = std::pow(h, 0.5 * dom.dim) / cf;
    out.within_bracket = out.lower <= out.value && out.value <= out.upper;
    return out;
}

double boundary_flux_integral(const ScalarField& f, const Domain& dom,
                              double h, IntegralMethod method, double fshift) {
    if (h <= 0.0) throw UsageError("h must be positive");
    int d = dom.dim;

    if (method == IntegralMethod::hessian) {
        double acc = 0.0;
        for (const CriticalPoint& cp : boundary_minima(f, dom)) {
            if (cp.normal_derivative <= 0.0)
                throw NegativeNormalDerivativeError(
                    "outward derivative not positive at a boundary minimum");
            if (cp.degenerate || (d == 2 && cp.hessian_det <= 0.0))
                throw DegenerateMinimumError(
                    "degenerate boundary minimum; use the quadrature method");
            double tangential = d == 1 ? 1.0 : std::sqrt(cp.hessian_det);
            acc += 2.0 * cp.normal_derivative *
                   std::pow(std::numbers::pi * h, 0.5 * (d - 1)) / tangential *
                   std::exp(-2.0 * (cp.value - fshift) / h);
        }
        return acc;
    }

    double acc = 0.0;
    if (d == 1) {
        for (double x : {dom.a, dom.b}) {
            Pt p = pt(x);
            double dnf = dot(f.grad(p), dom.outward_normal_at(p));
            acc += 2.0 * dnf * std::exp(-2.0 * (f.value(p) - fshift) / h);
        }
    } else {
        const int kScan = 4096;
        double step = 2.0 * std::numbers::pi * dom.radius / kScan;
        for (int k = 0; k < kScan; ++k) {
            Pt p = dom.boundary_point((double)k / kScan);
            double dnf = dot(f.grad(p), dom.outward_normal_at(p));
            acc += 2.0 * dnf * std::exp(-2.0 * (f.value(p) - fshift) / h) * step;
        }
    }
    if (acc <= 0.0)
        throw NegativeNormalDerivativeError("boundary flux is not positive");
    return acc;
}

double lambda1_asymptotic(const ScalarField& f, const Domain& omega_plus,
                          double h, RateMethod method, double dx,
                          double spacing) {
    if (method == RateMethod::flux) {
        VolumeIntegral vol = laplace_volume_integral(
            f, omega_plus, h, IntegralMethod::quadrature, dx);
        double flux = boundary_flux_integral(
            f, omega_plus, h, IntegralMethod::quadrature, vol.fshift);
        return h * flux / vol.value;
    }
    VolumeIntegral vol = laplace_volume_integral(
        f, omega_plus, h, IntegralMethod::hessian, dx,
        default_spacing(omega_plus, spacing));
    double flux = boundary_flux_integral(f, omega_plus, h,
                                         IntegralMethod::hessian, vol.fshift);
    return h * flux / vol.value;
}

BoundaryDensity exit_density_asymptotic(const ScalarField& f,
                                        const Domain& omega_plus, double h,
                                        DensityForm form, double spacing) {
    if (h <= 0.0) throw UsageError("h must be positive");
    BoundaryDensity out;
    int d = omega_plus.dim;

    if (d == 1) {
        out.atoms = true;
        out.locations = {0.0, 1.0};
        out.values = {0.0, 0.0};
        double ref = std::min(f.value(pt(omega_plus.a)),
                              f.value(pt(omega_plus.b)));
        // both forms give the same two-atom law in 1D: the boundary Hessian
        // factor is the empty product
        int k = 0;
        for (double x : {omega_plus.a, omega_plus.b}) {
            Pt p = pt(x);
            double dnf = dot(f.grad(p), omega_plus.outward_normal_at(p));
            double t = 2.0 * dnf * std::exp(-2.0 * (f.value(p) - ref) / h);
            out.values[k++] = std::max(t, 0.0);
        }
        double total = out.values[0] + out.values[1];
        if (total <= 0.0) throw NegativeMassError("no positive exit mass");
        out.values[0] /= total;
        out.values[1] /= total;
        return out;
    }

    const int kScan = 4096;
    const double two_pi = 2.0 * std::numbers::pi;
    double R = omega_plus.radius;
    out.atoms = false;
    out.measure_step = two_pi * R / kScan;
    out.locations.resize(kScan);
    out.values.assign(kScan, 0.0);
    for (int k = 0; k < kScan; ++k) out.locations[k] = two_pi * k / kScan;

    if (form == DensityForm::flux) {
        double ref = min_boundary_value(f, omega_plus);
        for (int k = 0; k < kScan; ++k) {
            Pt p = omega_plus.boundary_point((double)k / kScan);
            double dnf = dot(f.grad(p), omega_plus.outward_normal_at(p));
            double v =
                2.0 * dnf * std::exp(-2.0 * (f.value(p) - ref) / h);
            out.values[k] = std::max(v, 0.0);
        }
    } else {
        std::vector<CriticalPoint> mins = boundary_minima(f, omega_plus);
        double ref = 1e300;
        for (const CriticalPoint& cp : mins) ref = std::min(ref, cp.value);
        for (const CriticalPoint& cp : mins) {
            if (cp.normal_derivative <= 0.0)
                throw NegativeNormalDerivativeError(
                    "outward derivative not positive at a boundary minimum");
            if (cp.degenerate || cp.hessian_det <= 0.0)
                throw DegenerateMinimumError(
                    "degenerate boundary minimum; use the flux form");
            double amp = 2.0 * cp.normal_derivative *
                         std::exp(-2.0 * (cp.value - ref) / h);
            double sigma = std::sqrt(h / (2.0 * cp.hessian_det));
            double cut = 6.0 * sigma;
            for (int k = 0; k < kScan; ++k) {
                double dth = std::abs(out.locations[k] - cp.boundary_coord);
                dth = std::min(dth, two_pi - dth);
                double s = dth * R;  // arc distance
                if (s > cut) continue;
                out.values[k] += amp * std::exp(-cp.hessian_det * s * s / h);
            }
        }
    }
    double total = 0.0;
    for (double v : out.values) total += v * out.measure_step;
    if (total <= 0.0) throw NegativeMassError("no positive exit mass");
    for (double& v : out.values) v /= total;
    return out;
}

double boost_factor(const ScalarField& f, const ScalarField& delta_f,
                    const DomainPair& pair, double h, double dx) {
    if (h <= 0.0 || dx <= 0.0) throw UsageError("h and dx must be positive");
    if (f.dim() != delta_f.dim() || f.dim() != pair.inner.dim)
        throw DimensionError("dimension mismatch");
    const Domain& outer = pair.outer;

    std::vector<Pt> xs;
    if (outer.dim == 1) {
        int n = std::max(8, (int)std::lround((outer.b - outer.a) / dx));
        double step = (outer.b - outer.a) / n;
        for (int i = 0; i <= n; ++i)
            xs.push_back(pt(i == n ? outer.b : outer.a + step * i));
    } else {
        Grid grid = build_grid(outer, dx, BC::neumann);
        xs = grid.nodes;
    }

    double dscale = 0.0;
    for (const Pt& x : xs) dscale = std::max(dscale, std::abs(delta_f.value(x)));
    for (const Pt& x : xs)
        if (!pair.inner.contains(x) &&
            std::abs(delta_f.value(x)) > 1e-12 * std::max(1.0, dscale))
            throw SupportViolationError(
                "perturbation is nonzero outside the inner domain");

    double fshift = 1e300;
    for (const Pt& x : xs)
        fshift = std::min({fshift, f.value(x), f.value(x) + delta_f.value(x)});
    double base = 0.0, biased = 0.0;
    size_t n = xs.size();
    for (size_t i = 0; i < n; ++i) {
        double w = 1.0;
        if (outer.dim == 1 && (i == 0 || i == n - 1)) w = 0.5;
        double fv = f.value(xs[i]);
        base += w * std::exp(-2.0 * (fv - fshift) / h);
        biased += w * std::exp(-2.0 * (fv + delta_f.value(xs[i]) - fshift) / h);
    }
    return base / biased;
}

SlopeFit slope_fit(const std::vector<double>& hs,
                   const std::vector<double>& lambda1s) {
    size_t n = hs.size();
    if (n != lambda1s.size()) throw UsageError("length mismatch");
    if (n < 3) throw IllConditionedError("need at least 3 h values");
    double hmin = *std::min_element(hs.begin(), hs.end());
    double hmax = *std::max_element(hs.begin(), hs.end());
    if (hmin <= 0.0) throw UsageError("h values must be positive");
    if (hmax / hmin < 1.5)
        throw IllConditionedError("h values span less than x1.5");
    for (double l : lambda1s)
        if (l <= 0.0) throw UsageError("lambda1 values must be positive");

    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        double x = hs[i], y = hs[i] * std::log(lambda1s[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    double det = n * sxx - sx * sx;
    SlopeFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy * sxx - sx * sxy) / det;
    double ss_tot = syy - sy * sy / n;
    double ss_res = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double y = hs[i] * std::log(lambda1s[i]);
        double e = y - (fit.intercept + fit.slope * hs[i]);
        ss_res += e * e;
    }
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

}  // namespace kramers
