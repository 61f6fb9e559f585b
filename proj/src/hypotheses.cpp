#include "kramers/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace kramers {

namespace {

// closed outer domain minus the open inner domain, sampled at spacing,
// plus exact boundary samples of both
std::vector<Pt> shell_samples(const DomainPair& pair, double spacing) {
    std::vector<Pt> xs;
    const Domain& in = pair.inner;
    const Domain& out = pair.outer;
    if (pair.inner.dim == 1) {
        int n = std::max(8, (int)std::lround((out.b - out.a) / spacing));
        double step = (out.b - out.a) / n;
        for (int i = 0; i <= n; ++i) {
            double x = out.a + step * i;
            if (!(x > in.a && x < in.b)) xs.push_back(pt(x));
        }
        xs.push_back(pt(in.a));
        xs.push_back(pt(in.b));
        xs.push_back(pt(out.a));
        xs.push_back(pt(out.b));
        return xs;
    }
    int n = std::max(8, (int)std::lround(2.0 * out.radius / spacing));
    double step = 2.0 * out.radius / n;
    double x0 = out.center[0] - out.radius, y0 = out.center[1] - out.radius;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i) {
            Pt x = pt(x0 + step * i, y0 + step * j);
            if (norm2(x - out.center) <= out.radius &&
                norm2(x - in.center) >= in.radius)
                xs.push_back(x);
        }
    const int kScan = 1024;
    for (int k = 0; k < kScan; ++k) {
        double th = 2.0 * std::numbers::pi * k / kScan;
        xs.push_back(in.boundary_point(th / (2.0 * std::numbers::pi)));
        xs.push_back(out.boundary_point(th / (2.0 * std::numbers::pi)));
    }
    return xs;
}

std::vector<Pt> inner_boundary_samples(const Domain& in) {
    std::vector<Pt> xs;
    if (in.dim == 1) {
        xs.push_back(pt(in.a));
        xs.push_back(pt(in.b));
        return xs;
    }
    const int kScan = 4096;
    for (int k = 0; k < kScan; ++k)
        xs.push_back(in.boundary_point((double)k / kScan));
    return xs;
}

bool pairwise_distinct(const std::vector<double>& vals, double threshold,
                       double& offender) {
    for (size_t i = 0; i < vals.size(); ++i)
        for (size_t j = i + 1; j < vals.size(); ++j)
            if (std::abs(vals[i] - vals[j]) <= threshold) {
                offender = vals[i];
                return false;
            }
    return true;
}

}  // namespace

HypothesisReport check_hypotheses(const ScalarField& f, const DomainPair& pair,
                                  double spacing, HypothesisTolerances tol) {
    if (f.dim() != pair.inner.dim)
        throw DimensionError("field/domain dimension mismatch");
    if (spacing <= 0.0) throw UsageError("spacing must be positive");

    HypothesisReport rep;
    const double inf = std::numeric_limits<double>::infinity();

    // gradient scale over the shell for the flow thresholds
    std::vector<Pt> shell = shell_samples(pair, spacing);
    double gscale = 1.0;
    for (const Pt& x : shell) gscale = std::max(gscale, norm2(f.grad(x)));
    double eps_flow = tol.grad * gscale;

    rep.flow_ok = true;
    for (const Pt& x : shell) {
        if (norm2(f.grad(x)) <= eps_flow) {
            rep.flow_ok = false;
            rep.witnesses.push_back({"flow:grad_zero", x, norm2(f.grad(x))});
            break;
        }
    }
    for (const Pt& x : inner_boundary_samples(pair.inner)) {
        double dnf = dot(f.grad(x), pair.inner.outward_normal_at(x));
        if (dnf <= eps_flow) {
            rep.flow_ok = false;
            rep.witnesses.push_back({"flow:inflow_on_inner_boundary", x, dnf});
            break;
        }
    }
    rep.min_bnd_plus = min_boundary_value(f, pair.outer);
    rep.min_bnd_minus = min_boundary_value(f, pair.inner);
    double vscale = 1.0 + std::abs(rep.min_bnd_plus) + std::abs(rep.min_bnd_minus);
    if (rep.min_bnd_plus < rep.min_bnd_minus - 1e-12 * vscale) {
        rep.flow_ok = false;
        rep.witnesses.push_back({"flow:outer_boundary_below_inner", pt(0.0),
                                 rep.min_bnd_plus - rep.min_bnd_minus});
    }

    rep.kappa_f = kappa(f, pair.outer, spacing);
    rep.interior = find_critical_points(f, pair.inner, spacing);
    rep.has_interior_critical = !rep.interior.points.empty();
    rep.morse_ok = rep.interior.morse;
    if (!rep.interior.morse) {
        for (const CriticalPoint& cp : rep.interior.points)
            if (cp.degenerate) {
                rep.witnesses.push_back(
                    {"morse:degenerate_component", cp.location, cp.value});
                break;
            }
    }

    if (!rep.has_interior_critical) {
        rep.boundary_clearance_ok = false;
        rep.cv_gap_ok = false;
        rep.distinctness_ok = true;
        rep.cvmax_value = -inf;
        rep.c0_margin = inf;
        rep.witnesses.push_back({"critical:empty_set", pt(0.0), 0.0});
        return rep;
    }

    rep.cvmax_value = rep.interior.points.back().value;
    rep.c0_margin = rep.min_bnd_plus - rep.cvmax_value;
    rep.boundary_clearance_ok = rep.c0_margin > 0.0;
    if (!rep.boundary_clearance_ok)
        rep.witnesses.push_back({"clearance:cvmax_reaches_outer_boundary",
                                 rep.interior.points.back().location,
                                 rep.cvmax_value});

    double interior_min = rep.interior.points.front().value;
    {
        // min over the inner domain: grid scan refined by critical minima
        const Domain& in = pair.inner;
        if (in.dim == 1) {
            int n = std::max(8, (int)std::lround((in.b - in.a) / spacing));
            double step = (in.b - in.a) / n;
            for (int i = 0; i <= n; ++i)
                interior_min =
                    std::min(interior_min, f.value(pt(in.a + step * i)));
        } else {
            int n = std::max(8, (int)std::lround(2.0 * in.radius / spacing));
            double step = 2.0 * in.radius / n;
            double x0 = in.center[0] - in.radius, y0 = in.center[1] - in.radius;
            for (int j = 0; j <= n; ++j)
                for (int i = 0; i <= n; ++i) {
                    Pt x = pt(x0 + step * i, y0 + step * j);
                    if (norm2(x - in.center) <= in.radius)
                        interior_min = std::min(interior_min, f.value(x));
                }
        }
    }
    rep.cv_gap_lhs = rep.min_bnd_minus - rep.cvmax_value;
    rep.cv_gap_rhs = rep.cvmax_value - interior_min;
    rep.cv_gap_ok = rep.cv_gap_lhs > rep.cv_gap_rhs;
    if (!rep.cv_gap_ok)
        rep.witnesses.push_back({"cv_gap:inner_boundary_too_low",
                                 rep.interior.points.back().location,
                                 rep.cv_gap_lhs - rep.cv_gap_rhs});

    // distinctness: critical values, and saddle-minus-minimum gaps
    std::vector<double> values, gaps;
    for (const CriticalPoint& cp : rep.interior.points)
        values.push_back(cp.value);
    for (const CriticalPoint& s : rep.interior.points)
        if (s.index == 1)
            for (const CriticalPoint& m : rep.interior.points)
                if (m.index == 0) gaps.push_back(s.value - m.value);
    double range = values.empty()
                       ? 0.0
                       : *std::max_element(values.begin(), values.end()) -
                             *std::min_element(values.begin(), values.end());
    double thr = tol.distinct * std::max(range, 1e-12);
    double offender = 0.0;
    rep.distinctness_ok = pairwise_distinct(values, thr, offender) &&
                          pairwise_distinct(gaps, thr, offender);
    if (!rep.distinctness_ok)
        rep.witnesses.push_back({"distinctness:collision", pt(0.0), offender});

    return rep;
}

}  // namespace kramers
