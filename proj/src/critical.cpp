#include "kramers/critical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <utility>

namespace kramers {

namespace {

struct Scales {
    double grad = 1.0;  // max(1, max |grad f| over seeds)
    double hess = 1.0;  // max(1, max Hessian magnitude over seeds)
};

Scales sample_scales(const ScalarField& f, const std::vector<Pt>& seeds) {
    Scales s;
    for (const Pt& x : seeds) {
        s.grad = std::max(s.grad, norm2(f.grad(x)));
        Sym2 H = f.hess(x);
        double hm = std::max({std::abs(H.xx), std::abs(H.xy), std::abs(H.yy)});
        s.hess = std::max(s.hess, hm);
    }
    return s;
}

std::vector<Pt> seed_points(const Domain& dom, double spacing) {
    std::vector<Pt> seeds;
    if (dom.dim == 1) {
        int n = std::max(8, (int)std::lround((dom.b - dom.a) / spacing));
        double step = (dom.b - dom.a) / n;
        for (int i = 0; i <= n; ++i) seeds.push_back(pt(dom.a + step * i));
    } else {
        int n = std::max(8, (int)std::lround(2.0 * dom.radius / spacing));
        double step = 2.0 * dom.radius / n;
        double x0 = dom.center[0] - dom.radius;
        double y0 = dom.center[1] - dom.radius;
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i <= n; ++i) {
                Pt x = pt(x0 + step * i, y0 + step * j);
                if (norm2(x - dom.center) <= dom.radius) seeds.push_back(x);
            }
    }
    return seeds;
}

// index of a degenerate point from function values probed around it:
// all higher -> 0, all lower -> dim, mixed -> 1
int probe_index(const ScalarField& f, const Pt& x, double value, double rad,
                int dim) {
    std::vector<Pt> probes;
    if (dim == 1) {
        probes = {pt(x[0] - rad), pt(x[0] + rad)};
    } else {
        for (int k = 0; k < 8; ++k) {
            double a = 2.0 * std::numbers::pi * k / 8.0;
            probes.push_back(
                pt(x[0] + rad * std::cos(a), x[1] + rad * std::sin(a)));
        }
    }
    double tol = 1e-12 * (1.0 + std::abs(value));
    bool any_lower = false, any_higher = false;
    for (const Pt& p : probes) {
        double v = f.value(p);
        if (v < value - tol) any_lower = true;
        if (v > value + tol) any_higher = true;
    }
    if (!any_lower) return 0;
    if (!any_higher) return dim;
    return 1;
}

CriticalPoint classify_interior(const ScalarField& f, const Pt& x,
                                double eig_tol, double probe_rad) {
    CriticalPoint cp;
    cp.location = x;
    cp.value = f.value(x);
    cp.kind = PointKind::interior;
    cp.extent_lo = cp.extent_hi = x;
    Sym2 H = f.hess(x);
    auto ev = H.eigs(f.dim());
    cp.hessian_det = H.det(f.dim());
    bool deg = false;
    int neg = 0;
    for (int k = 0; k < f.dim(); ++k) {
        if (std::abs(ev[k]) <= eig_tol) deg = true;
        if (ev[k] < -eig_tol) ++neg;
    }
    cp.degenerate = deg;
    cp.index = deg ? probe_index(f, x, cp.value, probe_rad, f.dim()) : neg;
    return cp;
}

// connected components of the flat seed set, linked within 1.6*spacing
std::vector<std::vector<int>> group_components(const std::vector<Pt>& xs,
                                               double spacing) {
    int n = (int)xs.size();
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    std::function<int(int)> find = [&](int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    double link = 1.6 * spacing;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (norm2(xs[i] - xs[j]) <= link) {
                int a = find(i), b = find(j);
                if (a != b) parent[a] = b;
            }
    std::vector<std::vector<int>> comps;
    std::vector<int> root_slot(n, -1);
    for (int i = 0; i < n; ++i) {
        int r = find(i);
        if (root_slot[r] < 0) {
            root_slot[r] = (int)comps.size();
            comps.push_back({});
        }
        comps[root_slot[r]].push_back(i);
    }
    return comps;
}

bool newton_interior(const ScalarField& f, const Domain& dom, Pt seed,
                     double tol_grad, double hess_scale, Pt& out) {
    Pt x = seed;
    double diam = dom.diameter();
    for (int it = 0; it < 60; ++it) {
        Pt g = f.grad(x);
        if (norm2(g) <= tol_grad) {
            out = x;
            return true;
        }
        Pt step = pt(0.0);
        if (f.dim() == 1) {
            double H = f.hess(x).xx;
            if (std::abs(H) < 1e-14 * hess_scale) return false;
            step[0] = -g[0] / H;
        } else {
            Sym2 H = f.hess(x);
            double det = H.det(2);
            if (std::abs(det) < 1e-14 * hess_scale * hess_scale) return false;
            step[0] = -(H.yy * g[0] - H.xy * g[1]) / det;
            step[1] = -(H.xx * g[1] - H.xy * g[0]) / det;
        }
        double sn = norm2(step);
        double cap = 0.25 * diam;
        if (sn > cap) step = (cap / sn) * step;
        x = x + step;
        if (dom.boundary_clearance(x) < -diam) return false;
    }
    return false;
}

}  // namespace

CriticalSet find_critical_points(const ScalarField& f, const Domain& dom,
                                 double spacing, double tol_grad) {
    if (f.dim() != dom.dim)
        throw DimensionError("field/domain dimension mismatch");
    if (spacing <= 0.0) throw UsageError("spacing must be positive");

    std::vector<Pt> seeds = seed_points(dom, spacing);
    Scales sc = sample_scales(f, seeds);
    double tol = tol_grad > 0.0 ? tol_grad : 1e-8 * sc.grad;
    double eig_tol = 1e-6 * sc.hess;
    int dim = f.dim();

    // flat seeds: gradient and Hessian both below tolerance
    std::vector<Pt> flat;
    std::vector<Pt> active;
    for (const Pt& x : seeds) {
        Sym2 H = f.hess(x);
        double hm = std::max({std::abs(H.xx), std::abs(H.xy), std::abs(H.yy)});
        if (norm2(f.grad(x)) <= tol && hm <= eig_tol)
            flat.push_back(x);
        else
            active.push_back(x);
    }

    CriticalSet cs;
    std::vector<CriticalPoint> flat_records;
    std::vector<std::vector<int>> flat_comps = group_components(flat, spacing);
    for (const auto& comp : flat_comps) {
        CriticalPoint cp;
        cp.kind = PointKind::interior;
        cp.degenerate = true;
        cp.extent_lo = pt(1e300, 1e300);
        cp.extent_hi = pt(-1e300, -1e300);
        double best = 1e300;
        for (int idx : comp) {
            const Pt& x = flat[idx];
            for (int k = 0; k < dim; ++k) {
                cp.extent_lo[k] = std::min(cp.extent_lo[k], x[k]);
                cp.extent_hi[k] = std::max(cp.extent_hi[k], x[k]);
            }
            double gn = norm2(f.grad(x));
            if (gn < best) {
                best = gn;
                cp.location = x;
            }
        }
        for (int k = dim; k < 2; ++k) {
            cp.extent_lo[k] = 0.0;
            cp.extent_hi[k] = 0.0;
        }
        cp.value = f.value(cp.location);
        cp.hessian_det = f.hess(cp.location).det(dim);
        cp.index = probe_index(f, cp.location, cp.value, 3.0 * spacing, dim);
        flat_records.push_back(cp);
        cs.morse = false;
    }

    // distance to the component's seed set; the bounding box alone would
    // swallow interior points the component surrounds (annular flats)
    auto near_flat = [&](const Pt& x) {
        for (size_t c = 0; c < flat_records.size(); ++c) {
            const CriticalPoint& cp = flat_records[c];
            bool inside = true;
            for (int k = 0; k < dim; ++k)
                if (x[k] < cp.extent_lo[k] - 2.0 * spacing ||
                    x[k] > cp.extent_hi[k] + 2.0 * spacing)
                    inside = false;
            if (!inside) continue;
            for (int idx : flat_comps[c])
                if (norm2(x - flat[idx]) <= 2.0 * spacing) return true;
        }
        return false;
    };

    std::vector<Pt> found;
    for (const Pt& seed : active) {
        Pt x;
        if (!newton_interior(f, dom, seed, tol, sc.hess, x)) continue;
        if (dom.boundary_clearance(x) <= 0.0) continue;
        if (near_flat(x)) continue;
        found.push_back(x);
    }
    // 1D safety net: bisection on sign-change cells that Newton missed
    if (dim == 1) {
        for (size_t i = 0; i + 1 < seeds.size(); ++i) {
            double ga = f.grad(seeds[i])[0], gb = f.grad(seeds[i + 1])[0];
            if (ga == 0.0 || gb == 0.0 || (ga < 0) == (gb < 0)) continue;
            double lo = seeds[i][0], hi = seeds[i + 1][0];
            bool covered = false;
            for (const Pt& x : found)
                if (x[0] >= lo - spacing && x[0] <= hi + spacing) covered = true;
            if (covered || near_flat(pt(0.5 * (lo + hi)))) continue;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                double mid = 0.5 * (lo + hi);
                double gm = f.grad(pt(mid))[0];
                if ((gm < 0) == (ga < 0))
                    lo = mid;
                else
                    hi = mid;
            }
            Pt x = pt(0.5 * (lo + hi));
            if (dom.boundary_clearance(x) > 0.0) found.push_back(x);
        }
    }

    // merge within 2*spacing, keep the smallest-gradient representative
    std::sort(found.begin(), found.end(), [](const Pt& a, const Pt& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    std::vector<Pt> merged;
    for (const Pt& x : found) {
        bool dup = false;
        for (Pt& m : merged)
            if (norm2(x - m) <= 2.0 * spacing) {
                if (norm2(f.grad(x)) < norm2(f.grad(m))) m = x;
                dup = true;
                break;
            }
        if (!dup) merged.push_back(x);
    }

    for (const Pt& x : merged) {
        CriticalPoint cp = classify_interior(f, x, eig_tol, 3.0 * spacing);
        if (cp.degenerate) cs.morse = false;
        cs.points.push_back(cp);
    }
    cs.points.insert(cs.points.end(), flat_records.begin(), flat_records.end());
    std::sort(cs.points.begin(), cs.points.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) {
                  return a.value < b.value;
              });
    return cs;
}

namespace {

CriticalPoint endpoint_record(const ScalarField& f, const Domain& dom,
                              double x, double coord) {
    CriticalPoint cp;
    cp.kind = PointKind::boundary;
    cp.location = pt(x);
    cp.extent_lo = cp.extent_hi = cp.location;
    cp.value = f.value(cp.location);
    cp.boundary_coord = coord;
    cp.restriction_index = 0;
    cp.hessian_det = 1.0;
    Pt n = dom.outward_normal_at(cp.location);
    cp.normal_derivative = dot(f.grad(cp.location), n);
    cp.index = cp.normal_derivative > 0.0 ? 1 : 0;
    return cp;
}

}  // namespace

std::vector<CriticalPoint> boundary_critical_points(const ScalarField& f,
                                                    const Domain& dom) {
    if (f.dim() != dom.dim)
        throw DimensionError("field/domain dimension mismatch");
    std::vector<CriticalPoint> out;
    if (dom.dim == 1) {
        out.push_back(endpoint_record(f, dom, dom.a, 0.0));
        out.push_back(endpoint_record(f, dom, dom.b, 1.0));
        return out;
    }

    const int kScan = 4096;
    const double two_pi = 2.0 * std::numbers::pi;
    double R = dom.radius;
    auto sigma = [&](double th) {
        return pt(dom.center[0] + R * std::cos(th),
                  dom.center[1] + R * std::sin(th));
    };
    auto g_derivs = [&](double th, double& g, double& gp, double& gpp) {
        Pt x = sigma(th);
        Pt t1 = pt(-R * std::sin(th), R * std::cos(th));
        Pt t2 = pt(-R * std::cos(th), -R * std::sin(th));
        Pt gr = f.grad(x);
        Sym2 H = f.hess(x);
        g = f.value(x);
        gp = dot(gr, t1);
        gpp = H.xx * t1[0] * t1[0] + 2.0 * H.xy * t1[0] * t1[1] +
              H.yy * t1[1] * t1[1] + dot(gr, t2);
    };

    std::vector<double> gv(kScan);
    double gmin = 1e300, gmax = -1e300, gp_scale = 1.0;
    for (int k = 0; k < kScan; ++k) {
        double g, gp, gpp;
        g_derivs(two_pi * k / kScan, g, gp, gpp);
        gv[k] = g;
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
        gp_scale = std::max(gp_scale, std::abs(gp));
    }

    if (gmax - gmin <= 1e-11 * (1.0 + std::abs(gmax))) {
        // constant restriction: one degenerate representative
        CriticalPoint cp;
        cp.kind = PointKind::boundary;
        cp.degenerate = true;
        cp.location = sigma(0.0);
        cp.extent_lo = cp.extent_hi = cp.location;
        cp.value = gv[0];
        cp.boundary_coord = 0.0;
        cp.restriction_index = 0;
        cp.hessian_det = 0.0;
        Pt n = dom.outward_normal_at(cp.location);
        cp.normal_derivative = dot(f.grad(cp.location), n);
        cp.index = cp.normal_derivative > 0.0 ? 1 : 0;
        out.push_back(cp);
        return out;
    }

    std::vector<std::pair<double, int>> cands;  // theta, restriction index
    for (int k = 0; k < kScan; ++k) {
        double prev = gv[(k + kScan - 1) % kScan];
        double next = gv[(k + 1) % kScan];
        if (gv[k] < prev && gv[k] < next)
            cands.push_back({two_pi * k / kScan, 0});
        if (gv[k] > prev && gv[k] > next)
            cands.push_back({two_pi * k / kScan, 1});
    }

    double tol = 1e-10 * gp_scale;
    std::vector<std::pair<double, int>> polished;
    for (auto [th, ridx] : cands) {
        for (int it = 0; it < 40; ++it) {
            double g, gp, gpp;
            g_derivs(th, g, gp, gpp);
            if (std::abs(gp) <= tol) break;
            if (std::abs(gpp) < 1e-14 * gp_scale) break;
            double step = -gp / gpp;
            step = std::clamp(step, -two_pi / kScan, two_pi / kScan);
            th += step;
        }
        th = std::fmod(th + two_pi, two_pi);
        bool dup = false;
        for (auto& [pth, pidx] : polished) {
            double d = std::abs(th - pth);
            d = std::min(d, two_pi - d);
            if (d <= 2.0 * two_pi / kScan && pidx == ridx) dup = true;
        }
        if (!dup) polished.push_back({th, ridx});
    }

    for (auto [th, ridx] : polished) {
        CriticalPoint cp;
        cp.kind = PointKind::boundary;
        cp.location = sigma(th);
        cp.extent_lo = cp.extent_hi = cp.location;
        double g, gp, gpp;
        g_derivs(th, g, gp, gpp);
        cp.value = g;
        cp.boundary_coord = th;
        cp.restriction_index = ridx;
        cp.hessian_det = gpp / (R * R);  // arc-length second derivative
        Pt n = dom.outward_normal_at(cp.location);
        cp.normal_derivative = dot(f.grad(cp.location), n);
        cp.index = cp.normal_derivative > 0.0 ? ridx + 1 : ridx;
        out.push_back(cp);
    }
    std::sort(out.begin(), out.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) {
                  return a.value < b.value;
              });
    return out;
}

std::vector<CriticalPoint> boundary_minima(const ScalarField& f,
                                           const Domain& dom) {
    std::vector<CriticalPoint> out;
    for (const CriticalPoint& cp : boundary_critical_points(f, dom))
        if (cp.restriction_index == 0) out.push_back(cp);
    return out;
}

double min_boundary_value(const ScalarField& f, const Domain& dom) {
    if (dom.dim == 1) return std::min(f.value(pt(dom.a)), f.value(pt(dom.b)));
    double m = 1e300;
    const int kScan = 4096;
    for (int k = 0; k < kScan; ++k) {
        double th = 2.0 * std::numbers::pi * k / kScan;
        m = std::min(m, f.value(pt(dom.center[0] + dom.radius * std::cos(th),
                                   dom.center[1] + dom.radius * std::sin(th))));
    }
    for (const CriticalPoint& cp : boundary_minima(f, dom))
        m = std::min(m, cp.value);
    return m;
}

double kappa(const ScalarField& f, const Domain& omega_plus, double spacing) {
    double interior_min = 1e300;
    for (const Pt& x : seed_points(omega_plus, spacing))
        interior_min = std::min(interior_min, f.value(x));
    CriticalSet cs = find_critical_points(f, omega_plus, spacing);
    for (const CriticalPoint& cp : cs.points)
        interior_min = std::min(interior_min, cp.value);
    return min_boundary_value(f, omega_plus) - interior_min;
}

double cvmax(const ScalarField& f, const Domain& omega_minus, double spacing) {
    CriticalSet cs = find_critical_points(f, omega_minus, spacing);
    if (cs.points.empty())
        throw EmptyCriticalSetError("no interior critical points found");
    return cs.points.back().value;
}

}  // namespace kramers
