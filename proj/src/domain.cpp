#include "kramers/domain.hpp"

namespace kramers {

Domain Domain::interval(double a, double b) {
    if (!(a < b)) throw UsageError("interval needs a < b");
    Domain d;
    d.dim = 1;
    d.a = a;
    d.b = b;
    return d;
}

Domain Domain::disc(Pt center, double radius) {
    if (!(radius > 0.0)) throw UsageError("disc needs radius > 0");
    Domain d;
    d.dim = 2;
    d.center = center;
    d.radius = radius;
    return d;
}

bool Domain::contains(const Pt& x) const {
    if (dim == 1) return x[0] > a && x[0] < b;
    Pt d = x - center;
    return d[0] * d[0] + d[1] * d[1] < radius * radius;
}

double Domain::boundary_clearance(const Pt& x) const {
    if (dim == 1) return std::min(x[0] - a, b - x[0]);
    return radius - norm2(x - center);
}

Pt Domain::boundary_point(double t) const {
    if (dim == 1) return pt(t < 0.5 ? a : b);
    double th = 2.0 * M_PI * t;
    return {center[0] + radius * std::cos(th), center[1] + radius * std::sin(th)};
}

Pt Domain::outward_normal_at(const Pt& x) const {
    if (dim == 1) return pt(x[0] < 0.5 * (a + b) ? -1.0 : 1.0);
    Pt d = x - center;
    double r = norm2(d);
    if (r < 1e-14) throw UsageError("normal undefined at the disc center");
    return {d[0] / r, d[1] / r};
}

double Domain::boundary_coordinate(const Pt& x) const {
    if (dim == 1) return x[0] < 0.5 * (a + b) ? 0.0 : 1.0;
    Pt d = x - center;
    double th = std::atan2(d[1], d[0]);
    if (th < 0.0) th += 2.0 * M_PI;
    return th;
}

DomainPair make_domain_pair(const Domain& inner, const Domain& outer) {
    if (inner.dim != outer.dim)
        throw DimensionError("domain pair mixes dimensions");
    bool nested;
    if (inner.dim == 1) {
        nested = outer.a < inner.a && inner.b < outer.b;
    } else {
        nested = norm2(inner.center - outer.center) + inner.radius < outer.radius;
    }
    if (!nested)
        throw UsageError("closure of the inner domain must lie inside the outer");
    return {inner, outer};
}

DomainPair default_domain_pair(const std::string& name) {
    if (name == "threewell1d")
        return make_domain_pair(Domain::interval(-0.85, 0.85),
                                Domain::interval(-0.9, 0.9));
    if (name == "flatbottom1d")
        return make_domain_pair(Domain::interval(-0.6, 0.6),
                                Domain::interval(-1.0, 1.0));
    if (name == "flatmulti1d")
        return make_domain_pair(Domain::interval(-0.9, 0.9),
                                Domain::interval(-1.0, 1.0));
    if (name == "fig-ok-1d")
        return make_domain_pair(Domain::interval(-1.0, 1.0),
                                Domain::interval(-1.15, 1.15));
    if (name == "fig-notok-1d")
        return make_domain_pair(Domain::interval(-0.55, 1.25),
                                Domain::interval(-0.75, 1.45));
    if (name == "radial2d") {
        double R = 3.2;
        return make_domain_pair(Domain::disc({-R, 0.0}, 2.0 * R - 1.0),
                                Domain::disc({-R, 0.0}, 2.0 * R));
    }
    if (name == "multiwell2d")
        return make_domain_pair(Domain::disc({0.0, 0.0}, 2.0),
                                Domain::disc({0.0, 0.0}, 2.4));
    if (name == "radialspline2d")
        return make_domain_pair(Domain::disc({0.0, 0.0}, 1.9),
                                Domain::disc({0.0, 0.0}, 2.4));
    // harmonic1d, doublewell1d, polynomial1d and anything unlisted share the
    // unit-interval pair every 1D example was tuned on.
    return make_domain_pair(Domain::interval(-0.8, 0.8),
                            Domain::interval(-1.0, 1.0));
}

}  // namespace kramers
