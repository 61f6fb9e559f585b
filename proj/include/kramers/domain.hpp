#pragma once

#include <string>

#include "kramers/core.hpp"

namespace kramers {

// Open interval (1D) or open disc (2D).
struct Domain {
    int dim = 1;
    double a = 0.0, b = 0.0;  // 1D
    Pt center{0.0, 0.0};
    double radius = 0.0;  // 2D

    static Domain interval(double a, double b);
    static Domain disc(Pt center, double radius);

    bool contains(const Pt& x) const;
    // > 0 inside, 0 on the boundary, < 0 outside.
    double boundary_clearance(const Pt& x) const;
    double diameter() const { return dim == 1 ? b - a : 2.0 * radius; }

    // t in [0,1): 1D maps {0 -> a, anything else -> b}; 2D maps to angle 2*pi*t.
    Pt boundary_point(double t) const;
    Pt outward_normal_at(const Pt& x) const;
    // 2D: angle of x around the center in [0, 2*pi). 1D: 0 for a-side, 1 for b-side.
    double boundary_coordinate(const Pt& x) const;
};

// Nested pair: closure(inner) strictly inside outer.
struct DomainPair {
    Domain inner, outer;
};

DomainPair make_domain_pair(const Domain& inner, const Domain& outer);

// The domain geometry each catalog entry was designed around.
DomainPair default_domain_pair(const std::string& field_name);

}  // namespace kramers
