#pragma once

#include <map>
#include <string>
#include <vector>

#include "kramers/field.hpp"

namespace kramers {

// Parameter map for catalog construction. Scalars live in `num`,
// point/coefficient lists in `vec` ("centers" packs 2D points flat).
struct FieldParams {
    std::map<std::string, double> num;
    std::map<std::string, std::vector<double>> vec;

    double get(const std::string& k, double dflt) const {
        auto it = num.find(k);
        return it == num.end() ? dflt : it->second;
    }
};

// Catalog names: harmonic1d, doublewell1d, polynomial1d, threewell1d,
// flatbottom1d, flatmulti1d, fig-ok-1d, fig-notok-1d, radial2d,
// multiwell2d, radialspline2d.
FieldPtr make_field(const std::string& name, const FieldParams& params = {});

FieldPtr make_bump(int dim, Pt center, double radius, double amplitude);

// Names of all catalog entries, for sweep-style tests.
std::vector<std::string> catalog_names();

}  // namespace kramers
