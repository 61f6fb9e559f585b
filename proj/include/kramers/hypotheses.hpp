#pragma once

#include <string>
#include <vector>

#include "kramers/core.hpp"
#include "kramers/critical.hpp"
#include "kramers/domain.hpp"
#include "kramers/field.hpp"

namespace kramers {

struct HypothesisTolerances {
    double grad = 1e-8;      // scales the sampled gradient magnitude
    double eig = 1e-6;       // scales the sampled Hessian magnitude
    double distinct = 1e-6;  // scales the critical-value range
};

struct Witness {
    std::string check;
    Pt location = pt(0.0);
    double value = 0.0;
};

struct HypothesisReport {
    // gradient nonzero between the domains, outflow on the inner boundary,
    // outer boundary at least as high as the inner one
    bool flow_ok = false;
    // min over the outer boundary clears the largest critical value
    bool boundary_clearance_ok = false;
    bool morse_ok = false;
    bool distinctness_ok = false;
    // inner boundary height dominates: min bnd(inner) - cvmax > cvmax - min f
    bool cv_gap_ok = false;
    // filled by the agmon module, left unevaluated here
    bool agmon_ok = false;
    bool agmon_evaluated = false;
    bool agmon_heuristic = false;
    double agmon_lhs = 0.0, agmon_rhs = 0.0;

    double c0_margin = 0.0;
    double kappa_f = 0.0;
    double cvmax_value = 0.0;
    double cv_gap_lhs = 0.0, cv_gap_rhs = 0.0;
    double min_bnd_plus = 0.0, min_bnd_minus = 0.0;
    bool has_interior_critical = false;

    std::vector<Witness> witnesses;
    CriticalSet interior;  // critical set of the inner domain

    // the checks that gate the geometry verdict; morse/distinctness are
    // reported but do not fail the run on their own
    bool required_pass() const {
        return flow_ok && boundary_clearance_ok && cv_gap_ok &&
               (!agmon_evaluated || agmon_ok);
    }
};

HypothesisReport check_hypotheses(const ScalarField& f, const DomainPair& pair,
                                  double spacing,
                                  HypothesisTolerances tol = {});

}  // namespace kramers
