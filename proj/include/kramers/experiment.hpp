#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kramers/catalog.hpp"
#include "kramers/domain.hpp"
#include "kramers/report.hpp"

namespace kramers {

struct BumpSpec {
    Pt center{0.0, 0.0};
    double radius = 0.0;
    double amplitude = 0.0;
};

// One experiment description, loaded from a JSON config file. `threads` and
// `out_dir` steer execution only and are excluded from report echoes so that
// re-runs with different worker counts stay byte-identical.
struct ExperimentConfig {
    std::string potential;
    FieldParams params;
    std::vector<BumpSpec> delta_f;
    DomainPair pair;
    std::vector<double> hs;
    double dx = 0.0;
    double spacing = 0.0;   // critical-point seeding step; 0 -> diameter/400
    double agmon_dx = 0.0;  // 0 -> diameter/2000 (1D), diameter/160 (2D)
    double agmon_margin = 0.0;
    int eigenpairs = 5;
    double nu_exponent = 1.2;  // counting threshold nu = h^exponent
    double nu_absolute = 0.0;  // > 0 overrides the exponent rule
    int mc_n = 0;
    double mc_dt = 0.0;  // 0 -> min(h^2/10, 1e-3)
    uint64_t seed = 0;
    int threads = 1;
    std::string out_dir = "out";
};

ExperimentConfig parse_config(const Json& j);

FieldPtr build_potential(const ExperimentConfig& cfg);
// Sum of the configured bumps, or nullptr when none are configured.
FieldPtr build_delta(const ExperimentConfig& cfg);
FieldPtr build_biased(const ExperimentConfig& cfg);

// Command drivers. Each writes report.json and its CSV outputs under
// cfg.out_dir and returns the process exit code: 0 for a passing run, 1 for
// a failed verdict. Usage and numeric errors propagate as exceptions.
int cmd_check(const ExperimentConfig& cfg);
int cmd_spectrum(const ExperimentConfig& cfg);
int cmd_asymptotics(const ExperimentConfig& cfg);
int cmd_mc(const ExperimentConfig& cfg);
int cmd_hyperdyn(const ExperimentConfig& cfg);

}  // namespace kramers
