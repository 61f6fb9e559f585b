#include "kramers/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <set>
#include <thread>

#include "kramers/agmon.hpp"
#include "kramers/asymptotics.hpp"
#include "kramers/hypotheses.hpp"
#include "kramers/mc.hpp"
#include "kramers/spectra.hpp"
#include "kramers/witten.hpp"

namespace kramers {

namespace {

std::vector<double> number_list(const Json& v, const std::string& what) {
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(v.get<double>());
    } else if (v.is_array()) {
        for (const Json& x : v) {
            if (!x.is_number()) throw UsageError(what + " must be numeric");
            out.push_back(x.get<double>());
        }
    } else {
        throw UsageError(what + " must be a number or an array of numbers");
    }
    if (out.empty()) throw UsageError(what + " is empty");
    return out;
}

Pt point_of(const Json& v, const std::string& what) {
    std::vector<double> c = number_list(v, what);
    if (c.size() == 1) return pt(c[0]);
    if (c.size() == 2) return pt(c[0], c[1]);
    throw UsageError(what + " must have 1 or 2 coordinates");
}

Domain parse_domain(const Json& v, const std::string& what) {
    if (v.is_array()) {
        std::vector<double> ab = number_list(v, what);
        if (ab.size() != 2) throw UsageError(what + " interval needs [a, b]");
        return Domain::interval(ab[0], ab[1]);
    }
    if (v.is_object()) {
        if (!v.contains("center") || !v.contains("radius"))
            throw UsageError(what + " disc needs center and radius");
        return Domain::disc(point_of(v["center"], what + ".center"),
                            v["radius"].get<double>());
    }
    throw UsageError(what + " must be [a, b] or {center, radius}");
}

double positive_number(const Json& v, const std::string& what) {
    if (!v.is_number()) throw UsageError(what + " must be a number");
    double x = v.get<double>();
    if (x <= 0.0) throw UsageError(what + " must be positive");
    return x;
}

}  // namespace

ExperimentConfig parse_config(const Json& j) {
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    static const std::set<std::string> known = {
        "potential", "delta_f", "domain",      "h",    "beta",
        "dx",        "spacing", "agmon_dx",    "agmon_margin",
        "eigenpairs", "nu",     "mc",          "seed", "threads",
        "out"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key()))
            throw UsageError("unknown config key: " + it.key());

    ExperimentConfig cfg;
    if (!j.contains("potential")) throw UsageError("config needs a potential");
    const Json& pot = j["potential"];
    if (pot.is_string()) {
        cfg.potential = pot.get<std::string>();
    } else if (pot.is_object()) {
        if (!pot.contains("name")) throw UsageError("potential needs a name");
        cfg.potential = pot["name"].get<std::string>();
        if (pot.contains("params"))
            for (auto it = pot["params"].begin(); it != pot["params"].end();
                 ++it)
                cfg.params.num[it.key()] = it.value().get<double>();
        if (pot.contains("lists"))
            for (auto it = pot["lists"].begin(); it != pot["lists"].end();
                 ++it)
                cfg.params.vec[it.key()] =
                    number_list(it.value(), "potential list " + it.key());
    } else {
        throw UsageError("potential must be a name or {name, params}");
    }
    FieldPtr f = make_field(cfg.potential, cfg.params);

    if (j.contains("delta_f")) {
        if (!j["delta_f"].is_array())
            throw UsageError("delta_f must be an array of bumps");
        for (const Json& b : j["delta_f"]) {
            BumpSpec spec;
            if (!b.contains("center") || !b.contains("radius") ||
                !b.contains("amplitude"))
                throw UsageError("each bump needs center, radius, amplitude");
            spec.center = point_of(b["center"], "bump center");
            spec.radius = positive_number(b["radius"], "bump radius");
            spec.amplitude = b["amplitude"].get<double>();
            cfg.delta_f.push_back(spec);
        }
    }

    if (j.contains("domain")) {
        const Json& d = j["domain"];
        if (!d.is_object() || !d.contains("inner") || !d.contains("outer"))
            throw UsageError("domain needs inner and outer");
        cfg.pair = make_domain_pair(parse_domain(d["inner"], "domain.inner"),
                                    parse_domain(d["outer"], "domain.outer"));
    } else {
        cfg.pair = default_domain_pair(cfg.potential);
    }
    if (cfg.pair.inner.dim != f->dim())
        throw UsageError("domain dimension does not match the potential");

    if (j.contains("h") == j.contains("beta"))
        throw UsageError("specify exactly one of h or beta");
    if (j.contains("h")) {
        cfg.hs = number_list(j["h"], "h");
    } else {
        for (double b : number_list(j["beta"], "beta")) {
            if (b <= 0.0) throw UsageError("beta must be positive");
            cfg.hs.push_back(2.0 / b);
        }
    }
    for (double h : cfg.hs)
        if (h <= 0.0) throw UsageError("h must be positive");

    if (j.contains("dx")) cfg.dx = positive_number(j["dx"], "dx");
    if (j.contains("spacing"))
        cfg.spacing = positive_number(j["spacing"], "spacing");
    if (j.contains("agmon_dx"))
        cfg.agmon_dx = positive_number(j["agmon_dx"], "agmon_dx");
    if (j.contains("agmon_margin"))
        cfg.agmon_margin = j["agmon_margin"].get<double>();
    if (j.contains("eigenpairs")) {
        cfg.eigenpairs = j["eigenpairs"].get<int>();
        if (cfg.eigenpairs < 1) throw UsageError("eigenpairs must be >= 1");
    }
    if (j.contains("nu")) {
        const Json& nu = j["nu"];
        if (!nu.is_object() ||
            (nu.contains("exponent") == nu.contains("absolute")))
            throw UsageError("nu needs exactly one of exponent or absolute");
        if (nu.contains("exponent"))
            cfg.nu_exponent = positive_number(nu["exponent"], "nu.exponent");
        else
            cfg.nu_absolute = positive_number(nu["absolute"], "nu.absolute");
    }
    if (j.contains("mc")) {
        const Json& mc = j["mc"];
        if (!mc.is_object() || !mc.contains("n"))
            throw UsageError("mc needs at least n");
        cfg.mc_n = mc["n"].get<int>();
        if (cfg.mc_n < 0) throw UsageError("mc.n must be nonnegative");
        if (mc.contains("dt")) cfg.mc_dt = positive_number(mc["dt"], "mc.dt");
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("threads")) {
        cfg.threads = j["threads"].get<int>();
        if (cfg.threads < 1) throw UsageError("threads must be >= 1");
    }
    if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
    return cfg;
}

FieldPtr build_potential(const ExperimentConfig& cfg) {
    return make_field(cfg.potential, cfg.params);
}

FieldPtr build_delta(const ExperimentConfig& cfg) {
    if (cfg.delta_f.empty()) return nullptr;
    int dim = build_potential(cfg)->dim();
    std::vector<FieldPtr> terms;
    for (const BumpSpec& b : cfg.delta_f)
        terms.push_back(make_bump(dim, b.center, b.radius, b.amplitude));
    if (terms.size() == 1) return terms[0];
    return std::make_shared<SumField>(terms);
}

FieldPtr build_biased(const ExperimentConfig& cfg) {
    FieldPtr delta = build_delta(cfg);
    if (!delta) throw UsageError("this command needs a delta_f block");
    std::vector<FieldPtr> terms = {build_potential(cfg), delta};
    return std::make_shared<SumField>(terms);
}

namespace {

Json jnum(double v) {
    if (std::isfinite(v)) return Json(v);
    return Json(format_double(v));
}

Json jpoint(const Pt& p, int dim) {
    Json a = Json::array();
    a.push_back(p[0]);
    if (dim == 2) a.push_back(p[1]);
    return a;
}

Json domain_echo(const Domain& d) {
    Json a = Json::array();
    if (d.dim == 1) {
        a.push_back(d.a);
        a.push_back(d.b);
    } else {
        a.push_back(d.center[0]);
        a.push_back(d.center[1]);
        a.push_back(d.radius);
    }
    return a;
}

Json config_echo(const ExperimentConfig& cfg, int dim) {
    Json c;
    c["potential"] = cfg.potential;
    c["dim"] = dim;
    c["h"] = cfg.hs;
    if (cfg.dx > 0.0) c["dx"] = cfg.dx;
    c["inner_domain"] = domain_echo(cfg.pair.inner);
    c["outer_domain"] = domain_echo(cfg.pair.outer);
    c["nu_exponent"] =
        cfg.nu_absolute > 0.0 ? Json(nullptr) : Json(cfg.nu_exponent);
    c["nu_absolute"] =
        cfg.nu_absolute > 0.0 ? Json(cfg.nu_absolute) : Json(nullptr);
    if (cfg.mc_n > 0) {
        c["mc_n"] = cfg.mc_n;
        if (cfg.mc_dt > 0.0) c["mc_dt"] = cfg.mc_dt;
    }
    if (!cfg.params.num.empty()) {
        Json p;
        for (const auto& [k, v] : cfg.params.num) p[k] = v;
        c["params"] = p;
    }
    if (!cfg.delta_f.empty()) {
        Json arr = Json::array();
        for (const BumpSpec& b : cfg.delta_f) {
            Json one;
            one["center"] = jpoint(b.center, dim);
            one["radius"] = b.radius;
            one["amplitude"] = b.amplitude;
            arr.push_back(one);
        }
        c["delta_f"] = arr;
    }
    return c;
}

double nu_for(const ExperimentConfig& cfg, double h) {
    return cfg.nu_absolute > 0.0 ? cfg.nu_absolute
                                 : std::pow(h, cfg.nu_exponent);
}

double crit_spacing(const ExperimentConfig& cfg) {
    return cfg.spacing > 0.0 ? cfg.spacing
                             : cfg.pair.outer.diameter() / 400.0;
}

double agmon_step(const ExperimentConfig& cfg) {
    if (cfg.agmon_dx > 0.0) return cfg.agmon_dx;
    double d = cfg.pair.inner.diameter();
    return cfg.pair.inner.dim == 1 ? d / 2000.0 : d / 160.0;
}

double resolved_dt(const ExperimentConfig& cfg, double h) {
    return cfg.mc_dt > 0.0 ? cfg.mc_dt : std::min(h * h / 10.0, 1e-3);
}

// The smallest eigenvalue scales like exp(-2 kappa / h); below the double
// precision guard the discrete problem cannot separate it from solver noise.
void guard_resolvable(const ScalarField& f, const ExperimentConfig& cfg,
                      double h) {
    double k = kappa(f, cfg.pair.outer, crit_spacing(cfg));
    if (k > 0.0 && std::exp(-2.0 * k / h) < 1e-12)
        throw UsageError(
            "h too small for this barrier: exp(-2 kappa/h) < 1e-12");
}

void require_dx(const ExperimentConfig& cfg) {
    if (cfg.dx <= 0.0) throw UsageError("this command needs dx in the config");
}

std::string out_path(const ExperimentConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return (std::filesystem::path(cfg.out_dir) / name).string();
}

// index-ordered parallel loop; exceptions rethrown for the lowest index
void parallel_over(int n, int threads, const std::function<void(int)>& body) {
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errs(n);
    auto drain = [&]() {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                body(i);
            } catch (...) {
                errs[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(drain);
    for (std::thread& t : pool) t.join();
    for (int i = 0; i < n; ++i)
        if (errs[i]) std::rethrow_exception(errs[i]);
}

std::string h_tag(int i) { return "h" + std::to_string(i); }

}  // namespace

int cmd_check(const ExperimentConfig& cfg) {
    FieldPtr f = build_potential(cfg);
    int dim = f->dim();
    double spacing = crit_spacing(cfg);

    HypothesisReport rep = check_hypotheses(*f, cfg.pair, spacing);
    double adx = agmon_step(cfg);
    bool agmon_failed_to_run = false;
    std::string agmon_error;
    try {
        AgmonConditionResult ag =
            check_agmon_condition(*f, cfg.pair, adx, cfg.agmon_margin);
        rep.agmon_evaluated = true;
        rep.agmon_ok = ag.ok;
        rep.agmon_heuristic = ag.heuristic;
        rep.agmon_lhs = ag.lhs;
        rep.agmon_rhs = ag.rhs;
    } catch (const EmptyCriticalSetError& e) {
        agmon_failed_to_run = true;
        agmon_error = e.what();
    }

    Json report = report_envelope("check", cfg.seed);
    report["config"] = config_echo(cfg, dim);
    Json res;
    Json hyp;
    hyp["flow_ok"] = rep.flow_ok;
    hyp["boundary_clearance_ok"] = rep.boundary_clearance_ok;
    hyp["morse_ok"] = rep.morse_ok;
    hyp["distinctness_ok"] = rep.distinctness_ok;
    hyp["cv_gap_ok"] = rep.cv_gap_ok;
    hyp["kappa_f"] = jnum(rep.kappa_f);
    hyp["c0_margin"] = jnum(rep.c0_margin);
    hyp["cvmax"] = jnum(rep.cvmax_value);
    hyp["cv_gap_lhs"] = jnum(rep.cv_gap_lhs);
    hyp["cv_gap_rhs"] = jnum(rep.cv_gap_rhs);
    hyp["min_boundary_inner"] = jnum(rep.min_bnd_minus);
    hyp["min_boundary_outer"] = jnum(rep.min_bnd_plus);
    Json wits = Json::array();
    for (const Witness& w : rep.witnesses) {
        Json one;
        one["check"] = w.check;
        one["location"] = jpoint(w.location, dim);
        one["value"] = jnum(w.value);
        wits.push_back(one);
    }
    hyp["witnesses"] = wits;
    Json crits = Json::array();
    for (const CriticalPoint& cp : rep.interior.points) {
        Json one;
        one["location"] = jpoint(cp.location, dim);
        one["value"] = cp.value;
        one["index"] = cp.index;
        one["degenerate"] = cp.degenerate;
        crits.push_back(one);
    }
    hyp["critical_points"] = crits;
    res["hypotheses"] = hyp;
    Json ag;
    ag["evaluated"] = rep.agmon_evaluated;
    ag["ok"] = rep.agmon_ok;
    ag["heuristic"] = rep.agmon_heuristic;
    ag["lhs"] = jnum(rep.agmon_lhs);
    ag["rhs"] = jnum(rep.agmon_rhs);
    if (agmon_failed_to_run) ag["error"] = agmon_error;
    res["agmon"] = ag;

    // distance field from the inner boundary, for plotting
    {
        Grid grid = build_grid(cfg.pair.inner, adx, BC::neumann);
        AgmonGraph g = agmon_graph(*f, grid, true);
        std::vector<int> sources;
        double edge = dim == 1 ? 1.0001 * adx : 1.5 * adx;
        for (int i = 0; i < g.size(); ++i)
            if (cfg.pair.inner.boundary_clearance(g.xs[i]) <= edge)
                sources.push_back(i);
        std::vector<double> dist = agmon_distance_field(g, sources);
        CsvTable csv;
        csv.header = {"x", "y", "f", "grad_norm", "d_agmon"};
        for (int i = 0; i < g.size(); ++i)
            csv.add_row({g.xs[i][0], dim == 2 ? g.xs[i][1] : 0.0, g.fvals[i],
                         g.gnorm[i], dist[i]});
        write_csv(out_path(cfg, "agmon.csv"), csv);
    }

    bool passed = rep.required_pass();
    res["passed_required"] = passed;
    report["results"] = res;
    report["passed"] = passed;
    write_report(out_path(cfg, "report.json"), report);
    return passed ? 0 : 1;
}

namespace {

struct SpectrumCase {
    double h = 0.0, nu = 0.0;
    std::vector<double> eig_inner, res_inner, eig_outer, res_outer;
    int m0_inner = 0, m0_outer = 0;
    int m1_inner = -1, m1_outer = -1;  // 1D only
    int boundary_minima_count = -1;    // 2D only
    std::vector<Pt> nodes;
    std::vector<double> u1, qsd;
};

}  // namespace

int cmd_spectrum(const ExperimentConfig& cfg) {
    FieldPtr f = build_potential(cfg);
    int dim = f->dim();
    require_dx(cfg);

    std::vector<SpectrumCase> cases(cfg.hs.size());
    parallel_over((int)cfg.hs.size(), cfg.threads, [&](int i) {
        double h = cfg.hs[i];
        guard_resolvable(*f, cfg, h);
        SpectrumCase& sc = cases[i];
        sc.h = h;
        sc.nu = nu_for(cfg, h);

        Grid gi = build_grid(cfg.pair.inner, cfg.dx, BC::neumann);
        DiscreteOperator opn = assemble_witten0(*f, gi, h);
        SpectralResult srn = smallest_eigenpairs(opn, cfg.eigenpairs);
        sc.eig_inner = srn.eigenvalues;
        sc.res_inner = srn.residuals;
        sc.m0_inner = count_small(opn, sc.nu);

        Grid go = build_grid(cfg.pair.outer, cfg.dx, BC::dirichlet);
        DiscreteOperator opd = assemble_witten0(*f, go, h);
        SpectralResult srd = smallest_eigenpairs(opd, cfg.eigenpairs);
        sc.eig_outer = srd.eigenvalues;
        sc.res_outer = srd.residuals;
        sc.m0_outer = count_small(opd, sc.nu);

        if (dim == 1) {
            DiscreteOperator m1n =
                assemble_witten1_1d(f, cfg.pair.inner, cfg.dx, h, BC::neumann);
            sc.m1_inner = count_small(m1n, sc.nu);
            DiscreteOperator m1d = assemble_witten1_1d(f, cfg.pair.outer,
                                                       cfg.dx, h, BC::dirichlet);
            sc.m1_outer = count_small(m1d, sc.nu);
        } else {
            sc.boundary_minima_count =
                (int)boundary_minima(*f, cfg.pair.outer).size();
        }

        sc.nodes = go.nodes;
        sc.u1.resize(go.size());
        for (int k = 0; k < go.size(); ++k) sc.u1[k] = srd.vectors(k, 0);
        sc.qsd = qsd_density(opd, go, srd);
    });

    CsvTable eigcsv;
    eigcsv.header = {"h", "domain", "bc", "j", "lambda", "residual"};
    for (const SpectrumCase& sc : cases) {
        for (size_t k = 0; k < sc.eig_inner.size(); ++k)
            eigcsv.add_row({format_double(sc.h), "inner", "neumann",
                            std::to_string(k + 1),
                            format_double(sc.eig_inner[k]),
                            format_double(sc.res_inner[k])});
        for (size_t k = 0; k < sc.eig_outer.size(); ++k)
            eigcsv.add_row({format_double(sc.h), "outer", "dirichlet",
                            std::to_string(k + 1),
                            format_double(sc.eig_outer[k]),
                            format_double(sc.res_outer[k])});
    }
    write_csv(out_path(cfg, "eigenvalues.csv"), eigcsv);

    for (size_t i = 0; i < cases.size(); ++i) {
        const SpectrumCase& sc = cases[i];
        CsvTable vec;
        vec.header = {"x", "y", "u1", "qsd"};
        for (size_t k = 0; k < sc.nodes.size(); ++k)
            vec.add_row({sc.nodes[k][0], dim == 2 ? sc.nodes[k][1] : 0.0,
                         sc.u1[k], sc.qsd[k]});
        write_csv(out_path(cfg, "eigenvector_" + h_tag((int)i) + ".csv"), vec);
    }

    Json report = report_envelope("spectrum", cfg.seed);
    report["config"] = config_echo(cfg, dim);
    Json arr = Json::array();
    for (const SpectrumCase& sc : cases) {
        Json one;
        one["h"] = sc.h;
        one["nu"] = sc.nu;
        Json counts;
        counts["m0_neumann_inner"] = sc.m0_inner;
        counts["m0_dirichlet_outer"] = sc.m0_outer;
        if (dim == 1) {
            counts["m1_neumann_inner"] = sc.m1_inner;
            counts["m1_dirichlet_outer"] = sc.m1_outer;
        } else {
            counts["boundary_minima"] = sc.boundary_minima_count;
        }
        one["counts"] = counts;
        one["eigenvalues_neumann_inner"] = sc.eig_inner;
        one["eigenvalues_dirichlet_outer"] = sc.eig_outer;
        arr.push_back(one);
    }
    Json res;
    res["cases"] = arr;
    report["results"] = res;
    report["passed"] = true;
    write_report(out_path(cfg, "report.json"), report);
    return 0;
}

namespace {

struct AsymptoticsCase {
    double h = 0.0;
    double lambda_numeric = 0.0, lambda_flux = 0.0;
    double lambda_hessian = 0.0;
    bool hessian_ok = false;
    std::string hessian_error;
    VolumeIntegral bracket;
    BoundaryDensity pde, flux_form;
    BoundaryDensity gauss_form;
    bool gauss_ok = false;
    double l1_pde_flux = -1.0, l1_pde_gauss = -1.0;
    // biased-potential block
    bool has_boost = false;
    double boost = 0.0, lambda_biased = 0.0, identity_residual = 0.0;
    double exit_l1_invariance = -1.0;
};

double density_l1(const BoundaryDensity& p, const BoundaryDensity& q) {
    double s = 0.0;
    for (size_t k = 0; k < p.values.size(); ++k)
        s += std::abs(p.mass((int)k) - q.mass((int)k));
    return s;
}

}  // namespace

int cmd_asymptotics(const ExperimentConfig& cfg) {
    FieldPtr f = build_potential(cfg);
    int dim = f->dim();
    require_dx(cfg);
    FieldPtr delta = build_delta(cfg);
    double spacing = crit_spacing(cfg);

    std::vector<AsymptoticsCase> cases(cfg.hs.size());
    parallel_over((int)cfg.hs.size(), cfg.threads, [&](int i) {
        double h = cfg.hs[i];
        guard_resolvable(*f, cfg, h);
        AsymptoticsCase& ac = cases[i];
        ac.h = h;

        Grid go = build_grid(cfg.pair.outer, cfg.dx, BC::dirichlet);
        DiscreteOperator opd = assemble_witten0(*f, go, h);
        SpectralResult srd = smallest_eigenpairs(opd, 1);
        ac.lambda_numeric = srd.eigenvalues[0];
        ac.pde = exit_density_pde(opd, go, srd);

        ac.lambda_flux = lambda1_asymptotic(*f, cfg.pair.outer, h,
                                            RateMethod::flux, cfg.dx);
        try {
            ac.lambda_hessian = lambda1_asymptotic(
                *f, cfg.pair.outer, h, RateMethod::hessian, cfg.dx, spacing);
            ac.hessian_ok = true;
        } catch (const DegenerateMinimumError& e) {
            ac.hessian_error = e.what();
        }
        ac.bracket = laplace_volume_integral(*f, cfg.pair.outer, h,
                                             IntegralMethod::quadrature,
                                             cfg.dx);
        ac.flux_form = exit_density_asymptotic(*f, cfg.pair.outer, h,
                                               DensityForm::flux);
        try {
            ac.gauss_form = exit_density_asymptotic(
                *f, cfg.pair.outer, h, DensityForm::gaussian_mixture);
            ac.gauss_ok = true;
        } catch (const DegenerateMinimumError&) {
        }
        ac.l1_pde_flux = density_l1(ac.pde, ac.flux_form);
        if (ac.gauss_ok) ac.l1_pde_gauss = density_l1(ac.pde, ac.gauss_form);

        if (delta) {
            ac.has_boost = true;
            ac.boost = boost_factor(*f, *delta, cfg.pair, h, cfg.dx);
            FieldPtr fb = build_biased(cfg);
            DiscreteOperator opb = assemble_witten0(*fb, go, h);
            SpectralResult srb = smallest_eigenpairs(opb, 1);
            ac.lambda_biased = srb.eigenvalues[0];
            ac.identity_residual =
                ac.lambda_biased / (ac.boost * ac.lambda_numeric) - 1.0;
            BoundaryDensity pde_b = exit_density_pde(opb, go, srb);
            ac.exit_l1_invariance = density_l1(ac.pde, pde_b);
        }
    });

    CsvTable hseries;
    hseries.header = {"h",       "lambda1_numeric", "lambda1_flux",
                      "lambda1_hessian", "h_log_lambda1"};
    for (const AsymptoticsCase& ac : cases)
        hseries.add_row({format_double(ac.h), format_double(ac.lambda_numeric),
                         format_double(ac.lambda_flux),
                         ac.hessian_ok ? format_double(ac.lambda_hessian)
                                       : std::string("nan"),
                         format_double(ac.h * std::log(ac.lambda_numeric))});
    write_csv(out_path(cfg, "eigenvalues.csv"), hseries);

    CsvTable dens;
    dens.header = {"h", "form", "coord", "value"};
    for (const AsymptoticsCase& ac : cases) {
        auto dump = [&](const char* form, const BoundaryDensity& bd) {
            for (size_t k = 0; k < bd.values.size(); ++k)
                dens.add_row({format_double(ac.h), form,
                              format_double(bd.locations[k]),
                              format_double(bd.values[k])});
        };
        dump("pde", ac.pde);
        dump("flux", ac.flux_form);
        if (ac.gauss_ok) dump("gaussian", ac.gauss_form);
    }
    write_csv(out_path(cfg, "exitdensity.csv"), dens);

    Json report = report_envelope("asymptotics", cfg.seed);
    report["config"] = config_echo(cfg, dim);
    Json arr = Json::array();
    bool all_bracketed = true;
    for (const AsymptoticsCase& ac : cases) {
        Json one;
        one["h"] = ac.h;
        one["lambda1_numeric"] = ac.lambda_numeric;
        one["lambda1_flux"] = ac.lambda_flux;
        one["lambda1_hessian"] =
            ac.hessian_ok ? Json(ac.lambda_hessian) : Json(nullptr);
        if (!ac.hessian_ok) one["hessian_error"] = ac.hessian_error;
        one["flux_rel_err"] = ac.lambda_numeric / ac.lambda_flux - 1.0;
        if (ac.hessian_ok)
            one["hessian_over_flux"] = ac.lambda_hessian / ac.lambda_flux;
        Json br;
        br["value"] = ac.bracket.value;
        br["fshift"] = ac.bracket.fshift;
        br["lower"] = ac.bracket.lower;
        br["upper"] = ac.bracket.upper;
        br["within"] = ac.bracket.within_bracket;
        one["volume_bracket"] = br;
        all_bracketed = all_bracketed && ac.bracket.within_bracket;
        if (ac.l1_pde_flux >= 0.0) one["exit_l1_pde_vs_flux"] = ac.l1_pde_flux;
        if (ac.l1_pde_gauss >= 0.0)
            one["exit_l1_pde_vs_gaussian"] = ac.l1_pde_gauss;
        if (ac.has_boost) {
            Json bj;
            bj["boost"] = ac.boost;
            bj["lambda1_biased"] = ac.lambda_biased;
            bj["identity_residual"] = ac.identity_residual;
            if (ac.exit_l1_invariance >= 0.0)
                bj["exit_l1_invariance"] = ac.exit_l1_invariance;
            one["hyperdynamics"] = bj;
        }
        arr.push_back(one);
    }
    Json res;
    res["cases"] = arr;
    if (cfg.hs.size() >= 3) {
        std::vector<double> lams;
        for (const AsymptoticsCase& ac : cases)
            lams.push_back(ac.lambda_numeric);
        SlopeFit fit = slope_fit(cfg.hs, lams);
        Json sj;
        sj["slope"] = fit.slope;
        sj["intercept"] = fit.intercept;
        sj["r2"] = fit.r2;
        sj["minus_two_kappa"] = -2.0 * kappa(*f, cfg.pair.outer, spacing);
        res["slope_fit"] = sj;
    }
    report["results"] = res;
    report["passed"] = all_bracketed;
    write_report(out_path(cfg, "report.json"), report);
    return all_bracketed ? 0 : 1;
}

namespace {

struct McCase {
    double h = 0.0, beta = 0.0, dt = 0.0;
    double lambda1 = 0.0, rate = 0.0;
    ExitStatistics stats;
    KsResult ks;
    Chi2Result chi2;
    double tv = 0.0, censor_fraction = 0.0;
    bool rate_consistent = false;
    bool passed = false;
};

void append_samples(CsvTable& csv, double h, int arm,
                    const ExitStatistics& stats) {
    for (size_t i = 0; i < stats.samples.size(); ++i) {
        const ExitSample& s = stats.samples[i];
        csv.add_row({format_double(h), std::to_string(arm),
                     std::to_string(i), format_double(s.tau),
                     format_double(s.boundary_coord), std::to_string(s.steps),
                     s.censored ? "1" : "0"});
    }
}

}  // namespace

int cmd_mc(const ExperimentConfig& cfg) {
    FieldPtr f = build_potential(cfg);
    int dim = f->dim();
    require_dx(cfg);
    if (cfg.mc_n <= 0) throw UsageError("mc.n must be positive for this command");

    std::vector<McCase> cases(cfg.hs.size());
    CsvTable samples;
    samples.header = {"h", "arm", "index", "tau", "boundary_coord", "steps",
                      "censored"};
    for (size_t i = 0; i < cfg.hs.size(); ++i) {
        double h = cfg.hs[i];
        guard_resolvable(*f, cfg, h);
        McCase& mcc = cases[i];
        mcc.h = h;
        mcc.beta = 2.0 / h;
        mcc.dt = resolved_dt(cfg, h);

        Grid go = build_grid(cfg.pair.outer, cfg.dx, BC::dirichlet);
        DiscreteOperator opd = assemble_witten0(*f, go, h);
        SpectralResult srd = smallest_eigenpairs(opd, 1);
        mcc.lambda1 = srd.eigenvalues[0];
        mcc.rate = generator_rate(mcc.lambda1, h);
        std::vector<double> qsd = qsd_density(opd, go, srd);
        BoundaryDensity pde = exit_density_pde(opd, go, srd);

        McConfig run;
        run.beta = mcc.beta;
        run.dt = mcc.dt;
        run.seed = cfg.seed;
        run.threads = cfg.threads;
        run.n = cfg.mc_n;
        mcc.stats = run_exits(*f, cfg.pair.outer, qsd, go, run);

        std::vector<double> taus = mcc.stats.taus();
        mcc.ks = ks_exponential(taus, mcc.rate);
        mcc.chi2 = chi2_independence(taus, mcc.stats.boundary_coords());
        mcc.tv = exit_location_tv(mcc.stats, pde);
        mcc.censor_fraction =
            (double)mcc.stats.censored_count / (double)cfg.mc_n;
        mcc.rate_consistent =
            std::abs(mcc.stats.empirical_rate - mcc.rate) <=
            3.0 * mcc.rate / std::sqrt((double)taus.size());
        mcc.passed = mcc.ks.p_value > 0.01 && mcc.chi2.p_value > 0.01 &&
                     mcc.tv <= 0.05 && mcc.censor_fraction < 1e-3 &&
                     mcc.rate_consistent;
        append_samples(samples, h, 0, mcc.stats);
    }
    write_csv(out_path(cfg, "samples.csv"), samples);

    Json report = report_envelope("mc", cfg.seed);
    report["config"] = config_echo(cfg, dim);
    Json arr = Json::array();
    bool all_passed = true;
    for (const McCase& mcc : cases) {
        Json one;
        one["h"] = mcc.h;
        one["beta"] = mcc.beta;
        one["dt"] = mcc.dt;
        one["n"] = cfg.mc_n;
        one["lambda1"] = mcc.lambda1;
        one["rate_pde"] = mcc.rate;
        one["mean_tau"] = mcc.stats.mean_tau;
        one["se_tau"] = mcc.stats.se_tau;
        one["empirical_rate"] = mcc.stats.empirical_rate;
        one["censored"] = mcc.stats.censored_count;
        one["censor_fraction"] = mcc.censor_fraction;
        Json ks;
        ks["statistic"] = mcc.ks.statistic;
        ks["p_value"] = mcc.ks.p_value;
        one["ks_exponential"] = ks;
        Json c2;
        c2["statistic"] = mcc.chi2.statistic;
        c2["p_value"] = mcc.chi2.p_value;
        c2["dof"] = mcc.chi2.dof;
        c2["tau_bins"] = mcc.chi2.tau_bins;
        c2["loc_bins"] = mcc.chi2.loc_bins;
        one["chi2_independence"] = c2;
        one["tv_vs_pde"] = mcc.tv;
        one["rate_consistent"] = mcc.rate_consistent;
        one["passed"] = mcc.passed;
        all_passed = all_passed && mcc.passed;
        arr.push_back(one);
    }
    Json res;
    res["cases"] = arr;
    report["results"] = res;
    report["passed"] = all_passed;
    write_report(out_path(cfg, "report.json"), report);
    return all_passed ? 0 : 1;
}

int cmd_hyperdyn(const ExperimentConfig& cfg) {
    FieldPtr f = build_potential(cfg);
    int dim = f->dim();
    require_dx(cfg);
    if (cfg.mc_n <= 0) throw UsageError("mc.n must be positive for this command");
    FieldPtr delta = build_delta(cfg);
    if (!delta) throw UsageError("hyperdyn needs a delta_f block");
    FieldPtr fb = build_biased(cfg);

    Json report = report_envelope("hyperdyn", cfg.seed);
    report["config"] = config_echo(cfg, dim);
    Json arr = Json::array();
    CsvTable samples;
    samples.header = {"h", "arm", "index", "tau", "boundary_coord", "steps",
                      "censored"};
    bool all_passed = true;
    for (size_t i = 0; i < cfg.hs.size(); ++i) {
        double h = cfg.hs[i];
        guard_resolvable(*f, cfg, h);
        double beta = 2.0 / h;
        double dt = resolved_dt(cfg, h);

        Grid go = build_grid(cfg.pair.outer, cfg.dx, BC::dirichlet);
        DiscreteOperator opa = assemble_witten0(*f, go, h);
        SpectralResult sra = smallest_eigenpairs(opa, 1);
        std::vector<double> qsd_a = qsd_density(opa, go, sra);
        DiscreteOperator opb = assemble_witten0(*fb, go, h);
        SpectralResult srb = smallest_eigenpairs(opb, 1);
        std::vector<double> qsd_b = qsd_density(opb, go, srb);

        double boost = boost_factor(*f, *delta, cfg.pair, h, cfg.dx);

        McConfig run;
        run.beta = beta;
        run.dt = dt;
        run.seed = cfg.seed;
        run.threads = cfg.threads;
        run.n = cfg.mc_n;
        ExitStatistics arm_a = run_exits(*f, cfg.pair.outer, qsd_a, go, run);
        ExitStatistics arm_b =
            run_exits(*fb, cfg.pair.outer, qsd_b, go, run, (uint64_t)cfg.mc_n);

        HyperdynReport hd = hyperdyn_compare(arm_a, arm_b, boost);
        HyperdynReport control = hyperdyn_compare(arm_a, arm_b, 2.0 * boost);
        bool control_rejects = control.ks.p_value < 0.01;
        bool passed = hd.ks_ok && hd.tv_ok;
        all_passed = all_passed && passed;

        append_samples(samples, h, 0, arm_a);
        append_samples(samples, h, 1, arm_b);

        Json one;
        one["h"] = h;
        one["beta"] = beta;
        one["dt"] = dt;
        one["n"] = cfg.mc_n;
        one["boost"] = boost;
        one["lambda1"] = sra.eigenvalues[0];
        one["lambda1_biased"] = srb.eigenvalues[0];
        Json ks;
        ks["statistic"] = hd.ks.statistic;
        ks["p_value"] = hd.ks.p_value;
        one["ks_two_sample"] = ks;
        one["tv_exit_histograms"] = hd.tv;
        one["mean_tau_base"] = hd.mean_tau_base;
        one["mean_tau_biased_scaled"] = hd.mean_tau_biased;
        one["censored_base"] = arm_a.censored_count;
        one["censored_biased"] = arm_b.censored_count;
        Json ctl;
        ctl["boost"] = 2.0 * boost;
        ctl["ks_p_value"] = control.ks.p_value;
        ctl["rejects"] = control_rejects;
        one["negative_control"] = ctl;
        one["ks_ok"] = hd.ks_ok;
        one["tv_ok"] = hd.tv_ok;
        one["passed"] = passed;
        arr.push_back(one);
    }
    write_csv(out_path(cfg, "samples.csv"), samples);

    Json res;
    res["cases"] = arr;
    report["results"] = res;
    report["passed"] = all_passed;
    write_report(out_path(cfg, "report.json"), report);
    return all_passed ? 0 : 1;
}

}  // namespace kramers
