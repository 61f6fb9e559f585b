#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kramers/catalog.hpp"
#include "kramers/mc.hpp"
#include "kramers/spectra.hpp"

using namespace kramers;

namespace {

struct PdeSetup {
    Grid grid;
    std::vector<double> qsd;
    double lambda1;
};

PdeSetup doublewell_qsd(double a, double b, double h, double dx) {
    auto f = make_field("doublewell1d");
    Grid grid = build_grid(Domain::interval(a, b), dx, BC::dirichlet);
    DiscreteOperator op = assemble_witten0(*f, grid, h);
    SpectralResult sr = smallest_eigenpairs(op, 1);
    return {grid, qsd_density(op, grid, sr), sr.eigenvalues[0]};
}

}  // namespace

TEST_CASE("em step algebra") {
    auto f = make_field("harmonic1d");
    Pt x = em_step(*f, pt(1.0), 0.01, 4.0, pt(0.5));
    CHECK(x[0] == doctest::Approx(1.0 - 0.01 + std::sqrt(0.005) * 0.5)
                      .epsilon(1e-15));
    CHECK(x[1] == 0.0);

    auto g = make_field("multiwell2d");
    Pt y0 = pt(0.3, -0.4);
    Pt y = em_step(*g, y0, 0.002, 10.0, pt(-1.0, 2.0));
    Pt gr = g->grad(y0);
    double s = std::sqrt(2.0 * 0.002 / 10.0);
    CHECK(y[0] == doctest::Approx(y0[0] - gr[0] * 0.002 - s).epsilon(1e-14));
    CHECK(y[1] == doctest::Approx(y0[1] - gr[1] * 0.002 + 2.0 * s).epsilon(1e-14));
}

TEST_CASE("qsd sampler inverts a uniform density") {
    Grid grid = build_grid(Domain::interval(0.0, 1.0), 0.01, BC::neumann);
    std::vector<double> density(grid.nodes.size(), 1.0);
    RngStream rng(5, 0);
    int n = 5000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = sample_qsd(density, grid, rng)[0];
    std::sort(xs.begin(), xs.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        d = std::max(d, std::abs(xs[i] - (i + 1.0) / n));
        d = std::max(d, std::abs(xs[i] - (double)i / n));
    }
    CHECK(d < 0.03);
}

TEST_CASE("qsd sampler concentrates on a spike") {
    Grid grid = build_grid(Domain::interval(0.0, 1.0), 0.01, BC::neumann);
    std::vector<double> density(grid.nodes.size(), 0.0);
    density[40] = 1.0;
    RngStream rng(6, 0);
    for (int i = 0; i < 200; ++i) {
        double x = sample_qsd(density, grid, rng)[0];
        CHECK(std::abs(x - grid.nodes[40][0]) <= 0.01 + 1e-12);
    }
}

TEST_CASE("2d rejection sampler stays inside and is centered") {
    auto f = make_field("radialspline2d");
    Domain disc = Domain::disc({0.0, 0.0}, 1.0);
    Grid grid = build_grid(disc, 0.05, BC::neumann);
    std::vector<double> density(grid.nodes.size(), 1.0);
    RngStream rng(7, 0);
    double mx = 0.0, my = 0.0;
    int n = 2000;
    for (int i = 0; i < n; ++i) {
        Pt x = sample_qsd(density, grid, rng);
        CHECK(disc.contains(x));
        mx += x[0] / n;
        my += x[1] / n;
    }
    CHECK(std::abs(mx) <= 0.05);
    CHECK(std::abs(my) <= 0.05);
}

TEST_CASE("run_exits is deterministic in the worker count") {
    auto f = make_field("doublewell1d");
    Domain omega = Domain::interval(-0.7, 0.7);
    PdeSetup ref = doublewell_qsd(-0.7, 0.7, 0.2, 2e-3);

    McConfig cfg;
    cfg.beta = 10.0;
    cfg.dt = 5e-4;
    cfg.seed = 99;
    cfg.n = 74;
    cfg.threads = 1;
    ExitStatistics s1 = run_exits(*f, omega, ref.qsd, ref.grid, cfg);
    cfg.threads = 4;
    ExitStatistics s4 = run_exits(*f, omega, ref.qsd, ref.grid, cfg);
    REQUIRE(s1.samples.size() == s4.samples.size());
    for (size_t i = 0; i < s1.samples.size(); ++i) {
        CHECK(s1.samples[i].tau == s4.samples[i].tau);
        CHECK(s1.samples[i].boundary_coord == s4.samples[i].boundary_coord);
        CHECK(s1.samples[i].steps == s4.samples[i].steps);
    }

    // stream indices are absolute: an offset run reproduces the tail
    McConfig tail = cfg;
    tail.n = 64;
    ExitStatistics st = run_exits(*f, omega, ref.qsd, ref.grid, tail, 10);
    for (size_t i = 0; i < st.samples.size(); ++i)
        CHECK(st.samples[i].tau == s1.samples[i + 10].tau);
}

TEST_CASE("step size guards") {
    auto f = make_field("doublewell1d");
    Domain omega = Domain::interval(-0.7, 0.7);
    PdeSetup ref = doublewell_qsd(-0.7, 0.7, 0.2, 2e-3);
    McConfig cfg;
    cfg.beta = 10.0;
    cfg.seed = 1;
    cfg.n = 4;
    cfg.dt = 2e-3;  // above the absolute 1e-3 cap
    CHECK_THROWS_AS(run_exits(*f, omega, ref.qsd, ref.grid, cfg), UsageError);
    cfg.beta = 40.0;  // h = 0.05, cap h^2/10 = 2.5e-4
    cfg.dt = 5e-4;
    CHECK_THROWS_AS(run_exits(*f, omega, ref.qsd, ref.grid, cfg), UsageError);
}

TEST_CASE("exit rate agrees with the generator rate") {
    auto f = make_field("doublewell1d");
    Domain omega = Domain::interval(-0.7, 0.7);
    double h = 0.2;
    PdeSetup ref = doublewell_qsd(-0.7, 0.7, h, 2e-3);
    double rate = generator_rate(ref.lambda1, h);

    McConfig cfg;
    cfg.beta = 10.0;
    cfg.dt = 5e-4;
    cfg.seed = 2024;
    cfg.n = 500;
    ExitStatistics st = run_exits(*f, omega, ref.qsd, ref.grid, cfg);
    CHECK(st.censored_count == 0);
    CHECK(st.mean_tau == doctest::Approx(1.0 / rate).epsilon(0.2));
    CHECK(st.empirical_rate == doctest::Approx(1.0 / st.mean_tau).epsilon(1e-12));
    CHECK(std::abs(st.empirical_rate - rate) <= 4.0 * rate / std::sqrt(500.0));

    // every exit lands on an endpoint label
    for (double c : st.boundary_coords()) CHECK((c == 0.0 || c == 1.0));
}

TEST_CASE("harmonic em matches the stationary variance") {
    auto f = make_field("harmonic1d");
    double beta = 4.0, dt = 0.01;
    RngStream rng(31, 0);
    Pt x = pt(0.0);
    double sum = 0.0, sumsq = 0.0;
    int burn = 10000, n = 400000;
    for (int i = 0; i < burn; ++i)
        x = em_step(*f, x, dt, beta, pt(rng.normal()));
    for (int i = 0; i < n; ++i) {
        x = em_step(*f, x, dt, beta, pt(rng.normal()));
        sum += x[0];
        sumsq += x[0] * x[0];
    }
    double mean = sum / n;
    double var = sumsq / n - mean * mean;
    // EM at step dt has stationary variance (1/beta)/(1 - dt/2)
    double expect = (1.0 / beta) / (1.0 - dt / 2.0);
    // correlated-chain SE of the mean is sqrt(2 var / (n dt)) ~ 0.011
    CHECK(std::abs(mean) <= 0.045);
    CHECK(var == doctest::Approx(expect).epsilon(0.08));
}

TEST_CASE("a tiny step budget censors the run") {
    auto f = make_field("doublewell1d");
    Domain omega = Domain::interval(-0.7, 0.7);
    PdeSetup ref = doublewell_qsd(-0.7, 0.7, 0.2, 2e-3);
    McConfig cfg;
    cfg.beta = 10.0;
    cfg.dt = 5e-4;
    cfg.seed = 3;
    cfg.n = 8;
    cfg.max_steps = 10;
    ExitStatistics st = run_exits(*f, omega, ref.qsd, ref.grid, cfg);
    CHECK(st.censored_count == 8);
    CHECK(st.taus().empty());
    for (const auto& s : st.samples) {
        CHECK(s.censored);
        CHECK(s.steps == 10);
        CHECK(s.tau == doctest::Approx(10 * 5e-4));
    }
}

TEST_CASE("exit location tv against a reference law") {
    ExitStatistics st;
    st.dim = 1;
    st.config.n = 100;
    for (int i = 0; i < 100; ++i) {
        ExitSample s;
        s.tau = 1.0;
        s.boundary_coord = 0.0;
        st.samples.push_back(s);
    }
    BoundaryDensity all_left{{0.0, 1.0}, {1.0, 0.0}, true, 1.0};
    CHECK(exit_location_tv(st, all_left) == doctest::Approx(0.0));
    BoundaryDensity fair{{0.0, 1.0}, {0.5, 0.5}, true, 1.0};
    CHECK(exit_location_tv(st, fair) == doctest::Approx(0.5));
}

TEST_CASE("hyperdynamics comparison accepts the identity and rejects 2B") {
    auto f = make_field("doublewell1d");
    Domain omega = Domain::interval(-0.7, 0.7);
    PdeSetup ref = doublewell_qsd(-0.7, 0.7, 0.2, 2e-3);
    McConfig cfg;
    cfg.beta = 10.0;
    cfg.dt = 5e-4;
    cfg.seed = 77;
    cfg.n = 300;
    ExitStatistics a = run_exits(*f, omega, ref.qsd, ref.grid, cfg);
    ExitStatistics b = run_exits(*f, omega, ref.qsd, ref.grid, cfg, cfg.n);

    HyperdynReport same = hyperdyn_compare(a, b, 1.0);
    CHECK(same.ks_ok);
    CHECK(same.tv_ok);
    CHECK(same.boost == 1.0);
    CHECK(same.mean_tau_base == doctest::Approx(a.mean_tau));

    HyperdynReport wrong = hyperdyn_compare(a, b, 3.0);
    CHECK_FALSE(wrong.ks_ok);
    CHECK(wrong.ks.p_value < 0.01);
}
