#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kramers/catalog.hpp"
#include "kramers/spectra.hpp"

using namespace kramers;

namespace {

SpectralResult solve(const ScalarField& f, const Domain& dom, double dx,
                     double h, BC bc, int k) {
    Grid grid = build_grid(dom, dx, bc);
    DiscreteOperator op = assemble_witten0(f, grid, h);
    return smallest_eigenpairs(op, k);
}

}  // namespace

TEST_CASE("doublewell dirichlet rates match the reference values") {
    auto f = make_field("doublewell1d");
    Domain dom = Domain::interval(-1.0, 1.0);
    CHECK(solve(*f, dom, 2e-4, 0.08, BC::dirichlet, 1).eigenvalues[0] ==
          doctest::Approx(8.839239804e-7).epsilon(1e-4));
    CHECK(solve(*f, dom, 2e-4, 0.2, BC::dirichlet, 1).eigenvalues[0] ==
          doctest::Approx(6.177197372e-3).epsilon(1e-4));
}

TEST_CASE("threewell small eigenvalues match between the nested domains") {
    auto f = make_field("threewell1d");
    SpectralResult lam =
        solve(*f, Domain::interval(-0.9, 0.9), 2e-4, 0.1, BC::dirichlet, 4);
    SpectralResult mu =
        solve(*f, Domain::interval(-0.85, 0.85), 2e-4, 0.1, BC::neumann, 4);

    CHECK(lam.eigenvalues[0] > 0.0);
    CHECK(lam.eigenvalues[0] == doctest::Approx(4.955233935e-10).epsilon(1e-3));
    CHECK(lam.eigenvalues[1] == doctest::Approx(9.578739316e-4).epsilon(1e-4));
    CHECK(lam.eigenvalues[2] == doctest::Approx(2.393286685e-2).epsilon(1e-4));
    CHECK(lam.eigenvalues[3] == doctest::Approx(7.870147590e-1).epsilon(1e-4));

    CHECK(std::abs(mu.eigenvalues[0]) <= 1e-10);
    CHECK(mu.eigenvalues[1] == doctest::Approx(9.578712403e-4).epsilon(1e-4));
    CHECK(mu.eigenvalues[2] == doctest::Approx(2.393286734e-2).epsilon(1e-4));

    // the exit-event identification: lambda_j tracks mu_j for j = 2..m0
    for (int j = 1; j < 3; ++j)
        CHECK(std::abs(lam.eigenvalues[j] / mu.eigenvalues[j] - 1.0) <= 1e-4);

    // solver contract: residuals sit at 1e-9 of the matrix scale h^2/dx^2
    double ascale = 0.1 * 0.1 / (2e-4 * 2e-4);
    for (double r : lam.residuals) CHECK(r <= 1e-8 * ascale);

    // uniform-weight orthonormality of the computed basis
    double dx = 2e-4;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j <= i; ++j) {
            double g = mu.vectors.col(i).dot(mu.vectors.col(j)) * dx;
            CHECK(std::abs(g - (i == j ? 1.0 : 0.0)) <= 1e-8);
        }
}

TEST_CASE("ground state has a single sign after the sign fix") {
    auto f = make_field("doublewell1d");
    SpectralResult sr =
        solve(*f, Domain::interval(-1.0, 1.0), 1e-3, 0.2, BC::dirichlet, 2);
    double mx = sr.vectors.col(0).maxCoeff();
    CHECK(mx > 0.0);
    CHECK(sr.vectors.col(0).minCoeff() >= -1e-10 * mx);
}

TEST_CASE("m0 count is stable under doubling and halving nu") {
    auto f = make_field("threewell1d");
    Grid grid = build_grid(Domain::interval(-0.85, 0.85), 2e-4, BC::neumann);
    DiscreteOperator op = assemble_witten0(*f, grid, 0.1);
    double nu = std::pow(0.1, 1.2);
    CHECK(count_small(op, nu) == 3);
    CHECK(count_small(op, 2.0 * nu) == 3);
    CHECK(count_small(op, 0.5 * nu) == 3);
}

TEST_CASE("count_small refuses a threshold above the whole spectrum") {
    auto f = make_field("harmonic1d");
    Grid grid = build_grid(Domain::interval(-1.0, 1.0), 0.25, BC::neumann);
    DiscreteOperator op = assemble_witten0(*f, grid, 0.5);
    CHECK_THROWS_AS(count_small(op, 1e9), InconclusiveError);
}

TEST_CASE("cluster gap bound at barrier 0.55") {
    FieldParams p;
    p.num["barrier"] = 0.55;
    auto f = make_field("doublewell1d", p);
    Grid grid = build_grid(Domain::interval(-0.8, 0.8), 2e-4, BC::neumann);
    const double expected[3] = {1.273873e-5, 7.309785e-4, 5.968810e-3};
    const double hs[3] = {0.1, 0.15, 0.2};
    for (int i = 0; i < 3; ++i) {
        DiscreteOperator op = assemble_witten0(*f, grid, hs[i]);
        double mu2 = smallest_eigenpairs(op, 2).eigenvalues[1];
        CHECK(mu2 == doctest::Approx(expected[i]).epsilon(5e-3));
        // h log mu2 >= -2 (cvmax - min f) - 0.1, with room to spare
        double margin = hs[i] * std::log(mu2) + 2.0 * 0.55 + 0.1;
        CHECK(margin >= 0.05);
    }
}

TEST_CASE("qsd tracks the gibbs law away from the saddle gap") {
    auto f = make_field("doublewell1d");
    double h = 0.15, dx = 2e-4;
    Grid grid = build_grid(Domain::interval(-1.1, 1.1), dx, BC::dirichlet);
    DiscreteOperator op = assemble_witten0(*f, grid, h);
    SpectralResult sr = smallest_eigenpairs(op, 1);
    std::vector<double> qsd = qsd_density(op, grid, sr);

    double cut = f->value(pt(0.8)) - 0.05;
    double zp = 0.0, zq = 0.0;
    std::vector<double> gibbs(grid.nodes.size());
    for (size_t i = 0; i < grid.nodes.size(); ++i) {
        gibbs[i] = std::exp(-2.0 * f->value(grid.nodes[i]) / h);
        if (f->value(grid.nodes[i]) <= cut) {
            zp += qsd[i] * dx;
            zq += gibbs[i] * dx;
        }
    }
    double l1 = 0.0;
    for (size_t i = 0; i < grid.nodes.size(); ++i)
        if (f->value(grid.nodes[i]) <= cut)
            l1 += std::abs(qsd[i] / zp - gibbs[i] / zq) * dx;
    CHECK(l1 <= 1e-3);
}

TEST_CASE("qsd rejects a sign-changing first column") {
    auto f = make_field("harmonic1d");
    Grid grid = build_grid(Domain::interval(-1.0, 1.0), 0.1, BC::dirichlet);
    DiscreteOperator op = assemble_witten0(*f, grid, 0.5);
    SpectralResult sr = smallest_eigenpairs(op, 1);
    for (int i = 0; i < sr.vectors.rows(); i += 2) sr.vectors(i, 0) *= -1.0;
    CHECK_THROWS_AS(qsd_density(op, grid, sr), SignError);
}

TEST_CASE("symmetric doublewell exits through both ends equally") {
    auto f = make_field("doublewell1d");
    Grid grid = build_grid(Domain::interval(-1.0, 1.0), 1e-3, BC::dirichlet);
    DiscreteOperator op = assemble_witten0(*f, grid, 0.2);
    SpectralResult sr = smallest_eigenpairs(op, 1);
    BoundaryDensity d = exit_density_pde(op, grid, sr);
    REQUIRE(d.atoms);
    REQUIRE(d.values.size() == 2);
    CHECK(d.locations[0] == 0.0);
    CHECK(d.locations[1] == 1.0);
    CHECK(d.mass(0) + d.mass(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(d.mass(0) == doctest::Approx(0.5).epsilon(4e-3));
}

TEST_CASE("boundary tv compares layouts cellwise") {
    BoundaryDensity p{{0.0, 1.0}, {0.5, 0.5}, true, 1.0};
    BoundaryDensity q{{0.0, 1.0}, {0.3, 0.7}, true, 1.0};
    CHECK(boundary_tv(p, q) == doctest::Approx(0.2).epsilon(1e-12));
    BoundaryDensity r{{0.0}, {1.0}, true, 1.0};
    CHECK_THROWS_AS(boundary_tv(p, r), UsageError);
}

TEST_CASE("flatbottom shell carries one dual mode per side") {
    auto f = make_field("flatbottom1d");
    double nu = std::pow(0.1, 1.2);
    DiscreteOperator left = assemble_witten1_1d(f, Domain::interval(-1.0, -0.6),
                                                5e-4, 0.1, BC::dirichlet);
    DiscreteOperator right = assemble_witten1_1d(f, Domain::interval(0.6, 1.0),
                                                 5e-4, 0.1, BC::dirichlet);
    CHECK(count_small(left, nu) == 1);
    CHECK(count_small(right, nu) == 1);
}
