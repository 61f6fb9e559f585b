#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kramers/asymptotics.hpp"
#include "kramers/catalog.hpp"

using namespace kramers;

TEST_CASE("harmonic hessian rate matches the closed form") {
    auto f = make_field("harmonic1d");
    Domain dom = Domain::interval(-1.0, 1.0);
    for (double h : {0.25, 0.5}) {
        double expect = 4.0 * std::sqrt(h / M_PI) * std::exp(-1.0 / h);
        CHECK(lambda1_asymptotic(*f, dom, h, RateMethod::hessian, 1e-3) ==
              doctest::Approx(expect).epsilon(1e-10));
    }
}

TEST_CASE("harmonic volume integrals") {
    auto f = make_field("harmonic1d");
    Domain dom = Domain::interval(-1.0, 1.0);
    double h = 0.2;
    VolumeIntegral quad =
        laplace_volume_integral(*f, dom, h, IntegralMethod::quadrature, 1e-4);
    double exact = std::sqrt(M_PI * h) * std::erf(1.0 / std::sqrt(h));
    CHECK(quad.value == doctest::Approx(exact).epsilon(1e-6));
    CHECK(quad.within_bracket);
    CHECK(quad.lower <= quad.value);
    CHECK(quad.value <= quad.upper);

    VolumeIntegral hess =
        laplace_volume_integral(*f, dom, h, IntegralMethod::hessian, 1e-4);
    CHECK(hess.value == doctest::Approx(std::sqrt(M_PI * h)).epsilon(1e-12));
}

TEST_CASE("laplace bracket holds across the catalog") {
    for (const auto& n : catalog_names()) {
        CAPTURE(n);
        auto f = make_field(n);
        Domain omega_plus = default_domain_pair(n).outer;
        double dx = f->dim() == 1 ? 1e-3 : (n == "radial2d" ? 0.1 : 0.04);
        for (double h : {0.5, 0.2}) {
            VolumeIntegral v = laplace_volume_integral(
                *f, omega_plus, h, IntegralMethod::quadrature, dx);
            CAPTURE(h);
            CHECK(v.within_bracket);
            CHECK(v.lower <= v.value);
            CHECK(v.value <= v.upper);
        }
    }
}

TEST_CASE("doublewell flux rates match the reference values") {
    auto f = make_field("doublewell1d");
    Domain dom = Domain::interval(-1.0, 1.0);
    const double hs[3] = {0.2, 0.15, 0.1};
    const double flux_expect[3] = {7.357519e-3, 9.378938e-4, 1.744523e-5};
    const double hess_over_flux[3] = {0.049, 0.093, 0.129};
    for (int i = 0; i < 3; ++i) {
        CAPTURE(hs[i]);
        double flux =
            lambda1_asymptotic(*f, dom, hs[i], RateMethod::flux, 1e-4);
        CHECK(flux == doctest::Approx(flux_expect[i]).epsilon(1e-5));
        double hess =
            lambda1_asymptotic(*f, dom, hs[i], RateMethod::hessian, 1e-4);
        CHECK(hess / flux - 1.0 ==
              doctest::Approx(hess_over_flux[i]).epsilon(0.05));
    }
}

TEST_CASE("boost factor") {
    auto f = make_field("doublewell1d");
    DomainPair pair = make_domain_pair(Domain::interval(-0.8, 0.8),
                                       Domain::interval(-1.05, 1.05));

    auto zero = make_bump(1, pt(0.45), 0.15, 0.0);
    CHECK(boost_factor(*f, *zero, pair, 0.15, 1e-4) ==
          doctest::Approx(1.0).epsilon(1e-12));

    auto bump = make_bump(1, pt(0.45), 0.15, 0.1);
    CHECK(boost_factor(*f, *bump, pair, 0.15, 1e-4) ==
          doctest::Approx(1.1510).epsilon(5e-4));

    // raising the potential inside the well accelerates exits
    CHECK(boost_factor(*f, *bump, pair, 0.1, 1e-4) > 1.0);

    auto outside = make_bump(1, pt(0.9), 0.3, 0.1);
    CHECK_THROWS_AS(boost_factor(*f, *outside, pair, 0.15, 1e-4),
                    SupportViolationError);
}

TEST_CASE("slope fit recovers an exact affine law") {
    std::vector<double> hs = {0.1, 0.15, 0.2, 0.3};
    std::vector<double> lams;
    for (double h : hs) lams.push_back(std::exp((-1.2 + 0.8 * h) / h));
    SlopeFit fit = slope_fit(hs, lams);
    CHECK(fit.slope == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(fit.intercept == doctest::Approx(-1.2).epsilon(1e-9));
    CHECK(fit.r2 == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(slope_fit({0.1, 0.2}, {1.0, 2.0}), IllConditionedError);
    CHECK_THROWS_AS(slope_fit({0.1, 0.11, 0.12}, {1.0, 2.0, 3.0}),
                    IllConditionedError);
}

TEST_CASE("symmetric doublewell exit law is a fair coin in both forms") {
    auto f = make_field("doublewell1d");
    Domain dom = Domain::interval(-1.0, 1.0);
    for (DensityForm form : {DensityForm::flux, DensityForm::gaussian_mixture}) {
        BoundaryDensity d = exit_density_asymptotic(*f, dom, 0.15, form);
        REQUIRE(d.atoms);
        REQUIRE(d.values.size() == 2);
        CHECK(d.mass(0) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(d.mass(1) == doctest::Approx(0.5).epsilon(1e-12));
    }
}

TEST_CASE("radial2d asymptotic exit forms agree coarsely") {
    auto f = make_field("radial2d");
    Domain omega_plus = default_domain_pair("radial2d").outer;
    BoundaryDensity flux =
        exit_density_asymptotic(*f, omega_plus, 0.4, DensityForm::flux);
    BoundaryDensity gauss = exit_density_asymptotic(
        *f, omega_plus, 0.4, DensityForm::gaussian_mixture);
    REQUIRE_FALSE(flux.atoms);
    REQUIRE_FALSE(gauss.atoms);
    double mf = 0.0, mg = 0.0;
    for (size_t k = 0; k < flux.values.size(); ++k) mf += flux.mass((int)k);
    for (size_t k = 0; k < gauss.values.size(); ++k) mg += gauss.mass((int)k);
    CHECK(mf == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mg == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(boundary_tv(flux, gauss) <= 0.2);
}

TEST_CASE("degenerate and empty critical structures are refused") {
    auto flat = make_field("flatbottom1d");
    CHECK_THROWS_AS(laplace_volume_integral(*flat, Domain::interval(-1.0, 1.0),
                                            0.1, IntegralMethod::hessian, 1e-3),
                    DegenerateMinimumError);
    auto harm = make_field("harmonic1d");
    CHECK_THROWS_AS(laplace_volume_integral(*harm, Domain::interval(0.5, 1.0),
                                            0.1, IntegralMethod::hessian, 1e-3),
                    EmptyCriticalSetError);
    // inflow through the right endpoint of (-2,-1)
    CHECK_THROWS_AS(boundary_flux_integral(*harm, Domain::interval(-2.0, -1.0),
                                           0.2, IntegralMethod::quadrature, 0.0),
                    NegativeNormalDerivativeError);
}
