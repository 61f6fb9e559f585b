#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kramers/catalog.hpp"
#include "kramers/domain.hpp"
#include "kramers/rng.hpp"

using namespace kramers;

namespace {

// Uniform draw from the outer default domain of a catalog entry.
Pt random_point(const Domain& dom, RngStream& rng) {
    if (dom.dim == 1) return pt(dom.a + (dom.b - dom.a) * rng.uniform());
    for (;;) {
        Pt x = pt(dom.center[0] + dom.radius * (2.0 * rng.uniform() - 1.0),
                  dom.center[1] + dom.radius * (2.0 * rng.uniform() - 1.0));
        if (dom.contains(x)) return x;
    }
}

double fd_grad(const ScalarField& f, Pt x, int axis, double eps) {
    Pt lo = x, hi = x;
    lo[axis] -= eps;
    hi[axis] += eps;
    return (f.value(hi) - f.value(lo)) / (2.0 * eps);
}

double fd_hess_diag(const ScalarField& f, Pt x, int axis, double eps) {
    Pt lo = x, hi = x;
    lo[axis] -= eps;
    hi[axis] += eps;
    return (f.value(hi) - 2.0 * f.value(x) + f.value(lo)) / (eps * eps);
}

double fd_hess_cross(const ScalarField& f, Pt x, double eps) {
    Pt pp = x, pm = x, mp = x, mm = x;
    pp[0] += eps, pp[1] += eps;
    pm[0] += eps, pm[1] -= eps;
    mp[0] -= eps, mp[1] += eps;
    mm[0] -= eps, mm[1] -= eps;
    return (f.value(pp) - f.value(pm) - f.value(mp) + f.value(mm)) /
           (4.0 * eps * eps);
}

}  // namespace

TEST_CASE("catalog names resolve and self-identify") {
    auto names = catalog_names();
    CHECK(names.size() == 11);
    for (const auto& n : names) {
        auto f = make_field(n);
        REQUIRE(f != nullptr);
        CHECK(f->name() == n);
        CHECK((f->dim() == 1 || f->dim() == 2));
    }
    CHECK_THROWS_AS(make_field("nosuchpotential"), UsageError);
}

TEST_CASE("analytic derivatives match finite differences") {
    uint64_t field_idx = 0;
    for (const auto& n : catalog_names()) {
        CAPTURE(n);
        auto f = make_field(n);
        Domain dom = default_domain_pair(n).outer;
        RngStream rng(42, field_idx++);
        bool smooth = f->smoothness() == "C_inf";
        for (int k = 0; k < 100; ++k) {
            Pt x = random_point(dom, rng);
            CAPTURE(x[0]);
            CAPTURE(x[1]);
            Pt g = f->grad(x);
            double gscale = 1.0 + std::abs(g[0]) + std::abs(g[1]);
            double gtol = (smooth ? 5e-6 : 2e-4) * gscale;
            for (int ax = 0; ax < f->dim(); ++ax)
                CHECK(std::abs(g[ax] - fd_grad(*f, x, ax, 1e-4)) <= gtol);
            Sym2 H = f->hess(x);
            double hscale =
                1.0 + std::abs(H.xx) + std::abs(H.yy) + std::abs(H.xy);
            double htol = (smooth ? 2e-4 : 5e-2) * hscale;
            CHECK(std::abs(H.xx - fd_hess_diag(*f, x, 0, 1e-3)) <= htol);
            if (f->dim() == 2) {
                CHECK(std::abs(H.yy - fd_hess_diag(*f, x, 1, 1e-3)) <= htol);
                CHECK(std::abs(H.xy - fd_hess_cross(*f, x, 1e-3)) <= htol);
            }
        }
    }
}

TEST_CASE("flatbottom1d is exactly flat on its plateau") {
    auto f = make_field("flatbottom1d");
    for (double x : {-0.12, 0.0, 0.1, 0.149}) {
        CHECK(std::abs(f->value(pt(x))) <= 1e-15);
        CHECK(std::abs(f->grad(pt(x))[0]) <= 1e-15);
        CHECK(std::abs(f->hess(pt(x)).xx) <= 1e-15);
    }
    CHECK(f->value(pt(0.5)) > 0.1);
}

TEST_CASE("radial2d center value and stationarity") {
    auto f = make_field("radial2d");
    Pt o = pt(0.0, 0.0);
    CHECK(f->value(o) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(norm2(f->grad(o)) <= 1e-12);
}

TEST_CASE("doublewell1d parameters") {
    FieldParams p;
    p.num["barrier"] = 0.55;
    auto f = make_field("doublewell1d", p);
    // the saddle height at x=0 equals the barrier parameter
    CHECK(f->value(pt(0.0)) == doctest::Approx(0.55).epsilon(1e-14));
    CHECK(std::abs(f->value(pt(0.5))) <= 1e-15);

    FieldParams q;
    q.num["depth"] = 0.3;
    auto g = make_field("doublewell1d", q);
    CHECK(g->value(pt(0.5)) == doctest::Approx(-0.15).epsilon(1e-14));
}

TEST_CASE("bump support and peak") {
    auto b = make_bump(1, pt(0.45), 0.15, 0.1);
    CHECK(b->value(pt(0.45)) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(b->value(pt(0.61)) == 0.0);
    CHECK(b->value(pt(0.29)) == 0.0);
    CHECK(b->grad(pt(0.7))[0] == 0.0);
    CHECK(b->value(pt(0.5)) > 0.0);

    auto b2 = make_bump(2, pt(0.3, -0.2), 0.4, 1.5);
    CHECK(b2->value(pt(0.3, -0.2)) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(b2->value(pt(0.3, 0.3)) == 0.0);
}

TEST_CASE("sum and negation combinators") {
    auto f = make_field("doublewell1d");
    auto b = make_bump(1, pt(0.45), 0.15, 0.1);
    SumField s({f, b});
    Pt x = pt(0.4);
    CHECK(s.value(x) ==
          doctest::Approx(f->value(x) + b->value(x)).epsilon(1e-14));
    CHECK(s.grad(x)[0] ==
          doctest::Approx(f->grad(x)[0] + b->grad(x)[0]).epsilon(1e-14));
    CHECK(s.hess(x).xx ==
          doctest::Approx(f->hess(x).xx + b->hess(x).xx).epsilon(1e-14));

    NegatedField neg(f);
    CHECK(neg.value(x) == -f->value(x));
    CHECK(neg.grad(x)[0] == -f->grad(x)[0]);
    CHECK(neg.hess(x).xx == -f->hess(x).xx);
}
