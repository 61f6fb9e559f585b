#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "kramers/agmon.hpp"
#include "kramers/catalog.hpp"
#include "kramers/rng.hpp"

using namespace kramers;

namespace {

AgmonGraph graph_for(const ScalarField& f, const Domain& dom, double dx) {
    Grid grid = build_grid(dom, dx, BC::neumann);
    return agmon_graph(f, grid, true);
}

FieldPtr linear_field() {
    FieldParams p;
    p.vec["coeffs"] = {0.0, 1.0};
    return make_field("polynomial1d", p);
}

}  // namespace

TEST_CASE("unit slope gives euclidean distances") {
    AgmonGraph g = graph_for(*linear_field(), Domain::interval(0.0, 1.0), 0.1);
    std::vector<double> d = agmon_distance_field(g, {0});
    for (int i = 0; i < g.size(); ++i)
        CHECK(d[i] == doctest::Approx(g.xs[i][0]).epsilon(1e-12));
}

TEST_CASE("constant potential has zero distances") {
    FieldParams p;
    p.vec["coeffs"] = {0.0};
    auto f = make_field("polynomial1d", p);
    AgmonGraph g = graph_for(*f, Domain::interval(0.0, 1.0), 0.1);
    std::vector<double> d = agmon_distance_field(g, {3});
    for (int i = 0; i < g.size(); ++i) CHECK(d[i] == 0.0);
}

TEST_CASE("monotone segment distance is the exact value gap") {
    // |f'| = x is linear, so the trapezoid edge weights are exact
    auto f = make_field("harmonic1d");
    AgmonGraph g = graph_for(*f, Domain::interval(0.5, 1.0), 1e-3);
    std::vector<double> d = agmon_distance_field(g, {0});
    CHECK(d[g.size() - 1] ==
          doctest::Approx(0.5 * (1.0 - 0.25)).epsilon(1e-12));
}

TEST_CASE("doublewell cross-well distance and refinement") {
    auto f = make_field("doublewell1d");
    auto cross = [&](double dx) {
        AgmonGraph g = graph_for(*f, Domain::interval(-1.0, 1.0), dx);
        int s = nearest_node(g, pt(-0.5));
        int t = nearest_node(g, pt(0.5));
        return agmon_distance(g, {s}, {t});
    };
    double e1 = std::abs(cross(1e-3) - 0.125);
    double e2 = std::abs(cross(5e-4) - 0.125);
    CHECK(e1 <= 1e-3);
    CHECK(e2 <= 0.5 * e1 + 1e-14);
}

TEST_CASE("triangle inequality on a 2d graph") {
    auto f = make_field("multiwell2d");
    AgmonGraph g = graph_for(*f, Domain::disc({0.0, 0.0}, 0.8), 0.1);
    auto all = agmon_all_pairs(g);
    RngStream rng(11, 0);
    for (int k = 0; k < 200; ++k) {
        int i = (int)(rng.uniform() * g.size());
        int j = (int)(rng.uniform() * g.size());
        int m = (int)(rng.uniform() * g.size());
        CHECK(all[i][j] <= all[i][m] + all[m][j] + 1e-12);
        CHECK(all[i][j] == all[j][i]);
    }
}

TEST_CASE("dijkstra equals the all-pairs reference on snapped weights") {
    auto f = make_field("multiwell2d");
    AgmonGraph g = graph_for(*f, Domain::disc({0.0, 0.0}, 0.8), 0.1);
    snap_weights(g, 0x1.0p-20);
    auto all = agmon_all_pairs(g);
    RngStream rng(12, 0);
    for (int k = 0; k < 15; ++k) {
        int s = (int)(rng.uniform() * g.size());
        std::vector<double> d = agmon_distance_field(g, {s});
        for (int t = 0; t < g.size(); ++t) CHECK(d[t] == all[s][t]);
    }
}

TEST_CASE("distance dominates the potential gap across the catalog") {
    uint64_t idx = 0;
    for (const auto& name : catalog_names()) {
        CAPTURE(name);
        auto f = make_field(name);
        Domain inner = default_domain_pair(name).inner;
        double dx = f->dim() == 1 ? 1e-3 : 0.05;
        AgmonGraph g = graph_for(*f, inner, dx);

        // second-difference bound on the curvature of |grad f| along edges
        double m2 = 0.0;
        for (int u = 0; u < g.size(); ++u)
            for (int e = g.offsets[u]; e < g.offsets[u + 1]; ++e) {
                int v = g.targets[e];
                if (v < u) continue;
                Pt mid = 0.5 * (g.xs[u] + g.xs[v]);
                double len = norm2(g.xs[v] - g.xs[u]);
                double gm = norm2(f->grad(mid));
                m2 = std::max(
                    m2, std::abs(g.gnorm[u] - 2.0 * gm + g.gnorm[v]) * 4.0 /
                            (len * len));
            }
        double pathlen = f->dim() == 1 ? inner.diameter()
                                       : M_PI * inner.diameter();
        double tol = 10.0 * (dx * dx / 12.0) * m2 * pathlen + 1e-9;

        RngStream rng(13, idx++);
        for (int s = 0; s < 20; ++s) {
            int i = (int)(rng.uniform() * g.size());
            std::vector<double> d = agmon_distance_field(g, {i});
            for (int t = 0; t < 10; ++t) {
                int j = (int)(rng.uniform() * g.size());
                CHECK(d[j] >= std::abs(g.fvals[j] - g.fvals[i]) - tol);
            }
        }
    }
}

TEST_CASE("agmon condition separates the two example landscapes") {
    auto ok = check_agmon_condition(*make_field("fig-ok-1d"),
                                    default_domain_pair("fig-ok-1d"), 1e-3);
    CHECK(ok.ok);
    CHECK_FALSE(ok.heuristic);
    CHECK(ok.lhs == doctest::Approx(0.9327).epsilon(6e-3));
    CHECK(ok.rhs == doctest::Approx(0.306011).epsilon(1e-4));

    auto bad = check_agmon_condition(*make_field("fig-notok-1d"),
                                     default_domain_pair("fig-notok-1d"), 9e-4);
    CHECK_FALSE(bad.ok);
    CHECK(bad.lhs == doctest::Approx(0.1693).epsilon(0.03));
    CHECK(bad.rhs == doctest::Approx(0.485915).epsilon(1e-4));
    CHECK(bad.lhs < bad.rhs);
}

TEST_CASE("flat landscapes fall back to the heuristic targets") {
    auto res = check_agmon_condition(*make_field("flatbottom1d"),
                                     default_domain_pair("flatbottom1d"), 1e-3);
    CHECK(res.heuristic);
    CHECK_FALSE(res.minima.empty());
}
