#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "betapot/domain.hpp"
#include "betapot/equilibrium.hpp"
#include "betapot/field.hpp"
#include "betapot/measure.hpp"

#include "oracles.hpp"

using namespace betapot;

namespace {

FieldSpec disc_field() { return make_radial_poly_field(2.0, {0.0, 0.0, 1.0}); }
FieldSpec quad_field() { return make_real_poly_field(2.0, {0.0, 0.0, 0.5}); }

DomainGrid disc_grid(int res) {
    DomainSpec d;
    d.kind = DomainKind::disc;
    d.radius = 2.0;
    d.resolution = res;
    FieldSpec f = disc_field();
    return build_grid(d, &f);
}

DomainGrid quad_grid(int res) {
    DomainSpec d;
    d.kind = DomainKind::intervals;
    d.intervals = {{-3.0, 3.0}};
    d.resolution = res;
    FieldSpec f = quad_field();
    return build_grid(d, &f);
}

}  // namespace

TEST_CASE("radial closed forms match the planar quadratic constants") {
    FieldSpec f = disc_field();
    const double t0 = radial_support_radius(f);
    CHECK(std::abs(t0 - oracle::kDiscT0) <= 1e-12);
    CHECK(std::abs(radial_robin_constant(f, t0) - oracle::kDiscRho) <= 1e-12);
}

TEST_CASE("planar quadratic equilibrium reproduces the closed-form measure") {
    FieldSpec f = disc_field();
    DomainGrid g = disc_grid(60);
    EquilibriumSolution sol = solve_equilibrium(g, f);

    CHECK(sol.converged);
    CHECK(sol.kkt_residual <= 1e-3);
    CHECK(std::abs(sol.rho - oracle::kDiscRho) <= 0.02);
    // support edge lands within two grid cells of the exact radius
    CHECK(std::abs(support_radius(sol) - oracle::kDiscT0) <= 2.0 * (2.0 * 2.0 / 60.0));

    // descent trace is non-increasing up to round-off
    for (std::size_t i = 1; i < sol.energy_trace.size(); ++i)
        CHECK(sol.energy_trace[i] <= sol.energy_trace[i - 1] + 1e-9);

    SupportComparison cmp = compare_supports(sol, g);
    CHECK(cmp.verdict == "holds");
    CHECK(cmp.n_strict_mismatch == 0);

    // recomputing the energy of the solution measure agrees with the solver
    const double e2 = weighted_energy(sol.measure, g, f);
    CHECK(std::abs(e2 - sol.energy) <= 1e-6 * std::max(1.0, std::abs(sol.energy)));
}

TEST_CASE("decay exponent of the planar quadratic field") {
    FieldSpec f = disc_field();
    DomainGrid g = disc_grid(60);
    EquilibriumSolution sol = solve_equilibrium(g, f);

    // vanishes on the support, matches the closed form outside, increases
    CHECK(rate_function(sol, f, cpx(0.3, 0.0)) <= 0.02);
    CHECK(std::abs(rate_function(sol, f, cpx(1.0, 0.0)) - oracle::kDiscRateAt1) <= 0.02);
    const double j95 = rate_function(sol, f, cpx(0.95, 0.0));
    const double j100 = rate_function(sol, f, cpx(1.0, 0.0));
    const double j120 = rate_function(sol, f, cpx(0.0, 1.2));  // rotation invariant
    CHECK(j95 < j100);
    CHECK(j100 < j120);
    CHECK(std::abs(j95 - oracle::disc_rate(0.95)) <= 0.02);

    // potential evaluation flags desingularized queries at support nodes
    bool desing = false;
    log_potential(sol, sol.nodes[static_cast<std::size_t>(sol.support_nodes.front())], &desing);
    CHECK(desing);
}

TEST_CASE("real-line quadratic equilibrium matches the semicircle edge") {
    FieldSpec f = quad_field();
    DomainGrid g = quad_grid(600);
    EquilibriumSolution sol = solve_equilibrium(g, f);

    CHECK(sol.converged);
    CHECK(sol.kkt_residual <= 1e-3);
    CHECK(std::abs(sol.rho - oracle::kQuadRho) <= 0.02);

    double edge = 0.0;
    for (int i : sol.support_nodes)
        edge = std::max(edge, std::abs(sol.nodes[static_cast<std::size_t>(i)].real()));
    CHECK(std::abs(edge - oracle::kQuadSupportRadius) <= 0.05);

    SupportComparison cmp = compare_supports(sol, g);
    CHECK(cmp.verdict == "holds");
}

TEST_CASE("unbounded domains truncate using the growth of the field") {
    FieldSpec f = quad_field();
    DomainSpec d;
    d.kind = DomainKind::intervals;
    d.intervals = {{-std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity()}};
    d.resolution = 200;
    DomainGrid g = build_grid(d, &f);
    CHECK(g.unbounded);
    CHECK(g.truncation_radius > 0.0);
    CHECK(g.truncation_radius == truncation_radius_for(f));
    CHECK(!g.contains(cpx(g.truncation_radius + 1.0, 0.0)));
    CHECK(g.contains(cpx(0.0, 0.0)));

    SuperlogReport rep = validate_superlogarithmic(f, g.truncation_radius);
    CHECK(rep.pass);

    // missing field: the cut cannot be derived
    CHECK_THROWS_AS(build_grid(d, nullptr), std::invalid_argument);
}

TEST_CASE("fields with logarithmic growth are refused at truncation") {
    std::vector<double> absc, vals;
    for (int i = 0; i <= 200; ++i) {
        const double r = 0.5 * i;
        absc.push_back(r);
        vals.push_back(std::log(1.0 + r));
    }
    FieldSpec slow = make_tabulated1d_field(2.0, absc, vals, true);
    CHECK_THROWS_AS(truncation_radius_for(slow), std::runtime_error);
}

TEST_CASE("transport distance between atomic measures, hand values") {
    CHECK(std::abs(wasserstein1_real({{0.0, 1.0}}, {{1.0, 1.0}}) - 1.0) <= 1e-12);
    CHECK(std::abs(wasserstein1_real({{0.0, 0.5}, {1.0, 0.5}}, {{0.5, 1.0}}) - 0.5) <= 1e-12);
    CHECK(wasserstein1_real({{0.25, 1.0}}, {{0.25, 1.0}}) <= 1e-15);
}

TEST_CASE("window coverage of interval cells is exact") {
    Window w;
    w.kind = Window::Kind::intervals;
    w.intervals = {{0.25, 0.55}};
    // cell [0.2, 0.4]: covered on [0.25, 0.4]
    CHECK(w.coverage(cpx(0.3, 0.0), 0.2, 0.0, true) == doctest::Approx(0.75).epsilon(1e-12));
    // cell [0.4, 0.6]: covered on [0.4, 0.55]
    CHECK(w.coverage(cpx(0.5, 0.0), 0.2, 0.0, true) == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(w.coverage(cpx(0.9, 0.0), 0.2, 0.0, true) == 0.0);
    CHECK(w.coverage(cpx(0.4, 0.0), 0.1, 0.0, true) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("probe meshes stay inside their window") {
    Window wi;
    wi.kind = Window::Kind::intervals;
    wi.intervals = {{0.9, 1.3}, {2.0, 2.5}};
    for (cpx z : wi.probe_points(9)) CHECK(wi.contains(z));

    Window wd;
    wd.kind = Window::Kind::disc;
    wd.center = cpx(0.5, -0.25);
    wd.radius = 0.4;
    for (cpx z : wd.probe_points(9)) CHECK(wd.contains(z));

    Window wa;
    wa.kind = Window::Kind::annulus;
    wa.r_inner = 0.6;
    wa.r_outer = 0.84;
    auto pts = wa.probe_points(9);
    CHECK(!pts.empty());
    for (cpx z : pts) CHECK(wa.contains(z));
}

TEST_CASE("node-set dilation reaches exactly the requested number of cells") {
    DomainSpec d;
    d.kind = DomainKind::intervals;
    d.intervals = {{0.0, 1.0}};
    d.resolution = 10;
    DomainGrid g = build_grid(d);
    std::vector<int> out = dilate_node_set(g, {5}, 1.5);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == 4);
    CHECK(out[1] == 5);
    CHECK(out[2] == 6);
}

TEST_CASE("malformed domains and windows are rejected") {
    DomainSpec d;
    d.kind = DomainKind::disc;
    d.radius = 2.0;
    d.resolution = 1;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d.resolution = 30;
    d.tau_scale = -1.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d.tau_scale = 1.0;
    CHECK_NOTHROW(d.validate());

    DomainSpec a;
    a.kind = DomainKind::annulus;
    a.r_inner = 1.0;
    a.r_outer = 0.5;
    a.resolution = 30;
    CHECK_THROWS_AS(a.validate(), std::invalid_argument);

    DomainSpec iv;
    iv.kind = DomainKind::intervals;
    iv.intervals = {{1.0, 1.0}};
    iv.resolution = 10;
    CHECK_THROWS_AS(iv.validate(), std::invalid_argument);

    Window w;
    w.kind = Window::Kind::annulus;
    w.r_inner = 0.9;
    w.r_outer = 0.9;
    CHECK_THROWS_AS(w.validate(), std::invalid_argument);
    Window we;
    we.kind = Window::Kind::intervals;
    CHECK_THROWS_AS(we.validate(), std::invalid_argument);
}

TEST_CASE("discrete measures validate weights and indices") {
    DiscreteMeasure m;
    m.idx = {0, 1, 2};
    m.w = {0.25, 0.5, 0.25};
    CHECK_NOTHROW(m.validate());
    CHECK(m.total() == doctest::Approx(1.0).epsilon(1e-15));

    DiscreteMeasure bad;
    bad.idx = {0, 0};
    bad.w = {0.5, 0.5};
    CHECK_THROWS_AS(bad.validate(), std::exception);

    DiscreteMeasure neg;
    neg.idx = {0, 1};
    neg.w = {0.5, -0.1};
    CHECK_THROWS_AS(neg.validate(), std::exception);

    DiscreteMeasure scaled;
    scaled.idx = {3, 4};
    scaled.w = {2.0, 6.0};
    scaled.renormalize();
    CHECK(scaled.total() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(scaled.w[1] == doctest::Approx(0.75).epsilon(1e-15));
}
