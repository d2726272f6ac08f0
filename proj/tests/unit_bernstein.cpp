#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "betapot/domain.hpp"
#include "betapot/equilibrium.hpp"
#include "betapot/field.hpp"
#include "betapot/weighted_basis.hpp"

#include "oracles.hpp"

using namespace betapot;

namespace {

FieldSpec quad_field() { return make_real_poly_field(2.0, {0.0, 0.0, 0.5}); }

DomainGrid segment_grid(int res, double tau_scale = 1.0) {
    DomainSpec d;
    d.kind = DomainKind::intervals;
    d.intervals = {{-1.0, 1.0}};
    d.resolution = res;
    d.tau_scale = tau_scale;
    return build_grid(d);
}

}  // namespace

TEST_CASE("orthonormalization is numerically tight") {
    DomainGrid g = segment_grid(1500);
    WeightedBasis basis = build_weighted_basis(g, quad_field(), 20);
    CHECK(orthonormality_defect(basis) <= 1e-8);
}

TEST_CASE("degree-zero constant on the unit segment") {
    DomainGrid g = segment_grid(1500);
    FieldSpec flat = make_real_poly_field(2.0, {0.0});
    WeightedBasis b0 = build_weighted_basis(g, flat, 0);
    // constant function normalized against total mass 2
    CHECK(std::abs(bm_constant(b0) - oracle::kM0Lebesgue) <= 1e-12);
}

TEST_CASE("sup constants transform exactly under measure scaling") {
    DomainGrid g1 = segment_grid(1500, 1.0);
    DomainGrid g4 = segment_grid(1500, 4.0);
    WeightedBasis b1 = build_weighted_basis(g1, quad_field(), 20);
    WeightedBasis b4 = build_weighted_basis(g4, quad_field(), 20);
    // quadrupling the mass halves every normalized sup, bit for bit
    CHECK(bm_constant(b1) == 2.0 * bm_constant(b4));
}

TEST_CASE("sup constants grow with the degree") {
    DomainGrid g = segment_grid(1500);
    const double m5 = bm_constant(build_weighted_basis(g, quad_field(), 5));
    const double m6 = bm_constant(build_weighted_basis(g, quad_field(), 6));
    const double m7 = bm_constant(build_weighted_basis(g, quad_field(), 7));
    CHECK(m5 <= m6);
    CHECK(m6 <= m7);
}

TEST_CASE("rank-deficient node sets are reported with the failing degree") {
    DomainGrid g5 = segment_grid(5);
    try {
        build_weighted_basis(g5, quad_field(), 5);
        CHECK(false);
    } catch (const SingularGramError& e) {
        CHECK(e.degree == 5);
    }
    CHECK_NOTHROW(build_weighted_basis(g5, quad_field(), 4));

    DomainGrid g2 = segment_grid(2);
    try {
        build_weighted_basis(g2, quad_field(), 2);
        CHECK(false);
    } catch (const SingularGramError& e) {
        CHECK(e.degree == 2);
    }
}

TEST_CASE("weighted sups restrict to a dilation of the support") {
    FieldSpec f = quad_field();
    DomainSpec d;
    d.kind = DomainKind::intervals;
    d.intervals = {{-3.0, 3.0}};
    d.resolution = 600;
    DomainGrid g = build_grid(d, &f);
    EquilibriumSolution sol = solve_equilibrium(g, f);

    SupRestrictionReport sup = sup_restriction_check(sol, g, f, 12, 30, 5);
    CHECK(sup.trials == 30);
    CHECK(sup.max_ratio <= 1.0 + 1e-9);

    MonicBoundReport mon = monic_lower_bound_check(sol, g, f, 12, 30, 5);
    CHECK(mon.trials == 30);
    CHECK(mon.pass);
    CHECK(mon.min_log_margin > -mon.slack_log);
}

TEST_CASE("random weighted polynomials shed mass away from the support") {
    FieldSpec f = quad_field();
    DomainSpec d;
    d.kind = DomainKind::intervals;
    d.intervals = {{-3.0, 3.0}};
    d.resolution = 300;
    DomainGrid g = build_grid(d, &f);
    EquilibriumSolution sol = solve_equilibrium(g, f);

    TailMassReport tail = tail_mass_check(g, f, sol, {10, 20}, 20, 12.5, 1);
    CHECK(tail.pass);
    CHECK(tail.min_per_doubling >= 10.0);
    CHECK(tail.slope < 0.0);
    CHECK(tail.median_ratio.size() == 2);
    CHECK(tail.median_ratio[1] < tail.median_ratio[0]);
}

TEST_CASE("far-field integrability of the reference measure") {
    DomainSpec d;
    d.kind = DomainKind::intervals;
    d.intervals = {{1.0, std::numeric_limits<double>::infinity()}};
    d.resolution = 100;
    CHECK(tau_tail_integrable(d, 2.0).pass);
    CHECK(!tau_tail_integrable(d, 0.5).pass);

    DomainSpec disc;
    disc.kind = DomainKind::disc;
    disc.radius = 2.0;
    disc.resolution = 30;
    CHECK(tau_tail_integrable(disc, 2.0).pass);
}
