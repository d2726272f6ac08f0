#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <string>

#include "betapot/domain.hpp"
#include "betapot/equilibrium.hpp"
#include "betapot/field.hpp"
#include "betapot/partition.hpp"

#include "oracles.hpp"

using namespace betapot;

namespace {

FieldSpec quad_field() { return make_real_poly_field(2.0, {0.0, 0.0, 0.5}); }

DomainGrid quad_grid(int res, double tau_scale = 1.0) {
    DomainSpec d;
    d.kind = DomainKind::intervals;
    d.intervals = {{-3.0, 3.0}};
    d.resolution = res;
    d.tau_scale = tau_scale;
    FieldSpec f = quad_field();
    return build_grid(d, &f);
}

DomainGrid unit_grid(int res) {
    DomainSpec d;
    d.kind = DomainKind::intervals;
    d.intervals = {{0.0, 1.0}};
    d.resolution = res;
    return build_grid(d);
}

}  // namespace

TEST_CASE("two-coordinate integrals on the unit interval, closed forms") {
    DomainGrid g = unit_grid(200);

    // squared pair interaction: integrand is polynomial, panel rule is exact
    FieldSpec f2 = make_real_poly_field(2.0, {0.0});
    PartitionRecord z2 = exact_partition_small_n(g, f2, 2, 32);
    CHECK(std::abs(z2.value_log - oracle::kLogZ2Beta2Unit) <= 1e-10);
    CHECK(z2.method == "quadrature");
    CHECK(z2.n == 2);

    // |x - y| has a kink; convergence is slower but the error is reported
    FieldSpec f1 = make_real_poly_field(1.0, {0.0});
    PartitionRecord z1 = exact_partition_small_n(g, f1, 2, 32);
    const double dev = std::abs(z1.value_log - oracle::kLogZ2Beta1Unit);
    CHECK(dev <= 1e-3);
    CHECK(dev <= 3.0 * z1.error_estimate + 1e-9);
}

TEST_CASE("coordinate counts above three are refused") {
    DomainGrid g = unit_grid(50);
    FieldSpec f = make_real_poly_field(2.0, {0.0});
    try {
        exact_partition_small_n(g, f, 4, 16);
        CHECK(false);
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("refus") != std::string::npos);
    }
}

TEST_CASE("chain ratio at the anchor size matches the tensor quadrature") {
    FieldSpec f = quad_field();
    DomainGrid g = quad_grid(300);
    PartitionRecord z2 = exact_partition_small_n(g, f, 2, 32, 2.0);
    PartitionRecord z1 = exact_partition_small_n(g, f, 1, 32, 2.0);
    McOptions opt;
    opt.sweeps = 20000;
    opt.burn_in = 4000;
    HnEstimate h2 = estimate_partition_ratio(g, f, 2, 2, opt, 32);
    CHECK(h2.m == 2);
    CHECK(h2.n_target == 2);
    CHECK(h2.samples > 0);
    const double exact = z2.value_log - z1.value_log;
    const double budget =
        3.0 * h2.se_log + 3.0 * (z1.error_estimate + z2.error_estimate) + 1e-8;
    CHECK(std::abs(h2.log_h - exact) <= budget);
}

TEST_CASE("telescoped three-coordinate value agrees with the exact one") {
    FieldSpec f = quad_field();
    DomainGrid g = quad_grid(300);
    McOptions opt;
    opt.sweeps = 6000;
    opt.burn_in = 1500;
    TelescopeResult tel = telescope_log_partition(g, f, 3, opt);
    PartitionRecord z3 = exact_partition_small_n(g, f, 3, 32);
    CHECK(tel.n == 3);
    CHECK(tel.levels.size() == 1);
    CHECK(tel.se > 0.0);
    CHECK(std::abs(tel.log_z - z3.value_log) <= 3.0 * tel.se + 3.0 * z3.error_estimate);
}

TEST_CASE("normalized ratios drift toward the equilibrium prediction") {
    FieldSpec f = quad_field();
    DomainGrid g = quad_grid(300);
    EquilibriumSolution sol = solve_equilibrium(g, f);
    const double target = -f.beta * sol.rho;

    McOptions opt;
    opt.sweeps = 8000;
    opt.burn_in = 2000;
    double prev = std::numeric_limits<double>::infinity();
    for (int n : {4, 8, 16}) {
        HnEstimate h = ratio_estimate_h_n(g, f, n, opt);
        const double dev = std::abs(h.log_h / n - target);
        CHECK(dev < prev);
        prev = dev;
    }
}

TEST_CASE("scaling the reference measure shifts values by the exact amount") {
    FieldSpec f = quad_field();
    DomainGrid g1 = quad_grid(300, 1.0);
    DomainGrid g4 = quad_grid(300, 4.0);

    PartitionRecord a = exact_partition_small_n(g1, f, 2, 32);
    PartitionRecord b = exact_partition_small_n(g4, f, 2, 32);
    CHECK(std::abs(b.value_log - a.value_log - 2.0 * std::log(4.0)) <= 1e-12);

    // window ratios are unchanged bit for bit (power-of-two scaling)
    Window w;
    w.kind = Window::Kind::intervals;
    w.intervals = {{0.8, 1.6}};
    PsiQuadrature p1 = psi_small_n_quadrature(g1, f, w, 2);
    PsiQuadrature p4 = psi_small_n_quadrature(g4, f, w, 2);
    CHECK(p1.psi_mean == p4.psi_mean);
    CHECK(p1.psi_any == p4.psi_any);
    CHECK(p1.moment2 == p4.moment2);
}

TEST_CASE("free-energy scaling report grades deviations against both bands") {
    FieldSpec f = quad_field();
    DomainGrid g = quad_grid(300);
    EquilibriumSolution sol = solve_equilibrium(g, f);
    const double per_n2 = -0.5 * f.beta * sol.energy;

    EnergyScalingReport close = energy_scaling_check(per_n2 * 1.05 * 100.0, 10, sol);
    CHECK(close.pass);
    CHECK(close.target == per_n2);

    EnergyScalingReport far = energy_scaling_check((per_n2 + 1.0) * 100.0, 10, sol);
    CHECK(!far.pass);
}
