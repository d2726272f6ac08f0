#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "betapot/domain.hpp"
#include "betapot/equilibrium.hpp"
#include "betapot/field.hpp"

namespace betapot {

struct SingularGramError : std::runtime_error {
    int degree;
    explicit SingularGramError(int d)
        : std::runtime_error("weighted basis: Gram matrix numerically singular at degree " +
                             std::to_string(d)),
          degree(d) {}
};

// orthonormal family phi_0..phi_n under the discrete inner product
// <u,v> = sum_i mass_i u_i conj(v_i) applied to weighted monomials
// e^{-n R(z)} z^k; values are the weighted orthonormal vectors on the nodes
struct WeightedBasis {
    int degree = 0;
    bool planar = false;       // complex monomials (true) vs real-line powers
    double n_weight = 0.0;
    double beta = 2.0;
    std::vector<std::size_t> node_idx;         // admissible nodes used
    std::vector<double> mass;                  // their masses
    std::vector<std::vector<cpx>> values;      // values[k][i]
    std::vector<std::vector<cpx>> coeffs;      // coeffs[k][l] over raw weighted monomials
    double gram_condition = 1.0;
};

WeightedBasis build_weighted_basis(const DomainGrid& grid, const FieldSpec& field, int n);

// best constant in  sup_i |e^{-nR}p| <= M_n ||e^{-nR}p||_{L2(tau)}  over degree-n
// polynomials: the max over nodes of the kernel diagonal square root
double bm_constant(const WeightedBasis& basis);
std::size_t bm_argmax_index(const WeightedBasis& basis);  // position within basis.node_idx

// worst deviation of <phi_j, phi_k> from identity
double orthonormality_defect(const WeightedBasis& basis);

struct SupRestrictionReport {
    double max_ratio = 0.0;  // sup over Y / sup over dilated support, worst trial
    int trials = 0;
};

SupRestrictionReport sup_restriction_check(const EquilibriumSolution& sol, const DomainGrid& grid,
                                           const FieldSpec& field, int n, int trials,
                                           unsigned long long seed, double dilation_cells = 2.0);

struct MonicBoundReport {
    double min_log_margin = 0.0;  // min over trials of log sup + n rho
    double slack_log = 0.0;       // allowed dip from discretization
    int trials = 0;
    bool pass = false;
};

MonicBoundReport monic_lower_bound_check(const EquilibriumSolution& sol, const DomainGrid& grid,
                                         const FieldSpec& field, int n, int trials,
                                         unsigned long long seed);

struct TailMassReport {
    std::vector<int> n_values;
    std::vector<double> median_ratio;  // mass outside the neighborhood over mass inside
    double slope = 0.0;
    double r2 = 0.0;
    double min_per_doubling = 0.0;  // smallest shrink factor across n doublings
    bool pass = false;
};

// random degree-n polynomials, weighted beta-power mass outside a dilation of
// the contact set relative to inside; passes when the log-ratio trend is a
// clean decay (slope < 0, R^2 >= 0.9)
TailMassReport tail_mass_check(const DomainGrid& grid, const FieldSpec& field,
                               const EquilibriumSolution& sol, const std::vector<int>& n_values,
                               int trials, double dilation_cells, unsigned long long seed);

struct IntegrabilityReport {
    bool pass = false;
    double exponent = 0.0;
    std::string message;
};

// far-field integrability of tau against |z|^-a; catalogue measures are
// Lebesgue-type, so unbounded interval unions pass exactly when a > 1
IntegrabilityReport tau_tail_integrable(const DomainSpec& spec, double a = 2.0);

}  // namespace betapot
