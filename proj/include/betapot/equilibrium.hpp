#pragma once

#include <optional>
#include <string>
#include <vector>

#include "betapot/domain.hpp"
#include "betapot/field.hpp"
#include "betapot/measure.hpp"

namespace betapot {

struct SolverOptions {
    int max_iterations = 50000;
    double gap_rel_tol = 1e-8;        // stop when FW gap < tol * max(1, |E|)
    double support_weight_rel = 1e-3; // weight threshold, relative to max weight
    int resync_every = 2000;          // full recompute of the potential vector
    int column_cache_cap = 800;
    int trace_stride = 10;            // energy trace subsampling
};

// minimizer of  E(w) = -w'Lw + 2 w'R  over the probability simplex on grid
// nodes, L_ij = log|z_i - z_j| off-diagonal and log(delta_i/2) on it
struct EquilibriumSolution {
    DiscreteMeasure measure;             // thresholded support with weights
    std::vector<double> weights;         // dense weights, all grid nodes
    std::vector<double> potential_values;// u_i = sum_j w_j log|z_i - z_j|
    std::vector<cpx> nodes;              // grid node copy (keeps solution self-contained)
    std::vector<double> diag_desing;
    double beta = 2.0;
    double rho = 0.0;                    // modified Robin constant estimate
    double energy = 0.0;
    double kkt_residual = 0.0;
    double duality_gap = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> energy_trace;    // non-increasing by construction
    std::vector<int> support_nodes;      // weight above threshold
    std::vector<int> contact_nodes;      // equilibrium equality within tolerance
};

EquilibriumSolution solve_equilibrium(const DomainGrid& grid, const FieldSpec& field,
                                      const SolverOptions& opt = {});

// energy of an arbitrary discrete measure; desingularize=false skips the
// diagonal (point-configuration convention)
double weighted_energy(const DiscreteMeasure& mu, const DomainGrid& grid,
                       const FieldSpec& field, bool desingularize = true);

// log-potential of the solution measure at an arbitrary point; sets
// *desingularized when z falls inside some atom's resolution cell
double log_potential(const EquilibriumSolution& sol, cpx z, bool* desingularized = nullptr);

// beta * (R - U - rho), clamped at zero; *warned set when the raw value dips
// below -3*kkt_residual*beta (outside numerical slack)
double rate_function(const EquilibriumSolution& sol, const FieldSpec& field, cpx z,
                     bool* warned = nullptr);

// largest |z| over the support nodes
double support_radius(const EquilibriumSolution& sol);

// skin-tolerant comparison of weight support vs equality set
struct SupportComparison {
    std::size_t n_support = 0;
    std::size_t n_contact = 0;
    std::size_t n_strict_mismatch = 0;  // nodes in one set only, beyond the skin
    std::size_t n_union = 0;
    double skin_cells = 2.0;
    std::string verdict;  // "holds" | "marginal" | "fails"
};

SupportComparison compare_supports(const EquilibriumSolution& sol, const DomainGrid& grid,
                                   double skin_cells = 2.0);

// radial closed forms: for increasing r R'(r) the support edge T0 solves
// T0 R'(T0) = 1 and the constant is R(T0) - log T0
double radial_support_radius(const FieldSpec& field);
double radial_robin_constant(const FieldSpec& field, double t0);

struct SuperlogReport {
    double r_t = 0.0;
    double gauge_at[3] = {0.0, 0.0, 0.0};  // g(r_t), g(2 r_t), g(4 r_t)
    bool pass = false;
    std::string message;
};

// checks R(r) - (1+b) log r keeps climbing past the truncation radius
SuperlogReport validate_superlogarithmic(const FieldSpec& field, double r_t);

}  // namespace betapot
