#pragma once

#include <string>
#include <vector>

#include "betapot/domain.hpp"
#include "betapot/ensemble.hpp"
#include "betapot/equilibrium.hpp"
#include "betapot/field.hpp"
#include "betapot/quadrature.hpp"

namespace betapot {

struct PartitionRecord {
    int n = 0;
    double beta = 2.0;
    std::string field_tag;
    double value_log = 0.0;
    std::string method;  // "quadrature" | "ratio-chain"
    double error_estimate = 0.0;
};

// tensor quadrature of the n-coordinate partition integral, n <= 3 only.
// n_weight overrides the per-coordinate weight exponent (level ensembles);
// error estimate by order doubling (line rules) or resolution halving (cells)
PartitionRecord exact_partition_small_n(const DomainGrid& grid, const FieldSpec& field, int n,
                                        int order = 32, double n_weight = -1.0);

struct PsiQuadrature {
    int n = 0;
    double psi_mean = 0.0;   // E[count in window] / n
    double psi_any = 0.0;    // P(count >= 1), via the all-outside complement
    double moment2 = 0.0;    // E[|z|^2] averaged over coordinates
    double log_z = 0.0;
};

// window statistics for the exact small-n ensemble on the grid's cell rule;
// all ratios are formed from mass-normalized logs, so scaling tau by a power
// of two leaves them bit-identical
PsiQuadrature psi_small_n_quadrature(const DomainGrid& grid, const FieldSpec& field,
                                     const Window& window, int n, double n_weight = -1.0);

struct HnEstimate {
    int m = 0;          // ensemble size of the numerator
    int n_target = 0;   // weight exponent shared by every level
    double log_h = 0.0;
    double se_log = 0.0;
    bool equilibrated = true;
    long samples = 0;
};

// chain estimate of the one-level partition ratio: average over the (m-1)
// ensemble of the single added-coordinate integral
HnEstimate estimate_partition_ratio(const DomainGrid& grid, const FieldSpec& field, int m,
                                    int n_target, const McOptions& opt, int order = 32);

// the headline ratio at size n (numerator field unscaled)
HnEstimate ratio_estimate_h_n(const DomainGrid& grid, const FieldSpec& field, int n,
                              const McOptions& opt, int order = 32);

struct TelescopeResult {
    PartitionRecord anchor;          // exact two-coordinate level
    std::vector<HnEstimate> levels;  // m = 3..n
    int n = 0;
    double log_z = 0.0;
    double se = 0.0;
};

TelescopeResult telescope_log_partition(const DomainGrid& grid, const FieldSpec& field,
                                        int n_target, const McOptions& opt, int order = 32);

struct EnergyScalingReport {
    double value = 0.0;       // log Z_n / n^2
    double target = 0.0;      // -(beta/2) * solver energy
    double deviation = 0.0;
    bool pass = false;
};

EnergyScalingReport energy_scaling_check(double log_z, int n, const EquilibriumSolution& sol,
                                         double rel_tol = 0.15, double abs_tol = 0.1);

}  // namespace betapot
