#pragma once

#include <string>
#include <vector>

#include "betapot/domain.hpp"
#include "betapot/equilibrium.hpp"
#include "betapot/field.hpp"
#include "betapot/numeric.hpp"

namespace betapot {

// single-coordinate Metropolis chain for the joint density
//   exp( beta * sum_{i<j} log|z_i - z_j| - n_weight * beta * sum_i R(z_i) )
// with respect to tau^n on the grid-defined domain. n_weight defaults to the
// coordinate count; ratio chains pass the target size instead.
class MetropolisChain {
public:
    MetropolisChain(const DomainGrid& grid, const FieldSpec& field, int n_coords,
                    double n_weight, unsigned long long seed, double initial_step = 0.5);

    void sweep();                    // n proposals, one per coordinate
    void set_adapting(bool on) { adapting_ = on; }

    const std::vector<cpx>& points() const { return z_; }
    int n_coords() const { return n_; }
    double n_weight() const { return n_weight_; }
    double log_density() const { return log_density_; }
    double recompute_log_density() const;
    double acceptance_rate() const;  // lifetime fraction
    double proposal_scale() const { return step_; }
    long sweeps_done() const { return sweeps_; }
    double max_cache_drift() const { return max_drift_; }

    void resync_cache();             // rebuild gap matrix and cached density
    // log Metropolis ratio for moving coordinate k to znew; antisymmetric in
    // (state, proposal) bit for bit, which is what the balance test checks
    double move_log_ratio(int k, cpx znew) const;
    // unconditionally applies a move (state injection for balance tests)
    void force_move(int k, cpx znew);
    bool in_domain(cpx z) const { return grid_.contains(z); }
    cpx propose_from(cpx zk);        // draws from the proposal kernel (advances rng)

private:
    const DomainGrid& grid_;
    const FieldSpec& field_;
    int n_;
    double n_weight_;
    double beta_;
    Rng rng_;
    double step_;
    bool adapting_ = true;
    std::vector<cpx> z_;
    std::vector<double> gaps_;       // row-major n x n, log|z_i - z_j|, diag unused
    std::vector<double> rvals_;      // R(z_i)
    double log_density_ = 0.0;
    long sweeps_ = 0;
    long proposals_ = 0, accepts_ = 0;
    long window_proposals_ = 0, window_accepts_ = 0;
    double max_drift_ = 0.0;

    double gap(int i, int j) const { return gaps_[static_cast<std::size_t>(i) * n_ + j]; }
    void set_gap(int i, int j, double v);
    void apply_move(int k, cpx znew, double delta);
};

struct McOptions {
    std::vector<unsigned long long> seeds = {1, 2, 3, 4, 5, 6, 7, 8};
    long sweeps = 20000;
    long burn_in = -1;               // -1: max(5000, sweeps/5)
    int thin = 1;
    int batches_per_chain = 8;
    double initial_step = 0.5;
    bool symmetrized = true;         // average over coordinates vs first-coordinate flag
    double n_weight = -1.0;          // -1: use the coordinate count

    long effective_burn_in() const;
};

struct OutlierEstimate {
    int n = 0;
    double psi_hat = 0.0, se = 0.0, ci_low = 0.0, ci_high = 0.0;
    double psi_any = 0.0, se_any = 0.0, ci_any_low = 0.0, ci_any_high = 0.0;
    double moment2 = 0.0, moment2_se = 0.0;   // mean of |z|^2 over coordinates
    long samples = 0;
    bool rare_zero = false;
    std::string warning;
    std::string method = "mcmc";
};

// one pooled pass over all chains: per-coordinate window probability, the
// any-coordinate version, and the second moment, each with batch-means errors
OutlierEstimate sample_window_statistics(const DomainGrid& grid, const FieldSpec& field,
                                         const Window& window, int n, const McOptions& opt);

OutlierEstimate estimate_outlier_prob(const DomainGrid& grid, const FieldSpec& field,
                                      const Window& window, int n, const McOptions& opt);
OutlierEstimate estimate_any_coordinate_prob(const DomainGrid& grid, const FieldSpec& field,
                                             const Window& window, int n, const McOptions& opt);

struct LdpRecord {
    int n = 0;
    double psi_hat = 0.0, se = 0.0, ci_low = 0.0, ci_high = 0.0;
    std::string method = "mcmc";
    bool usable = false;
};

struct LdpReport {
    std::vector<LdpRecord> records;
    double fitted_rate = 0.0, fitted_se = 0.0, intercept = 0.0, r2 = 0.0;
    double predicted_rate = 0.0;
    double relative_gap = 0.0;
    bool degenerate = false;   // predicted rate ~ 0, fitted statistically 0
    bool pass = false;
};

// weighted fit of -log psi_n = a + rate * n; predicted rate from the minimum
// of the rate function over a probe mesh of the window
LdpReport ldp_rate_fit(const std::vector<LdpRecord>& records, const EquilibriumSolution& sol,
                       const FieldSpec& field, const DomainGrid& grid, const Window& window,
                       double relative_tol = 0.15);

struct FeketeResult {
    std::vector<std::size_t> node_idx;
    double log_value = 0.0;       // log of the maximized product
    double value_per_n2 = 0.0;    // log_value / n^2
    int passes = 0;
};

// multi-start coordinate ascent of the joint log density over grid nodes
FeketeResult fekete_ascent(const DomainGrid& grid, const FieldSpec& field, int n, int starts,
                           unsigned long long seed);

// largest gap, over probe nodes, between the leave-one-out empirical potential
// at a maximizing configuration and the solution's log-potential
double fekete_potential_gap(const FeketeResult& fek, const EquilibriumSolution& sol,
                            const DomainGrid& grid, int probes, unsigned long long seed);

// W1 distance between a point configuration and the solution measure, real line only
double wasserstein1_to_measure(const std::vector<cpx>& pts, const EquilibriumSolution& sol);

}  // namespace betapot
