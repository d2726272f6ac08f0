#include "betapot/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace betapot {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

MetropolisChain::MetropolisChain(const DomainGrid& grid, const FieldSpec& field, int n_coords,
                                 double n_weight, unsigned long long seed, double initial_step)
    : grid_(grid),
      field_(field),
      n_(n_coords),
      n_weight_(n_weight < 0.0 ? n_coords : n_weight),
      beta_(field.beta),
      rng_(seed),
      step_(initial_step) {
    if (n_ < 1) throw std::invalid_argument("MetropolisChain: n < 1");
    // start from distinct random positive-mass nodes
    std::vector<std::size_t> adm;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i)
        if (grid.tau_mass[i] > 0.0) adm.push_back(i);
    if (adm.size() < static_cast<std::size_t>(n_))
        throw std::invalid_argument("MetropolisChain: fewer admissible nodes than coordinates");
    z_.resize(n_);
    for (int k = 0; k < n_;) {
        cpx cand = grid.nodes[adm[rng_.index(adm.size())]];
        bool dup = false;
        for (int j = 0; j < k; ++j) dup |= z_[j] == cand;
        if (!dup) z_[k++] = cand;
    }
    gaps_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    rvals_.resize(n_);
    resync_cache();
    max_drift_ = 0.0;
}

void MetropolisChain::set_gap(int i, int j, double v) {
    gaps_[static_cast<std::size_t>(i) * n_ + j] = v;
    gaps_[static_cast<std::size_t>(j) * n_ + i] = v;
}

void MetropolisChain::resync_cache() {
    for (int i = 0; i < n_; ++i) rvals_[i] = field_.R(z_[i]);
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) set_gap(i, j, log_gap(z_[i], z_[j]));
    log_density_ = recompute_log_density();
}

double MetropolisChain::recompute_log_density() const {
    double gaps = 0.0, field_sum = 0.0;
    for (int i = 0; i < n_; ++i) {
        field_sum += field_.R(z_[i]);
        for (int j = i + 1; j < n_; ++j) gaps += log_gap(z_[i], z_[j]);
    }
    return beta_ * gaps - n_weight_ * beta_ * field_sum;
}

double MetropolisChain::move_log_ratio(int k, cpx znew) const {
    // accumulated as a sum of differences so the reverse move negates bitwise
    double s = 0.0;
    for (int j = 0; j < n_; ++j) {
        if (j == k) continue;
        s += log_gap(znew, z_[j]) - gap(k, j);
    }
    const double t1 = beta_ * s;
    const double t2 = n_weight_ * beta_ * (field_.R(znew) - rvals_[k]);
    return t1 - t2;
}

cpx MetropolisChain::propose_from(cpx zk) {
    if (grid_.on_circle()) {
        const double r = grid_.spec.radius;
        const double th = std::arg(zk) + step_ * rng_.normal();
        return cpx(r * std::cos(th), r * std::sin(th));
    }
    if (grid_.real_line()) return zk + cpx(step_ * rng_.normal(), 0.0);
    return zk + cpx(step_ * rng_.normal(), step_ * rng_.normal());
}

void MetropolisChain::force_move(int k, cpx znew) {
    apply_move(k, znew, move_log_ratio(k, znew));
}

void MetropolisChain::apply_move(int k, cpx znew, double delta) {
    z_[k] = znew;
    rvals_[k] = field_.R(znew);
    for (int j = 0; j < n_; ++j) {
        if (j == k) continue;
        set_gap(k, j, log_gap(znew, z_[j]));
    }
    log_density_ += delta;
}

void MetropolisChain::sweep() {
    for (int k = 0; k < n_; ++k) {
        const cpx cand = propose_from(z_[k]);
        ++proposals_;
        ++window_proposals_;
        if (!grid_.contains(cand)) continue;
        const double delta = move_log_ratio(k, cand);
        bool accept = delta >= 0.0;
        if (!accept) accept = std::log(rng_.uniform_pos()) < delta;
        if (accept) {
            apply_move(k, cand, delta);
            ++accepts_;
            ++window_accepts_;
        }
    }
    ++sweeps_;

    if (adapting_ && sweeps_ % 100 == 0 && window_proposals_ > 0) {
        const double rate = static_cast<double>(window_accepts_) / window_proposals_;
        step_ *= (rate > 0.3) ? 1.1 : (1.0 / 1.1);
        window_accepts_ = window_proposals_ = 0;
    }
    if (sweeps_ % 1000 == 0) {
        const double exact = recompute_log_density();
        max_drift_ = std::max(max_drift_, std::abs(exact - log_density_));
        // rebuild rather than letting rounding accumulate
        resync_cache();
    }
}

double MetropolisChain::acceptance_rate() const {
    return proposals_ > 0 ? static_cast<double>(accepts_) / proposals_ : 0.0;
}

long McOptions::effective_burn_in() const {
    if (burn_in >= 0) return burn_in;
    return std::max<long>(5000, sweeps / 5);
}

OutlierEstimate sample_window_statistics(const DomainGrid& grid, const FieldSpec& field,
                                         const Window& window, int n, const McOptions& opt) {
    window.validate();
    if (opt.seeds.empty()) throw std::invalid_argument("sample_window_statistics: no seeds");
    const long burn = opt.effective_burn_in();
    if (opt.sweeps <= burn)
        throw std::invalid_argument("sample_window_statistics: sweeps must exceed burn-in");

    const long kept_per_chain = (opt.sweeps - burn) / std::max(1, opt.thin);
    const int B = std::max(3, opt.batches_per_chain);
    std::vector<double> batch_psi, batch_any, batch_m2;
    long total_kept = 0;
    double hits = 0.0;

    for (unsigned long long seed : opt.seeds) {
        MetropolisChain chain(grid, field, n, opt.n_weight, seed, opt.initial_step);
        chain.set_adapting(true);
        for (long s = 0; s < burn; ++s) chain.sweep();
        chain.set_adapting(false);

        const long per_batch = std::max<long>(1, kept_per_chain / B);
        double acc_psi = 0.0, acc_any = 0.0, acc_m2 = 0.0;
        long in_batch = 0;
        long kept = 0;
        for (long s = burn; s < opt.sweeps; ++s) {
            chain.sweep();
            if ((s - burn) % std::max(1, opt.thin) != 0) continue;
            int cnt = 0;
            double m2 = 0.0;
            for (const cpx& p : chain.points()) {
                if (window.contains(p)) ++cnt;
                m2 += std::norm(p);
            }
            const double frac = opt.symmetrized ? static_cast<double>(cnt) / n
                                                : (window.contains(chain.points()[0]) ? 1.0 : 0.0);
            acc_psi += frac;
            acc_any += cnt >= 1 ? 1.0 : 0.0;
            acc_m2 += m2 / n;
            hits += cnt;
            ++in_batch;
            ++kept;
            ++total_kept;
            if (in_batch == per_batch) {
                batch_psi.push_back(acc_psi / in_batch);
                batch_any.push_back(acc_any / in_batch);
                batch_m2.push_back(acc_m2 / in_batch);
                acc_psi = acc_any = acc_m2 = 0.0;
                in_batch = 0;
            }
        }
        (void)kept;
    }

    OutlierEstimate est;
    est.n = n;
    est.samples = total_kept;
    MeanSe ms = batch_mean_se(batch_psi);
    MeanSe ma = batch_mean_se(batch_any);
    MeanSe mm = batch_mean_se(batch_m2);
    est.psi_hat = ms.mean;
    est.se = ms.se;
    est.psi_any = ma.mean;
    est.se_any = ma.se;
    est.moment2 = mm.mean;
    est.moment2_se = mm.se;
    est.ci_low = std::max(0.0, ms.mean - 1.96 * ms.se);
    est.ci_high = std::min(1.0, ms.mean + 1.96 * ms.se);
    est.ci_any_low = std::max(0.0, ma.mean - 1.96 * ma.se);
    est.ci_any_high = std::min(1.0, ma.mean + 1.96 * ma.se);

    if (hits == 0.0) {
        est.rare_zero = true;
        // one-sided rule-of-three bound on the per-slot probability
        const double slots = static_cast<double>(total_kept) * n;
        est.ci_high = slots > 0.0 ? 3.0 / slots : 1.0;
        est.ci_low = 0.0;
        est.ci_any_high = total_kept > 0 ? 3.0 / total_kept : 1.0;
        est.warning = "rare event: no window hits; use larger chains or smaller n";
    }
    return est;
}

OutlierEstimate estimate_outlier_prob(const DomainGrid& grid, const FieldSpec& field,
                                      const Window& window, int n, const McOptions& opt) {
    return sample_window_statistics(grid, field, window, n, opt);
}

OutlierEstimate estimate_any_coordinate_prob(const DomainGrid& grid, const FieldSpec& field,
                                             const Window& window, int n, const McOptions& opt) {
    OutlierEstimate est = sample_window_statistics(grid, field, window, n, opt);
    // present the any-coordinate event as the headline numbers
    std::swap(est.psi_hat, est.psi_any);
    std::swap(est.se, est.se_any);
    std::swap(est.ci_low, est.ci_any_low);
    std::swap(est.ci_high, est.ci_any_high);
    return est;
}

LdpReport ldp_rate_fit(const std::vector<LdpRecord>& records, const EquilibriumSolution& sol,
                       const FieldSpec& field, const DomainGrid& grid, const Window& window,
                       double relative_tol) {
    LdpReport rep;
    rep.records = records;

    std::vector<double> xs, ys, vars;
    for (const LdpRecord& r : records) {
        if (!(r.psi_hat > 0.0)) continue;
        xs.push_back(r.n);
        ys.push_back(-std::log(r.psi_hat));
        const double rel = r.se / r.psi_hat;
        vars.push_back(rel * rel);
    }
    if (xs.size() < 4)
        throw std::runtime_error("ldp_rate_fit: need at least 4 n values with nonzero estimates");

    LinFit fit = weighted_linear_fit(xs, ys, vars);
    rep.fitted_rate = fit.slope;
    rep.fitted_se = fit.se_slope;
    rep.intercept = fit.intercept;
    rep.r2 = fit.r2;

    double jmin = std::numeric_limits<double>::infinity();
    for (const cpx& w : window.probe_points(40)) {
        if (!grid.contains(w)) continue;
        jmin = std::min(jmin, rate_function(sol, field, w));
    }
    if (!std::isfinite(jmin))
        throw std::runtime_error("ldp_rate_fit: window has no probe points inside the domain");
    rep.predicted_rate = jmin;

    // below the stationarity noise floor the predicted rate is
    // indistinguishable from zero: grade the fit as flat instead
    const double rate_floor = std::max(1e-9, 3.0 * sol.beta * sol.kkt_residual);
    if (jmin < rate_floor) {
        rep.degenerate = true;
        rep.relative_gap = std::abs(rep.fitted_rate);
        rep.pass = std::abs(rep.fitted_rate) <= 2.0 * rep.fitted_se;
    } else {
        rep.relative_gap = std::abs(rep.fitted_rate - jmin) / jmin;
        rep.pass = rep.relative_gap <= relative_tol;
    }
    return rep;
}

FeketeResult fekete_ascent(const DomainGrid& grid, const FieldSpec& field, int n, int starts,
                           unsigned long long seed) {
    if (n < 2) throw std::invalid_argument("fekete_ascent: n < 2");
    std::vector<std::size_t> adm;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i)
        if (grid.tau_mass[i] > 0.0) adm.push_back(i);
    if (adm.size() < static_cast<std::size_t>(n))
        throw std::invalid_argument("fekete_ascent: fewer admissible nodes than points");

    const double beta = field.beta;
    std::vector<double> rv(grid.nodes.size());
    for (std::size_t i : adm) rv[i] = field.R(grid.nodes[i]);

    auto total_log = [&](const std::vector<std::size_t>& cfg) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            s -= n * beta * rv[cfg[i]];
            for (int j = i + 1; j < n; ++j)
                s += beta * log_gap(grid.nodes[cfg[i]], grid.nodes[cfg[j]]);
        }
        return s;
    };

    Rng rng(seed);
    FeketeResult best;
    best.log_value = kNegInf;
    for (int st = 0; st < std::max(1, starts); ++st) {
        std::vector<std::size_t> cfg(n);
        for (int k = 0; k < n;) {
            std::size_t cand = adm[rng.index(adm.size())];
            bool dup = false;
            for (int j = 0; j < k; ++j) dup |= cfg[j] == cand;
            if (!dup) cfg[k++] = cand;
        }
        int passes = 0;
        for (; passes < 200; ++passes) {
            bool moved = false;
            for (int k = 0; k < n; ++k) {
                double cur_sc = kNegInf;
                std::size_t arg = cfg[k];
                for (std::size_t cand : adm) {
                    double sc = -n * beta * rv[cand];
                    for (int j = 0; j < n; ++j) {
                        if (j == k) continue;
                        sc += beta * log_gap(grid.nodes[cand], grid.nodes[cfg[j]]);
                    }
                    if (sc > cur_sc) {
                        cur_sc = sc;
                        arg = cand;
                    }
                }
                if (arg != cfg[k]) {
                    cfg[k] = arg;
                    moved = true;
                }
            }
            if (!moved) break;
        }
        const double lv = total_log(cfg);
        if (lv > best.log_value) {
            best.log_value = lv;
            best.node_idx = cfg;
            best.passes = passes;
        }
    }
    best.value_per_n2 = best.log_value / (static_cast<double>(n) * n);
    return best;
}

double fekete_potential_gap(const FeketeResult& fek, const EquilibriumSolution& sol,
                            const DomainGrid& grid, int probes, unsigned long long seed) {
    const int n = static_cast<int>(fek.node_idx.size());
    if (n < 2) throw std::invalid_argument("fekete_potential_gap: configuration too small");
    Rng rng(seed);
    double worst = kNegInf;
    for (int t = 0; t < probes; ++t) {
        const cpx w = grid.nodes[rng.index(grid.nodes.size())];
        double s = 0.0;
        bool coincident = false;
        for (int j = 1; j < n; ++j) {
            const cpx zj = grid.nodes[fek.node_idx[static_cast<std::size_t>(j)]];
            if (zj == w) {
                coincident = true;
                break;
            }
            s += log_gap(w, zj);
        }
        if (coincident) continue;  // -inf gap, never the max
        const double gap = s / (n - 1) - log_potential(sol, w);
        worst = std::max(worst, gap);
    }
    return worst;
}

double wasserstein1_to_measure(const std::vector<cpx>& pts, const EquilibriumSolution& sol) {
    std::vector<std::pair<double, double>> emp, mu;
    for (const cpx& p : pts) {
        if (p.imag() != 0.0)
            throw std::invalid_argument("wasserstein1_to_measure: real-line points required");
        emp.emplace_back(p.real(), 1.0 / pts.size());
    }
    for (std::size_t k = 0; k < sol.measure.idx.size(); ++k)
        mu.emplace_back(sol.nodes[sol.measure.idx[k]].real(), sol.measure.w[k]);
    return wasserstein1_real(std::move(emp), std::move(mu));
}

}  // namespace betapot
