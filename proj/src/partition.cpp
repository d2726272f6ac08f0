#include "betapot/partition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betapot {

namespace {

// log Z over the given rule; tuples with repeated nodes contribute zero
// density, so ordered tuples reduce to n! times the sorted sum
double log_partition_on(const QuadNodes& q, const FieldSpec& field, int n, double nw) {
    const std::size_t N = q.size();
    std::vector<double> c(N);
    for (std::size_t k = 0; k < N; ++k)
        c[k] = q.log_w[k] - nw * field.beta * field.R(q.z[k]);

    LogAccumulator acc;
    if (n == 1) {
        for (std::size_t k = 0; k < N; ++k) acc.add(c[k]);
        return acc.value() + q.log_scale;
    }
    if (n == 2) {
        for (std::size_t k = 0; k < N; ++k)
            for (std::size_t l = k + 1; l < N; ++l)
                acc.add(c[k] + c[l] + field.beta * log_gap(q.z[k], q.z[l]));
        return std::log(2.0) + acc.value() + 2.0 * q.log_scale;
    }
    // n == 3: precompute the pair kernel
    std::vector<double> G(N * N);
    for (std::size_t k = 0; k < N; ++k)
        for (std::size_t l = k + 1; l < N; ++l)
            G[k * N + l] = field.beta * log_gap(q.z[k], q.z[l]);
    for (std::size_t k = 0; k < N; ++k)
        for (std::size_t l = k + 1; l < N; ++l)
            for (std::size_t m = l + 1; m < N; ++m)
                acc.add(c[k] + c[l] + c[m] + G[k * N + l] + G[k * N + m] + G[l * N + m]);
    return std::log(6.0) + acc.value() + 3.0 * q.log_scale;
}

QuadNodes partition_rule(const DomainGrid& grid, int order, bool refined) {
    if (grid.spec.kind == DomainKind::intervals)
        return gl_quadrature(grid.spec.intervals, refined ? 2 * order : order, 6,
                             grid.spec.tau_scale);
    if (refined) return grid_quadrature(grid);
    DomainSpec half = grid.spec;
    half.resolution = std::max(grid.spec.kind == DomainKind::circle ? 3 : 2,
                               grid.spec.resolution / 2);
    DomainGrid coarse = build_grid(half, nullptr);
    return grid_quadrature(coarse);
}

}  // namespace

PartitionRecord exact_partition_small_n(const DomainGrid& grid, const FieldSpec& field, int n,
                                        int order, double n_weight) {
    if (n < 1 || n > 3)
        throw std::invalid_argument("exact_partition_small_n: only n in {1,2,3}; larger n refused");
    const double nw = n_weight < 0.0 ? n : n_weight;

    const double coarse = log_partition_on(partition_rule(grid, order, false), field, n, nw);
    const double fine = log_partition_on(partition_rule(grid, order, true), field, n, nw);

    PartitionRecord rec;
    rec.n = n;
    rec.beta = field.beta;
    rec.field_tag = field.tag();
    rec.value_log = fine;
    rec.method = "quadrature";
    rec.error_estimate = std::abs(fine - coarse);
    if (!std::isfinite(rec.value_log))
        throw std::runtime_error("exact_partition_small_n: partition integral is not finite");
    return rec;
}

PsiQuadrature psi_small_n_quadrature(const DomainGrid& grid, const FieldSpec& field,
                                     const Window& window, int n, double n_weight) {
    if (n < 1 || n > 3)
        throw std::invalid_argument("psi_small_n_quadrature: only n in {1,2,3}");
    const double nw = n_weight < 0.0 ? n : n_weight;
    const QuadNodes q = grid_quadrature(grid);
    const std::vector<double> cov = window_coverage(q, window, grid.spec);
    const std::size_t N = q.size();

    std::vector<double> c(N), m2(N);
    for (std::size_t k = 0; k < N; ++k) {
        c[k] = q.log_w[k] - nw * field.beta * field.R(q.z[k]);
        m2[k] = std::norm(q.z[k]);
    }

    LogAccumulator z, ind, out, mom;
    auto tally = [&](double t, double count_frac, double all_out, double mean_m2) {
        z.add(t);
        if (count_frac > 0.0) ind.add(t + std::log(count_frac));
        if (all_out > 0.0) out.add(t + std::log(all_out));
        if (mean_m2 > 0.0) mom.add(t + std::log(mean_m2));
    };

    if (n == 1) {
        for (std::size_t k = 0; k < N; ++k) tally(c[k], cov[k], 1.0 - cov[k], m2[k]);
    } else if (n == 2) {
        for (std::size_t k = 0; k < N; ++k)
            for (std::size_t l = k + 1; l < N; ++l) {
                const double t = c[k] + c[l] + field.beta * log_gap(q.z[k], q.z[l]);
                tally(t, 0.5 * (cov[k] + cov[l]), (1.0 - cov[k]) * (1.0 - cov[l]),
                      0.5 * (m2[k] + m2[l]));
            }
    } else {
        std::vector<double> G(N * N);
        for (std::size_t k = 0; k < N; ++k)
            for (std::size_t l = k + 1; l < N; ++l)
                G[k * N + l] = field.beta * log_gap(q.z[k], q.z[l]);
        for (std::size_t k = 0; k < N; ++k)
            for (std::size_t l = k + 1; l < N; ++l)
                for (std::size_t m = l + 1; m < N; ++m) {
                    const double t = c[k] + c[l] + c[m] + G[k * N + l] + G[k * N + m] + G[l * N + m];
                    tally(t, (cov[k] + cov[l] + cov[m]) / 3.0,
                          (1.0 - cov[k]) * (1.0 - cov[l]) * (1.0 - cov[m]),
                          (m2[k] + m2[l] + m2[m]) / 3.0);
                }
    }

    PsiQuadrature res;
    res.n = n;
    const double lz = z.value();
    if (!std::isfinite(lz))
        throw std::runtime_error("psi_small_n_quadrature: zero partition mass");
    res.psi_mean = std::isfinite(ind.value()) ? std::exp(ind.value() - lz) : 0.0;
    res.psi_any = std::isfinite(out.value()) ? 1.0 - std::exp(out.value() - lz) : 1.0;
    res.moment2 = std::isfinite(mom.value()) ? std::exp(mom.value() - lz) : 0.0;
    double lfact = 0.0;
    for (int k = 2; k <= n; ++k) lfact += std::log(static_cast<double>(k));
    res.log_z = lz + lfact + n * q.log_scale;
    return res;
}

HnEstimate estimate_partition_ratio(const DomainGrid& grid, const FieldSpec& field, int m,
                                    int n_target, const McOptions& opt, int order) {
    if (m < 2) throw std::invalid_argument("estimate_partition_ratio: level m < 2");
    if (n_target < m) throw std::invalid_argument("estimate_partition_ratio: n_target < m");

    const QuadNodes q = grid.spec.kind == DomainKind::intervals
                            ? gl_quadrature(grid.spec.intervals, order, 6, grid.spec.tau_scale)
                            : grid_quadrature(grid);
    const std::size_t N = q.size();
    std::vector<double> base(N);
    for (std::size_t k = 0; k < N; ++k)
        base[k] = q.log_w[k] - n_target * field.beta * field.R(q.z[k]);

    const long burn = opt.effective_burn_in();
    if (opt.sweeps <= burn)
        throw std::invalid_argument("estimate_partition_ratio: sweeps must exceed burn-in");
    const int B = std::max(3, opt.batches_per_chain);

    std::vector<double> batch_logs;
    LogAccumulator all;
    long total = 0;

    for (unsigned long long seed : opt.seeds) {
        MetropolisChain chain(grid, field, m - 1, n_target, seed, opt.initial_step);
        for (long s = 0; s < burn; ++s) chain.sweep();
        chain.set_adapting(false);

        const long kept_per_chain = (opt.sweeps - burn) / std::max(1, opt.thin);
        const long per_batch = std::max<long>(1, kept_per_chain / B);
        LogAccumulator batch;
        long in_batch = 0;
        for (long s = burn; s < opt.sweeps; ++s) {
            chain.sweep();
            if ((s - burn) % std::max(1, opt.thin) != 0) continue;
            const std::vector<cpx>& zs = chain.points();
            LogAccumulator inner;
            for (std::size_t k = 0; k < N; ++k) {
                double t = base[k];
                for (const cpx& zj : zs) t += field.beta * log_gap(q.z[k], zj);
                inner.add(t);
            }
            const double li = inner.value() + q.log_scale;
            all.add(li);
            batch.add(li);
            ++in_batch;
            ++total;
            if (in_batch == per_batch) {
                batch_logs.push_back(batch.value() - std::log(static_cast<double>(in_batch)));
                batch = LogAccumulator();
                in_batch = 0;
            }
        }
    }
    if (total == 0) throw std::runtime_error("estimate_partition_ratio: no samples kept");

    HnEstimate est;
    est.m = m;
    est.n_target = n_target;
    est.samples = total;
    est.log_h = all.value() - std::log(static_cast<double>(total));
    MeanSe bm = batch_mean_se(batch_logs);
    est.se_log = bm.se;

    // crude equilibration screen: first half of batches vs second half
    const std::size_t half = batch_logs.size() / 2;
    if (half >= 2) {
        std::vector<double> a(batch_logs.begin(), batch_logs.begin() + half);
        std::vector<double> b(batch_logs.begin() + half, batch_logs.end());
        MeanSe ma = batch_mean_se(a), mb = batch_mean_se(b);
        const double sep = std::abs(ma.mean - mb.mean);
        const double slack = 3.0 * std::sqrt(ma.se * ma.se + mb.se * mb.se) + 1e-12;
        est.equilibrated = sep <= slack;
    }
    return est;
}

HnEstimate ratio_estimate_h_n(const DomainGrid& grid, const FieldSpec& field, int n,
                              const McOptions& opt, int order) {
    return estimate_partition_ratio(grid, field, n, n, opt, order);
}

TelescopeResult telescope_log_partition(const DomainGrid& grid, const FieldSpec& field,
                                        int n_target, const McOptions& opt, int order) {
    if (n_target < 2) throw std::invalid_argument("telescope_log_partition: n_target < 2");
    TelescopeResult res;
    res.n = n_target;
    res.anchor = exact_partition_small_n(grid, field, 2, order, n_target);
    res.log_z = res.anchor.value_log;
    double var = res.anchor.error_estimate * res.anchor.error_estimate;
    for (int m = 3; m <= n_target; ++m) {
        McOptions level = opt;
        for (auto& s : level.seeds) s += static_cast<unsigned long long>(m) * 0x9E3779B97F4A7C15ull;
        HnEstimate h = estimate_partition_ratio(grid, field, m, n_target, level, order);
        res.log_z += h.log_h;
        var += h.se_log * h.se_log;
        res.levels.push_back(std::move(h));
    }
    res.se = std::sqrt(var);
    return res;
}

EnergyScalingReport energy_scaling_check(double log_z, int n, const EquilibriumSolution& sol,
                                         double rel_tol, double abs_tol) {
    EnergyScalingReport rep;
    rep.value = log_z / (static_cast<double>(n) * n);
    rep.target = -0.5 * sol.beta * sol.energy;
    rep.deviation = std::abs(rep.value - rep.target);
    rep.pass = rep.deviation <= std::max(rel_tol * std::abs(rep.target), abs_tol);
    return rep;
}

}  // namespace betapot
