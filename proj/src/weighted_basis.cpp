#include "betapot/weighted_basis.hpp"

#include <algorithm>
#include <cmath>

#include "betapot/numeric.hpp"

namespace betapot {

namespace {

cpx dot(const std::vector<double>& mass, const std::vector<cpx>& a, const std::vector<cpx>& b) {
    cpx s = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) s += mass[i] * std::conj(a[i]) * b[i];
    return s;
}

double norm_of(const std::vector<double>& mass, const std::vector<cpx>& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i) s += mass[i] * std::norm(a[i]);
    return std::sqrt(s);
}

// weighted values of a random polynomial drawn with standard normal
// coefficients over the orthonormal basis
std::vector<double> random_poly_abs(const WeightedBasis& basis, Rng& rng) {
    const std::size_t m = basis.mass.size();
    std::vector<cpx> f(m, 0.0);
    for (int k = 0; k <= basis.degree; ++k) {
        const double xi = rng.normal();
        for (std::size_t i = 0; i < m; ++i) f[i] += xi * basis.values[static_cast<std::size_t>(k)][i];
    }
    std::vector<double> a(m);
    for (std::size_t i = 0; i < m; ++i) a[i] = std::abs(f[i]);
    return a;
}

}  // namespace

WeightedBasis build_weighted_basis(const DomainGrid& grid, const FieldSpec& field, int n) {
    grid.validate();
    if (n < 0) throw std::invalid_argument("build_weighted_basis: negative degree");

    WeightedBasis basis;
    basis.degree = n;
    basis.planar = !grid.real_line();
    basis.n_weight = n;
    basis.beta = field.beta;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        if (grid.tau_mass[i] <= 0.0) continue;
        basis.node_idx.push_back(i);
        basis.mass.push_back(grid.tau_mass[i]);
    }
    const std::size_t m = basis.node_idx.size();
    if (m == 0) throw std::invalid_argument("build_weighted_basis: no admissible nodes");

    std::vector<cpx> zs(m);
    std::vector<cpx> raw(m);
    for (std::size_t i = 0; i < m; ++i) {
        zs[i] = grid.nodes[basis.node_idx[i]];
        raw[i] = std::exp(-static_cast<double>(n) * field.R(zs[i]));
    }

    double max_raw = 0.0, min_kept = std::numeric_limits<double>::infinity();
    basis.values.reserve(n + 1);
    basis.coeffs.reserve(n + 1);
    for (int k = 0; k <= n; ++k) {
        if (k > 0)
            for (std::size_t i = 0; i < m; ++i) raw[i] *= zs[i];
        std::vector<cpx> v = raw;
        std::vector<cpx> c(static_cast<std::size_t>(n) + 1, 0.0);
        c[static_cast<std::size_t>(k)] = 1.0;

        const double raw_norm = norm_of(basis.mass, v);
        max_raw = std::max(max_raw, raw_norm);
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j < k; ++j) {
                const cpx p = dot(basis.mass, basis.values[static_cast<std::size_t>(j)], v);
                for (std::size_t i = 0; i < m; ++i)
                    v[i] -= p * basis.values[static_cast<std::size_t>(j)][i];
                for (std::size_t l = 0; l <= static_cast<std::size_t>(n); ++l)
                    c[l] -= p * basis.coeffs[static_cast<std::size_t>(j)][l];
            }
        }
        const double nv = norm_of(basis.mass, v);
        if (!(nv > 1e-10 * raw_norm) || !std::isfinite(nv)) throw SingularGramError(k);
        min_kept = std::min(min_kept, nv);
        for (std::size_t i = 0; i < m; ++i) v[i] /= nv;
        for (auto& cl : c) cl /= nv;
        basis.values.push_back(std::move(v));
        basis.coeffs.push_back(std::move(c));
    }
    const double ratio = max_raw / min_kept;
    basis.gram_condition = ratio * ratio;
    return basis;
}

double bm_constant(const WeightedBasis& basis) {
    double best = 0.0;
    for (std::size_t i = 0; i < basis.mass.size(); ++i) {
        double k = 0.0;
        for (const auto& col : basis.values) k += std::norm(col[i]);
        best = std::max(best, k);
    }
    return std::sqrt(best);
}

std::size_t bm_argmax_index(const WeightedBasis& basis) {
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < basis.mass.size(); ++i) {
        double k = 0.0;
        for (const auto& col : basis.values) k += std::norm(col[i]);
        if (k > best) {
            best = k;
            arg = i;
        }
    }
    return arg;
}

double orthonormality_defect(const WeightedBasis& basis) {
    double worst = 0.0;
    for (std::size_t j = 0; j < basis.values.size(); ++j)
        for (std::size_t k = j; k < basis.values.size(); ++k) {
            const cpx g = dot(basis.mass, basis.values[j], basis.values[k]);
            worst = std::max(worst, std::abs(g - (j == k ? cpx(1.0) : cpx(0.0))));
        }
    return worst;
}

SupRestrictionReport sup_restriction_check(const EquilibriumSolution& sol, const DomainGrid& grid,
                                           const FieldSpec& field, int n, int trials,
                                           unsigned long long seed, double dilation_cells) {
    if (sol.support_nodes.empty())
        throw std::invalid_argument("sup_restriction_check: empty support");
    const WeightedBasis basis = build_weighted_basis(grid, field, n);
    const std::vector<int> region = dilate_node_set(grid, sol.support_nodes, dilation_cells);
    std::vector<char> inside(grid.nodes.size(), 0);
    for (int i : region) inside[static_cast<std::size_t>(i)] = 1;

    Rng rng(seed);
    SupRestrictionReport rep;
    rep.trials = trials;
    for (int t = 0; t < trials; ++t) {
        const std::vector<double> a = random_poly_abs(basis, rng);
        double sup_all = 0.0, sup_in = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            sup_all = std::max(sup_all, a[i]);
            if (inside[basis.node_idx[i]]) sup_in = std::max(sup_in, a[i]);
        }
        if (sup_in > 0.0) rep.max_ratio = std::max(rep.max_ratio, sup_all / sup_in);
    }
    return rep;
}

MonicBoundReport monic_lower_bound_check(const EquilibriumSolution& sol, const DomainGrid& grid,
                                         const FieldSpec& field, int n, int trials,
                                         unsigned long long seed) {
    if (sol.support_nodes.empty())
        throw std::invalid_argument("monic_lower_bound_check: empty support");
    Rng rng(seed);
    MonicBoundReport rep;
    rep.trials = trials;
    const double h = grid.cell_scale;
    rep.slack_log = 2.0 * n * h * h + 0.05;
    rep.min_log_margin = std::numeric_limits<double>::infinity();

    std::vector<double> coeff(static_cast<std::size_t>(n), 0.0);
    for (int t = 0; t < trials; ++t) {
        for (auto& c : coeff) c = rng.normal();
        double log_sup = kNegInf;
        for (int i : sol.support_nodes) {
            const cpx z = grid.nodes[static_cast<std::size_t>(i)];
            cpx p = 1.0;  // monic: z^n + lower terms
            for (int k = n - 1; k >= 0; --k) p = p * z + coeff[static_cast<std::size_t>(k)];
            const double av = std::abs(p);
            if (av <= 0.0) continue;
            log_sup = std::max(log_sup,
                               std::log(av) - n * field.R(z));
        }
        rep.min_log_margin = std::min(rep.min_log_margin, log_sup + n * sol.rho);
    }
    rep.pass = rep.min_log_margin >= -rep.slack_log;
    return rep;
}

TailMassReport tail_mass_check(const DomainGrid& grid, const FieldSpec& field,
                               const EquilibriumSolution& sol, const std::vector<int>& n_values,
                               int trials, double dilation_cells, unsigned long long seed) {
    if (n_values.size() < 2) throw std::invalid_argument("tail_mass_check: need >= 2 degrees");
    const std::vector<int> region = dilate_node_set(grid, sol.contact_nodes, dilation_cells);
    std::vector<char> inside(grid.nodes.size(), 0);
    for (int i : region) inside[static_cast<std::size_t>(i)] = 1;
    std::size_t outside_mass_cells = 0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i)
        if (grid.tau_mass[i] > 0.0 && !inside[i]) ++outside_mass_cells;
    if (outside_mass_cells == 0)
        throw std::invalid_argument("tail_mass_check: neighborhood covers the domain, vacuous");

    TailMassReport rep;
    rep.n_values = n_values;
    Rng rng(seed);
    const double halfb = 0.5 * field.beta;
    for (int n : n_values) {
        const WeightedBasis basis = build_weighted_basis(grid, field, n);
        std::vector<double> ratios;
        ratios.reserve(trials);
        for (int t = 0; t < trials; ++t) {
            const std::vector<double> a = random_poly_abs(basis, rng);
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < a.size(); ++i) {
                const double p = std::pow(a[i] * a[i], halfb);
                if (inside[basis.node_idx[i]]) den += basis.mass[i] * p;
                else num += basis.mass[i] * p;
            }
            ratios.push_back(den > 0.0 ? num / den : std::numeric_limits<double>::infinity());
        }
        std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
        rep.median_ratio.push_back(ratios[ratios.size() / 2]);
    }

    std::vector<double> xs, ys, vars;
    for (std::size_t j = 0; j < rep.n_values.size(); ++j) {
        if (!(rep.median_ratio[j] > 0.0) || !std::isfinite(rep.median_ratio[j])) continue;
        xs.push_back(rep.n_values[j]);
        ys.push_back(std::log(rep.median_ratio[j]));
        vars.push_back(1.0);
    }
    if (xs.size() >= 2) {
        LinFit fit = weighted_linear_fit(xs, ys, vars);
        rep.slope = fit.slope;
        rep.r2 = fit.r2;
        rep.pass = fit.slope < 0.0 && fit.r2 >= 0.9;
    }
    rep.min_per_doubling = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j + 1 < rep.n_values.size(); ++j) {
        if (rep.n_values[j + 1] != 2 * rep.n_values[j]) continue;
        if (!(rep.median_ratio[j + 1] > 0.0)) continue;
        rep.min_per_doubling =
            std::min(rep.min_per_doubling, rep.median_ratio[j] / rep.median_ratio[j + 1]);
    }
    return rep;
}

IntegrabilityReport tau_tail_integrable(const DomainSpec& spec, double a) {
    IntegrabilityReport rep;
    rep.exponent = a;
    bool unbounded = false;
    if (spec.kind == DomainKind::intervals)
        for (const auto& iv : spec.intervals)
            if (!std::isfinite(iv.first) || !std::isfinite(iv.second)) unbounded = true;
    if (!unbounded) {
        rep.pass = true;
        rep.message = "bounded domain: finite measure, far-field condition vacuous";
        return rep;
    }
    rep.pass = a > 1.0;
    rep.message = rep.pass
                      ? "Lebesgue tails integrable against |z|^-a for a > 1"
                      : "Lebesgue tails diverge against |z|^-a for a <= 1";
    return rep;
}

}  // namespace betapot
