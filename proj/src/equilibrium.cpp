#include "betapot/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace betapot {

namespace {

// one column of the kernel matrix, diagonal desingularized to log(delta/2)
void kernel_column(const std::vector<cpx>& z, const std::vector<double>& diag, std::size_t j,
                   std::vector<double>& col) {
    const std::size_t n = z.size();
    col.resize(n);
    for (std::size_t i = 0; i < n; ++i) col[i] = log_gap(z[i], z[j]);
    col[j] = std::log(0.5 * diag[j]);
}

struct ColumnCache {
    std::unordered_map<std::size_t, std::vector<double>> map;
    std::size_t cap;
    const std::vector<cpx>& z;
    const std::vector<double>& diag;

    ColumnCache(const std::vector<cpx>& z_, const std::vector<double>& d_, std::size_t cap_)
        : cap(cap_), z(z_), diag(d_) {}

    const std::vector<double>& get(std::size_t j) {
        auto it = map.find(j);
        if (it != map.end()) return it->second;
        if (map.size() >= cap) map.clear();
        auto& col = map[j];
        kernel_column(z, diag, j, col);
        return col;
    }
};

double growth_gauge(const FieldSpec& f, double r) {
    double rv = f.radial() ? f.R(cpx(r, 0.0))
                           : std::min(f.R(cpx(r, 0.0)), f.R(cpx(-r, 0.0)));
    return rv - (1.0 + f.superlog_margin_b) * std::log(r);
}

}  // namespace

EquilibriumSolution solve_equilibrium(const DomainGrid& grid, const FieldSpec& field,
                                      const SolverOptions& opt) {
    grid.validate();
    field.validate();
    const std::size_t N = grid.nodes.size();

    std::vector<char> admissible(N, 0);
    std::vector<double> r(N);
    for (std::size_t i = 0; i < N; ++i) {
        admissible[i] = grid.tau_mass[i] > 0.0;
        if (!admissible[i]) continue;
        r[i] = field.R(grid.nodes[i]);
        if (!std::isfinite(r[i]))
            throw std::runtime_error("solve_equilibrium: field value not finite on grid");
    }

    ColumnCache cache(grid.nodes, grid.diag_desing,
                      static_cast<std::size_t>(std::max(1, opt.column_cache_cap)));

    // start from the best single atom: E(e_i) = -log(delta_i/2) + 2 R_i
    std::size_t start = static_cast<std::size_t>(-1);
    double best = kNegInf;
    for (std::size_t i = 0; i < N; ++i) {
        if (!admissible[i]) continue;
        double e = -std::log(0.5 * grid.diag_desing[i]) + 2.0 * r[i];
        if (start == static_cast<std::size_t>(-1) || e < best) {
            best = e;
            start = i;
        }
    }

    std::vector<double> w(N, 0.0);
    w[start] = 1.0;
    std::vector<double> u = cache.get(start);  // copy: u = L w

    double E = -std::log(0.5 * grid.diag_desing[start]) + 2.0 * r[start];
    EquilibriumSolution sol;
    sol.energy_trace.push_back(E);

    double gap = std::numeric_limits<double>::infinity();
    int it = 0, stuck = 0;
    for (; it < opt.max_iterations; ++it) {
        // fused scan: FW vertex, away vertex, <phi,w>, <u,w>
        std::size_t s = static_cast<std::size_t>(-1), v = static_cast<std::size_t>(-1);
        double phi_s = 0.0, phi_v = 0.0, phi_w = 0.0, wu = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            if (!admissible[i]) continue;
            const double phi = r[i] - u[i];
            if (s == static_cast<std::size_t>(-1) || phi < phi_s) {
                s = i;
                phi_s = phi;
            }
            if (w[i] > 0.0) {
                phi_w += w[i] * phi;
                wu += w[i] * u[i];
                if (v == static_cast<std::size_t>(-1) || phi > phi_v) {
                    v = i;
                    phi_v = phi;
                }
            }
        }

        gap = 2.0 * (phi_w - phi_s);
        if (gap <= opt.gap_rel_tol * std::max(1.0, std::abs(E))) break;

        const double b_fw = -gap;
        const double b_aw = 2.0 * (phi_w - phi_v);
        bool fw_step = b_fw <= b_aw || w[v] >= 1.0;

        double b, a, gmax;
        std::size_t pivot;
        if (fw_step) {
            pivot = s;
            b = b_fw;
            gmax = 1.0;
        } else {
            pivot = v;
            b = b_aw;
            gmax = w[v] / (1.0 - w[v]);
        }
        const std::vector<double>& col = cache.get(pivot);
        const double Ldd = fw_step ? (col[pivot] - 2.0 * u[pivot] + wu)
                                   : (wu - 2.0 * u[pivot] + col[pivot]);
        a = -Ldd;

        double gamma;
        if (a > 0.0) gamma = std::min(gmax, -b / (2.0 * a));
        else gamma = (b < 0.0) ? gmax : 0.0;
        if (!(gamma > 0.0)) {
            if (++stuck >= 2) break;
            continue;
        }
        stuck = 0;

        if (fw_step) {
            const double c = 1.0 - gamma;
            for (std::size_t i = 0; i < N; ++i) {
                w[i] *= c;
                u[i] = c * u[i] + gamma * col[i];
            }
            w[pivot] += gamma;
        } else {
            const double c = 1.0 + gamma;
            for (std::size_t i = 0; i < N; ++i) {
                w[i] *= c;
                u[i] = c * u[i] - gamma * col[i];
            }
            w[pivot] -= gamma;
            if (gamma == gmax || w[pivot] < 0.0) w[pivot] = 0.0;  // drop step
        }

        E += b * gamma + a * gamma * gamma;  // nonpositive increment
        if (it % opt.trace_stride == 0) sol.energy_trace.push_back(E);

        if ((it + 1) % opt.resync_every == 0) {
            double mass = 0.0;
            for (std::size_t i = 0; i < N; ++i) mass += w[i];
            for (std::size_t i = 0; i < N; ++i) w[i] /= mass;
            std::fill(u.begin(), u.end(), 0.0);
            for (std::size_t j = 0; j < N; ++j) {
                if (w[j] == 0.0) continue;
                const double wj = w[j];
                const cpx zj = grid.nodes[j];
                for (std::size_t i = 0; i < N; ++i)
                    u[i] += wj * ((i == j) ? std::log(0.5 * grid.diag_desing[j])
                                           : log_gap(grid.nodes[i], zj));
            }
        }
    }

    // exact finish: renormalize, rebuild potential, recompute all reported scalars
    {
        double mass = 0.0;
        for (std::size_t i = 0; i < N; ++i) mass += w[i];
        for (std::size_t i = 0; i < N; ++i) w[i] /= mass;
        std::fill(u.begin(), u.end(), 0.0);
        for (std::size_t j = 0; j < N; ++j) {
            if (w[j] == 0.0) continue;
            const double wj = w[j];
            const cpx zj = grid.nodes[j];
            for (std::size_t i = 0; i < N; ++i)
                u[i] += wj * ((i == j) ? std::log(0.5 * grid.diag_desing[j])
                                       : log_gap(grid.nodes[i], zj));
        }
    }

    double wu = 0.0, wr = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        if (w[i] == 0.0) continue;
        wu += w[i] * u[i];
        wr += w[i] * r[i];
    }
    sol.energy = -wu + 2.0 * wr;
    sol.energy_trace.push_back(E);
    sol.rho = wr - wu;
    sol.beta = field.beta;
    sol.iterations = it;
    sol.nodes = grid.nodes;
    sol.diag_desing = grid.diag_desing;
    sol.weights = w;
    sol.potential_values = u;

    double maxw = 0.0;
    for (double x : w) maxw = std::max(maxw, x);
    const double wcut = opt.support_weight_rel * maxw;
    for (std::size_t i = 0; i < N; ++i) {
        if (w[i] > wcut) {
            sol.support_nodes.push_back(static_cast<int>(i));
            sol.measure.idx.push_back(i);
            sol.measure.w.push_back(w[i]);
        }
    }
    sol.measure.renormalize();

    double res = 0.0;
    for (int i : sol.support_nodes)
        res = std::max(res, std::abs(r[static_cast<std::size_t>(i)] -
                                     u[static_cast<std::size_t>(i)] - sol.rho));
    for (std::size_t i = 0; i < N; ++i) {
        if (!admissible[i]) continue;
        res = std::max(res, sol.rho - (r[i] - u[i]));
    }
    sol.kkt_residual = res;

    const double tol_eq = std::max(3.0 * res, 1e-12);
    for (std::size_t i = 0; i < N; ++i) {
        if (!admissible[i]) continue;
        if (r[i] - u[i] - sol.rho <= tol_eq) sol.contact_nodes.push_back(static_cast<int>(i));
    }

    double phi_w = 0.0, phi_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < N; ++i) {
        if (!admissible[i]) continue;
        const double phi = r[i] - u[i];
        phi_min = std::min(phi_min, phi);
        if (w[i] > 0.0) phi_w += w[i] * phi;
    }
    sol.duality_gap = 2.0 * (phi_w - phi_min);
    sol.converged = sol.duality_gap <= opt.gap_rel_tol * std::max(1.0, std::abs(sol.energy)) ||
                    gap <= opt.gap_rel_tol * std::max(1.0, std::abs(sol.energy));
    return sol;
}

double weighted_energy(const DiscreteMeasure& mu, const DomainGrid& grid,
                       const FieldSpec& field, bool desingularize) {
    mu.validate();
    double quad = 0.0, lin = 0.0;
    for (std::size_t ai = 0; ai < mu.idx.size(); ++ai) {
        const cpx zi = grid.nodes[mu.idx[ai]];
        lin += mu.w[ai] * field.R(zi);
        for (std::size_t bi = 0; bi < mu.idx.size(); ++bi) {
            if (ai == bi) {
                if (desingularize)
                    quad += mu.w[ai] * mu.w[bi] * std::log(0.5 * grid.diag_desing[mu.idx[ai]]);
                continue;
            }
            quad += mu.w[ai] * mu.w[bi] * log_gap(zi, grid.nodes[mu.idx[bi]]);
        }
    }
    return -quad + 2.0 * lin;
}

double log_potential(const EquilibriumSolution& sol, cpx z, bool* desingularized) {
    if (desingularized) *desingularized = false;
    double u = 0.0;
    for (std::size_t k = 0; k < sol.measure.idx.size(); ++k) {
        const std::size_t i = sol.measure.idx[k];
        const double d2 = std::norm(z - sol.nodes[i]);
        const double floor = 0.5 * sol.diag_desing[i];
        if (d2 < floor * floor) {
            u += sol.measure.w[k] * std::log(floor);
            if (desingularized) *desingularized = true;
        } else {
            u += sol.measure.w[k] * 0.5 * std::log(d2);
        }
    }
    return u;
}

double rate_function(const EquilibriumSolution& sol, const FieldSpec& field, cpx z,
                     bool* warned) {
    const double raw = field.R(z) - log_potential(sol, z) - sol.rho;
    if (warned) *warned = raw < -3.0 * std::max(sol.kkt_residual, 1e-12);
    return sol.beta * std::max(0.0, raw);
}

double support_radius(const EquilibriumSolution& sol) {
    double rmax = 0.0;
    for (int i : sol.support_nodes) rmax = std::max(rmax, std::abs(sol.nodes[static_cast<std::size_t>(i)]));
    return rmax;
}

SupportComparison compare_supports(const EquilibriumSolution& sol, const DomainGrid& grid,
                                   double skin_cells) {
    SupportComparison cmp;
    cmp.skin_cells = skin_cells;
    cmp.n_support = sol.support_nodes.size();
    cmp.n_contact = sol.contact_nodes.size();

    std::vector<char> in_sup(grid.nodes.size(), 0), in_con(grid.nodes.size(), 0);
    for (int i : sol.support_nodes) in_sup[static_cast<std::size_t>(i)] = 1;
    for (int i : sol.contact_nodes) in_con[static_cast<std::size_t>(i)] = 1;

    const double skin = skin_cells * grid.cell_scale;
    const double skin2 = skin * skin;
    auto near_set = [&](std::size_t i, const std::vector<int>& set) {
        for (int j : set)
            if (std::norm(grid.nodes[i] - grid.nodes[static_cast<std::size_t>(j)]) <= skin2)
                return true;
        return false;
    };

    std::size_t uni = 0, strict = 0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        if (!in_sup[i] && !in_con[i]) continue;
        ++uni;
        if (in_sup[i] && in_con[i]) continue;
        if (in_sup[i] && !near_set(i, sol.contact_nodes)) ++strict;
        if (in_con[i] && !near_set(i, sol.support_nodes)) ++strict;
    }
    cmp.n_union = uni;
    cmp.n_strict_mismatch = strict;
    if (strict == 0) cmp.verdict = "holds";
    else if (uni > 0 && static_cast<double>(strict) / uni > 0.25) cmp.verdict = "fails";
    else cmp.verdict = "marginal";
    return cmp;
}

double radial_support_radius(const FieldSpec& field) {
    if (!field.radial())
        throw std::invalid_argument("radial_support_radius: field is not radially symmetric");
    auto f = [&](double rr) { return rr * field.radial_R_derivative(rr) - 1.0; };
    const int kScan = 400;
    const double r_lo = 1e-4, r_hi = 1e4;
    double prev_r = r_lo, prev_f = f(r_lo);
    for (int i = 1; i < kScan; ++i) {
        double t = static_cast<double>(i) / (kScan - 1);
        double rr = r_lo * std::pow(r_hi / r_lo, t);
        double fr = f(rr);
        if (fr <= prev_f)
            throw std::runtime_error("radial_support_radius: r R'(r) is not strictly increasing");
        if (prev_f < 0.0 && fr >= 0.0) {
            double lo = prev_r, hi = rr;
            for (int k = 0; k < 200; ++k) {
                double mid = 0.5 * (lo + hi);
                if (f(mid) >= 0.0) hi = mid;
                else lo = mid;
                if (hi - lo < 1e-12 * hi) break;
            }
            return 0.5 * (lo + hi);
        }
        prev_r = rr;
        prev_f = fr;
    }
    throw std::runtime_error("radial_support_radius: no root in bracket [1e-4, 1e4]");
}

double radial_robin_constant(const FieldSpec& field, double t0) {
    return field.R(cpx(t0, 0.0)) - std::log(t0);
}

SuperlogReport validate_superlogarithmic(const FieldSpec& field, double r_t) {
    SuperlogReport rep;
    rep.r_t = r_t;
    rep.gauge_at[0] = growth_gauge(field, r_t);
    rep.gauge_at[1] = growth_gauge(field, 2.0 * r_t);
    rep.gauge_at[2] = growth_gauge(field, 4.0 * r_t);
    bool increasing = rep.gauge_at[0] < rep.gauge_at[1] && rep.gauge_at[1] < rep.gauge_at[2];
    bool finite = std::isfinite(rep.gauge_at[0]) && std::isfinite(rep.gauge_at[1]) &&
                  std::isfinite(rep.gauge_at[2]);
    rep.pass = increasing && finite;
    rep.message = rep.pass ? "growth gauge keeps climbing past truncation radius"
                           : "field grows too slowly beyond the truncation radius";
    return rep;
}

}  // namespace betapot
