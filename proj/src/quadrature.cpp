#include "betapot/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betapot {

QuadNodes grid_quadrature(const DomainGrid& grid) {
    grid.validate();
    QuadNodes q;
    q.kind = grid.spec.kind;
    double max_mass = 0.0;
    for (double m : grid.tau_mass) max_mass = std::max(max_mass, m);
    q.log_scale = std::log(max_mass);
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        if (grid.tau_mass[i] <= 0.0) continue;
        q.z.push_back(grid.nodes[i]);
        q.log_w.push_back(std::log(grid.tau_mass[i] / max_mass));
        if (grid.spec.kind == DomainKind::intervals) {
            q.hx.push_back(grid.cell_volume[i]);
            q.hy.push_back(0.0);
        } else if (grid.spec.kind == DomainKind::circle) {
            q.hx.push_back(grid.cell_volume[i]);  // arc length
            q.hy.push_back(0.0);
        } else {
            double h = std::sqrt(grid.cell_volume[i]);
            q.hx.push_back(h);
            q.hy.push_back(h);
        }
    }
    if (q.z.empty()) throw std::runtime_error("grid_quadrature: no positive-mass cells");
    return q;
}

QuadNodes gl_quadrature(const std::vector<std::pair<double, double>>& intervals, int order,
                        int panels_per_interval, double tau_scale) {
    if (order < 2) throw std::invalid_argument("gl_quadrature: order < 2");
    if (panels_per_interval < 1) throw std::invalid_argument("gl_quadrature: panels < 1");
    std::vector<double> x, w;
    gauss_legendre(order, x, w);

    QuadNodes q;
    q.kind = DomainKind::intervals;
    std::vector<double> mass;
    for (const auto& iv : intervals) {
        if (!(iv.second > iv.first) || !std::isfinite(iv.first) || !std::isfinite(iv.second))
            throw std::invalid_argument("gl_quadrature: malformed interval");
        double plen = (iv.second - iv.first) / panels_per_interval;
        for (int p = 0; p < panels_per_interval; ++p) {
            double a = iv.first + p * plen;
            for (int k = 0; k < order; ++k) {
                double t = a + 0.5 * plen * (x[k] + 1.0);
                q.z.emplace_back(t, 0.0);
                mass.push_back(0.5 * plen * w[k] * tau_scale);
                q.hx.push_back(0.0);  // point nodes: no cell extent
                q.hy.push_back(0.0);
            }
        }
    }
    double max_mass = 0.0;
    for (double m : mass) max_mass = std::max(max_mass, m);
    q.log_scale = std::log(max_mass);
    for (double m : mass) q.log_w.push_back(std::log(m / max_mass));
    return q;
}

std::vector<double> window_coverage(const QuadNodes& quad, const Window& window,
                                    const DomainSpec& spec) {
    window.validate();
    std::vector<double> cov(quad.size(), 0.0);
    for (std::size_t k = 0; k < quad.size(); ++k) {
        const cpx z = quad.z[k];
        switch (quad.kind) {
            case DomainKind::intervals:
                if (quad.hx[k] > 0.0) cov[k] = window.coverage(z, quad.hx[k], 0.0, true);
                else cov[k] = window.contains(z) ? 1.0 : 0.0;
                break;
            case DomainKind::circle: {
                // subsample along the arc segment centered at the node
                const double r = std::abs(z);
                const double half = 0.5 * quad.hx[k] / r;  // half arc angle
                const double th0 = std::arg(z);
                int in = 0;
                const int kSub = 16;
                for (int s = 0; s < kSub; ++s) {
                    double th = th0 + half * (2.0 * (s + 0.5) / kSub - 1.0);
                    if (window.contains(cpx(r * std::cos(th), r * std::sin(th)))) ++in;
                }
                cov[k] = static_cast<double>(in) / kSub;
                break;
            }
            default:
                cov[k] = window.coverage(z, quad.hx[k], quad.hy[k], false);
                break;
        }
    }
    (void)spec;
    return cov;
}

}  // namespace betapot
