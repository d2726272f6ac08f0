#include "betapot/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betapot {

namespace {

bool finite_pair(const std::pair<double, double>& iv) {
    return std::isfinite(iv.first) && std::isfinite(iv.second);
}

// growth gauge g(r) = R(r) - (1+b) log r, with the conservative side choice
// for non-radial fields on the line
double growth_gauge(const FieldSpec& f, double r) {
    double rv;
    if (f.radial()) {
        rv = f.R(cpx(r, 0.0));
    } else {
        rv = std::min(f.R(cpx(r, 0.0)), f.R(cpx(-r, 0.0)));
    }
    return rv - (1.0 + f.superlog_margin_b) * std::log(r);
}

}  // namespace

void DomainSpec::validate() const {
    if (tau_scale <= 0.0 || !std::isfinite(tau_scale))
        throw std::invalid_argument("DomainSpec: tau_scale must be positive");
    switch (kind) {
        case DomainKind::intervals: {
            if (intervals.empty())
                throw std::invalid_argument("DomainSpec: interval union is empty");
            for (const auto& iv : intervals) {
                if (std::isnan(iv.first) || std::isnan(iv.second) || !(iv.first < iv.second))
                    throw std::invalid_argument("DomainSpec: malformed interval");
            }
            if (resolution < static_cast<int>(intervals.size()))
                throw std::invalid_argument("DomainSpec: too few cells for interval union");
            break;
        }
        case DomainKind::disc:
            if (!(radius > 0.0)) throw std::invalid_argument("DomainSpec: disc radius <= 0");
            if (resolution < 2) throw std::invalid_argument("DomainSpec: resolution < 2");
            break;
        case DomainKind::annulus:
            if (!(r_outer > r_inner) || r_inner < 0.0)
                throw std::invalid_argument("DomainSpec: bad annulus radii");
            if (resolution < 2) throw std::invalid_argument("DomainSpec: resolution < 2");
            break;
        case DomainKind::rectangle:
            if (!(x1 > x0) || !(y1 > y0))
                throw std::invalid_argument("DomainSpec: degenerate rectangle");
            if (resolution < 2) throw std::invalid_argument("DomainSpec: resolution < 2");
            break;
        case DomainKind::circle:
            if (!(radius > 0.0)) throw std::invalid_argument("DomainSpec: circle radius <= 0");
            if (resolution < 3) throw std::invalid_argument("DomainSpec: circle needs >= 3 nodes");
            break;
    }
}

double truncation_radius_for(const FieldSpec& field, double margin) {
    // locate the argmin of the gauge on a log grid, then the first radius at
    // which the gauge has climbed `margin` above it; refine with bisection
    const int kScan = 600;
    const double r_lo = 1e-3, r_hi = 1e9;
    double best = std::numeric_limits<double>::infinity();
    double r_best = r_lo;
    std::vector<double> rs(kScan), gs(kScan);
    for (int i = 0; i < kScan; ++i) {
        double t = static_cast<double>(i) / (kScan - 1);
        double r = r_lo * std::pow(r_hi / r_lo, t);
        rs[i] = r;
        gs[i] = growth_gauge(field, r);
        if (gs[i] < best) {
            best = gs[i];
            r_best = r;
        }
    }
    if (!std::isfinite(best))
        throw std::runtime_error("truncation: growth gauge not finite on scan range");
    const double target = best + margin;
    for (int i = 0; i < kScan; ++i) {
        if (rs[i] <= r_best) continue;
        if (gs[i] >= target) {
            // bisect between the previous scan point and this one
            double lo = rs[i - 1], hi = rs[i];
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                if (growth_gauge(field, mid) >= target) hi = mid;
                else lo = mid;
            }
            return hi;
        }
    }
    throw std::runtime_error(
        "truncation: field growth never exceeds the required margin; "
        "domain cannot be truncated safely");
}

DomainGrid build_grid(const DomainSpec& spec_in, const FieldSpec* field) {
    spec_in.validate();
    DomainGrid g;
    g.spec = spec_in;
    DomainSpec& spec = g.spec;

    switch (spec.kind) {
        case DomainKind::intervals: {
            // truncate unbounded unions first
            bool unb = false;
            for (const auto& iv : spec.intervals)
                if (!finite_pair(iv)) unb = true;
            if (unb) {
                double rt;
                if (spec.truncation_override) {
                    rt = *spec.truncation_override;
                } else {
                    if (!field)
                        throw std::invalid_argument(
                            "build_grid: unbounded interval union needs a field for truncation");
                    rt = truncation_radius_for(*field);
                }
                for (auto& iv : spec.intervals) {
                    if (!std::isfinite(iv.first)) iv.first = -rt;
                    if (!std::isfinite(iv.second)) iv.second = rt;
                    if (!(iv.first < iv.second))
                        throw std::runtime_error("build_grid: truncation produced empty interval");
                }
                g.unbounded = true;
                g.truncation_radius = rt;
            }
            double total = 0.0;
            for (const auto& iv : spec.intervals) total += iv.second - iv.first;
            std::size_t idx = 0;
            for (const auto& iv : spec.intervals) {
                double len = iv.second - iv.first;
                int cells = std::max(1, static_cast<int>(std::lround(spec.resolution * len / total)));
                double h = len / cells;
                IntervalLayout lay;
                lay.a = iv.first;
                lay.b = iv.second;
                lay.h = h;
                lay.first = idx;
                lay.count = static_cast<std::size_t>(cells);
                g.layout.push_back(lay);
                for (int k = 0; k < cells; ++k) {
                    g.nodes.emplace_back(iv.first + (k + 0.5) * h, 0.0);
                    g.cell_volume.push_back(h);
                    g.tau_mass.push_back(h * spec.tau_scale);
                    g.diag_desing.push_back(h);
                    ++idx;
                }
            }
            g.cell_scale = total / g.nodes.size();
            break;
        }
        case DomainKind::disc:
        case DomainKind::annulus:
        case DomainKind::rectangle: {
            double ax0, ax1, ay0, ay1;
            if (spec.kind == DomainKind::rectangle) {
                ax0 = spec.x0; ax1 = spec.x1; ay0 = spec.y0; ay1 = spec.y1;
            } else {
                double R = (spec.kind == DomainKind::disc) ? spec.radius : spec.r_outer;
                ax0 = -R; ax1 = R; ay0 = -R; ay1 = R;
            }
            int res = spec.resolution;
            double hx = (ax1 - ax0) / res, hy = (ay1 - ay0) / res;
            double dd = std::sqrt(hx * hy);
            for (int j = 0; j < res; ++j) {
                for (int i = 0; i < res; ++i) {
                    cpx c(ax0 + (i + 0.5) * hx, ay0 + (j + 0.5) * hy);
                    if (spec.kind == DomainKind::disc && std::abs(c) > spec.radius) continue;
                    if (spec.kind == DomainKind::annulus) {
                        double r = std::abs(c);
                        if (r < spec.r_inner || r > spec.r_outer) continue;
                    }
                    g.nodes.push_back(c);
                    g.cell_volume.push_back(hx * hy);
                    g.tau_mass.push_back(hx * hy * spec.tau_scale);
                    g.diag_desing.push_back(dd);
                }
            }
            g.cell_scale = dd;
            break;
        }
        case DomainKind::circle: {
            // normalized arc measure: unit total mass regardless of radius,
            // so partition values stay O(1) across node counts
            int N = spec.resolution;
            double arc = 2.0 * 3.14159265358979323846 * spec.radius / N;
            for (int k = 0; k < N; ++k) {
                double th = 2.0 * 3.14159265358979323846 * k / N;
                g.nodes.emplace_back(spec.radius * std::cos(th), spec.radius * std::sin(th));
                g.cell_volume.push_back(arc);
                g.tau_mass.push_back(spec.tau_scale / N);
                g.diag_desing.push_back(arc);
            }
            g.cell_scale = arc;
            break;
        }
    }
    g.validate();
    return g;
}

double DomainGrid::diameter() const {
    switch (spec.kind) {
        case DomainKind::intervals: {
            double lo = spec.intervals.front().first, hi = spec.intervals.front().second;
            for (const auto& iv : spec.intervals) {
                lo = std::min(lo, iv.first);
                hi = std::max(hi, iv.second);
            }
            return hi - lo;
        }
        case DomainKind::disc:
            return 2.0 * spec.radius;
        case DomainKind::annulus:
            return 2.0 * spec.r_outer;
        case DomainKind::rectangle:
            return std::hypot(spec.x1 - spec.x0, spec.y1 - spec.y0);
        case DomainKind::circle:
            return 2.0 * spec.radius;
    }
    return 0.0;
}

bool DomainGrid::contains(cpx z) const {
    switch (spec.kind) {
        case DomainKind::intervals: {
            if (z.imag() != 0.0) return false;
            double x = z.real();
            for (const auto& iv : spec.intervals)
                if (x >= iv.first && x <= iv.second) return true;
            return false;
        }
        case DomainKind::disc:
            return std::abs(z) <= spec.radius;
        case DomainKind::annulus: {
            double r = std::abs(z);
            return r >= spec.r_inner && r <= spec.r_outer;
        }
        case DomainKind::rectangle:
            return z.real() >= spec.x0 && z.real() <= spec.x1 && z.imag() >= spec.y0 &&
                   z.imag() <= spec.y1;
        case DomainKind::circle:
            return std::abs(std::abs(z) - spec.radius) <= 1e-9 * std::max(1.0, spec.radius);
    }
    return false;
}

double DomainGrid::tau_density(cpx z) const {
    if (spec.kind == DomainKind::intervals) {
        double x = z.real();
        for (const auto& lay : layout) {
            if (x < lay.a || x > lay.b) continue;
            auto k = static_cast<std::size_t>(
                std::min<double>(lay.count - 1.0, std::max(0.0, std::floor((x - lay.a) / lay.h))));
            std::size_t i = lay.first + k;
            return tau_mass[i] / cell_volume[i];
        }
        return 0.0;
    }
    // nearest node for the remaining kinds
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double d = std::norm(z - nodes[i]);
        if (d < best) {
            best = d;
            arg = i;
        }
    }
    return tau_mass[arg] / cell_volume[arg];
}

void DomainGrid::validate() const {
    const std::size_t n = nodes.size();
    if (n == 0) throw std::invalid_argument("DomainGrid: empty node set");
    if (tau_mass.size() != n || diag_desing.size() != n || cell_volume.size() != n)
        throw std::invalid_argument("DomainGrid: array sizes mismatch");
    std::size_t positive = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (tau_mass[i] < 0.0 || !std::isfinite(tau_mass[i]))
            throw std::invalid_argument("DomainGrid: tau_mass must be >= 0 and finite");
        if (tau_mass[i] > 0.0) ++positive;
        if (!(diag_desing[i] > 0.0))
            throw std::invalid_argument("DomainGrid: desingularization scales must be positive");
    }
    if (positive == 0) throw std::invalid_argument("DomainGrid: all cells carry zero mass");
    // node distinctness (lexicographic sort on coordinates)
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (nodes[a].real() != nodes[b].real()) return nodes[a].real() < nodes[b].real();
        return nodes[a].imag() < nodes[b].imag();
    });
    for (std::size_t i = 1; i < n; ++i)
        if (nodes[order[i]] == nodes[order[i - 1]])
            throw std::invalid_argument("DomainGrid: duplicate nodes");
}

void Window::validate() const {
    switch (kind) {
        case Kind::intervals:
            if (intervals.empty()) throw std::invalid_argument("Window: empty interval list");
            for (const auto& iv : intervals)
                if (!(iv.first < iv.second) || !std::isfinite(iv.first) || !std::isfinite(iv.second))
                    throw std::invalid_argument("Window: malformed interval");
            break;
        case Kind::disc:
            if (!(radius > 0.0)) throw std::invalid_argument("Window: disc radius <= 0");
            break;
        case Kind::annulus:
            if (!(r_outer > r_inner) || r_inner < 0.0)
                throw std::invalid_argument("Window: bad annulus radii");
            break;
    }
}

bool Window::contains(cpx z) const {
    switch (kind) {
        case Kind::intervals: {
            double x = z.real();
            for (const auto& iv : intervals)
                if (x >= iv.first && x <= iv.second) return true;
            return false;
        }
        case Kind::disc:
            return std::abs(z - center) <= radius;
        case Kind::annulus: {
            double r = std::abs(z);
            return r >= r_inner && r <= r_outer;
        }
    }
    return false;
}

double Window::coverage(cpx z, double hx, double hy, bool one_dimensional) const {
    if (one_dimensional) {
        if (kind != Kind::intervals) return contains(z) ? 1.0 : 0.0;
        double lo = z.real() - 0.5 * hx, hi = z.real() + 0.5 * hx;
        double covered = 0.0;
        for (const auto& iv : intervals) {
            double a = std::max(lo, iv.first), b = std::min(hi, iv.second);
            if (b > a) covered += b - a;
        }
        return covered / hx;
    }
    // plane cell: 4x4 midpoint subsample
    int in = 0;
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            cpx p(z.real() + ((i + 0.5) / 4.0 - 0.5) * hx,
                  z.imag() + ((j + 0.5) / 4.0 - 0.5) * hy);
            if (contains(p)) ++in;
        }
    return in / 16.0;
}

std::vector<cpx> Window::probe_points(int per_axis) const {
    std::vector<cpx> pts;
    const double pi = 3.14159265358979323846;
    // cell-centered sweeps so rounding never pushes a probe across the
    // window boundary
    switch (kind) {
        case Kind::intervals:
            for (const auto& iv : intervals)
                for (int i = 0; i < per_axis; ++i)
                    pts.emplace_back(
                        iv.first + (iv.second - iv.first) * (i + 0.5) / per_axis, 0.0);
            break;
        case Kind::disc:
            for (int i = 0; i < per_axis; ++i) {
                double r = radius * (i + 0.5) / per_axis;
                for (int j = 0; j < per_axis; ++j) {
                    double th = 2.0 * pi * j / per_axis;
                    pts.push_back(center + cpx(r * std::cos(th), r * std::sin(th)));
                }
            }
            pts.push_back(center);
            break;
        case Kind::annulus:
            for (int i = 0; i < per_axis; ++i) {
                double r = r_inner + (r_outer - r_inner) * (i + 0.5) / per_axis;
                for (int j = 0; j < per_axis; ++j) {
                    double th = 2.0 * pi * j / per_axis;
                    pts.emplace_back(r * std::cos(th), r * std::sin(th));
                }
            }
            break;
    }
    return pts;
}

std::vector<int> dilate_node_set(const DomainGrid& grid, const std::vector<int>& base,
                                 double cells) {
    const double reach = cells * grid.cell_scale;
    const double reach2 = reach * reach;
    std::vector<int> out;
    std::vector<char> mark(grid.nodes.size(), 0);
    for (int i : base) mark[static_cast<std::size_t>(i)] = 1;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) {
        if (mark[i]) {
            out.push_back(static_cast<int>(i));
            continue;
        }
        for (int b : base) {
            if (std::norm(grid.nodes[i] - grid.nodes[static_cast<std::size_t>(b)]) <= reach2) {
                out.push_back(static_cast<int>(i));
                break;
            }
        }
    }
    return out;
}

}  // namespace betapot
