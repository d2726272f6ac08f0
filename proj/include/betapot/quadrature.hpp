#pragma once

#include <vector>

#include "betapot/domain.hpp"
#include "betapot/numeric.hpp"

namespace betapot {

// quadrature nodes with log-space weights. Weights are normalized by the
// largest cell mass (so scaling tau by a power of two leaves log_w bitwise
// unchanged); log_scale holds the log of that largest mass and must be added
// back once per integrated coordinate.
struct QuadNodes {
    std::vector<cpx> z;
    std::vector<double> log_w;
    std::vector<double> hx, hy;  // cell extents; hy = 0 for line rules
    double log_scale = 0.0;
    DomainKind kind = DomainKind::intervals;

    std::size_t size() const { return z.size(); }
};

// midpoint rule straight from the grid cells (skips zero-mass cells)
QuadNodes grid_quadrature(const DomainGrid& grid);

// Gauss-Legendre panels over an interval union (smooth integrands only; the
// nodes carry no usable cell extents for window-coverage purposes)
QuadNodes gl_quadrature(const std::vector<std::pair<double, double>>& intervals, int order,
                        int panels_per_interval, double tau_scale);

// fraction of the quadrature cell at index k covered by the window; arc cells
// on a circle are subsampled along the arc
std::vector<double> window_coverage(const QuadNodes& quad, const Window& window,
                                    const DomainSpec& spec);

}  // namespace betapot
