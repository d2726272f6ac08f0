#ifndef BETAPOT_DOMAIN_HPP
#define BETAPOT_DOMAIN_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "betapot/field.hpp"
#include "betapot/numeric.hpp"

namespace betapot {

// Domain catalogue. Interval unions may have infinite endpoints; those are
// truncated at grid-build time using the superlogarithmic growth of the
// field (see truncation_radius_for). The circle carries normalized arc
// measure by default; every other kind carries Lebesgue (scaled by
// tau_scale).
enum class DomainKind { intervals, disc, annulus, rectangle, circle };

struct DomainSpec {
    DomainKind kind = DomainKind::intervals;
    std::vector<std::pair<double, double>> intervals;  // kind intervals
    double radius = 1.0;                               // disc, circle
    double r_inner = 0.0, r_outer = 1.0;               // annulus
    double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;   // rectangle
    int resolution = 0;   // cells per axis (2-d), total cells (intervals), nodes (circle)
    double tau_scale = 1.0;
    std::optional<double> truncation_override;  // manual cut for unbounded intervals

    void validate() const;
};

// layout bookkeeping for interval grids (used for O(1) cell lookup)
struct IntervalLayout {
    double a = 0.0, b = 0.0, h = 0.0;
    std::size_t first = 0, count = 0;
};

/// Discretized domain: cell-center nodes, per-cell tau mass, per-cell
/// desingularization scale (the local cell size), plus the originating spec
/// so that refined or coarsened copies can be rebuilt.
struct DomainGrid {
    DomainSpec spec;
    std::vector<cpx> nodes;
    std::vector<double> tau_mass;
    std::vector<double> cell_volume;  // Lebesgue measure of the cell (arc length on circles)
    std::vector<double> diag_desing;
    std::vector<IntervalLayout> layout;  // intervals kind only
    double truncation_radius = 0.0;
    bool unbounded = false;
    double cell_scale = 0.0;  // representative cell size

    bool real_line() const { return spec.kind == DomainKind::intervals; }
    bool on_circle() const { return spec.kind == DomainKind::circle; }
    bool two_dimensional() const {
        return spec.kind == DomainKind::disc || spec.kind == DomainKind::annulus ||
               spec.kind == DomainKind::rectangle;
    }

    double diameter() const;
    bool contains(cpx z) const;

    /// tau density at z from the nearest cell (piecewise constant)
    double tau_density(cpx z) const;

    void validate() const;
};

/// Builds the node set. `field` is required when an interval union is
/// unbounded (the truncation radius depends on the growth of R).
DomainGrid build_grid(const DomainSpec& spec, const FieldSpec* field = nullptr);

/// Smallest r such that R(r) - (1+b) log r has climbed `margin` above its
/// minimum; throws if the field never climbs that far (insufficient growth).
double truncation_radius_for(const FieldSpec& field, double margin = 10.0);

// Target window W for outlier probabilities.
struct Window {
    enum class Kind { intervals, disc, annulus };
    Kind kind = Kind::intervals;
    std::vector<std::pair<double, double>> intervals;
    cpx center{0.0, 0.0};
    double radius = 1.0;      // disc
    double r_inner = 0.0, r_outer = 1.0;  // annulus, centered at origin

    bool contains(cpx z) const;

    /// fraction of the axis-aligned cell centred at z covered by the window;
    /// exact for interval cells, 4x4 midpoint subsampling for plane cells
    double coverage(cpx z, double hx, double hy, bool one_dimensional) const;

    /// deterministic probe mesh inside W (used for rate-function minima)
    std::vector<cpx> probe_points(int per_axis) const;

    void validate() const;
};

/// node indices within `cells` grid cells of the index set `base`
std::vector<int> dilate_node_set(const DomainGrid& grid, const std::vector<int>& base,
                                 double cells);

}  // namespace betapot

#endif
