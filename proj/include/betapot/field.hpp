#ifndef BETAPOT_FIELD_HPP
#define BETAPOT_FIELD_HPP

#include <string>
#include <vector>

#include "betapot/numeric.hpp"

namespace betapot {

// External potential Q. Supported forms:
//   real_poly    Q(x) = sum_k c_k x^k, evaluated on Re(z) (real-line domains)
//   radial_poly  Q(z) = sum_k c_k |z|^k
//   tabulated1d  values on a sorted abscissa grid, piecewise linear; the
//                abscissa is |z| when radial_abscissa is set, else Re(z)
//   tabulated_nodes  values at scattered plane nodes, nearest-node lookup;
//                meant for diagnostics on the node set it was built from
enum class QKind { real_poly, radial_poly, tabulated1d, tabulated_nodes };

struct QForm {
    QKind kind = QKind::real_poly;
    std::vector<double> coeffs;        // polynomial forms
    std::vector<double> abscissae;     // tabulated1d
    std::vector<double> values;        // tabulated forms
    bool radial_abscissa = false;      // tabulated1d
    std::vector<cpx> nodes;            // tabulated_nodes
};

/// Confining field: inverse temperature beta plus the potential Q. The
/// weight exponent entering all equilibrium quantities is R = (2/beta) Q.
struct FieldSpec {
    double beta = 2.0;
    QForm q;
    double superlog_margin_b = 1.0;  // b in the growth check R - (1+b) log|z|

    double Q(cpx z) const;
    double R(cpx z) const { return (2.0 / beta) * Q(z); }

    bool radial() const;

    /// dR/dr for radial fields; analytic for polynomials, central
    /// differences for radial tabulations.
    double radial_R_derivative(double r) const;

    /// same field with Q multiplied by c (used by partition-ratio ladders)
    FieldSpec scaled(double c) const;

    void validate() const;
    std::string tag() const;
};

FieldSpec make_real_poly_field(double beta, std::vector<double> coeffs, double b = 1.0);
FieldSpec make_radial_poly_field(double beta, std::vector<double> coeffs, double b = 1.0);
FieldSpec make_tabulated1d_field(double beta, std::vector<double> abscissae,
                                 std::vector<double> values, bool radial, double b = 1.0);
FieldSpec make_tabulated_nodes_field(double beta, std::vector<cpx> nodes,
                                     std::vector<double> values, double b = 1.0);

}  // namespace betapot

#endif
