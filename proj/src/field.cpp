#include "betapot/field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace betapot {

namespace {

double horner(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
    return v;
}

// derivative sum_k k c_k x^(k-1)
double horner_deriv(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) v = v * x + static_cast<double>(k) * c[k];
    return v;
}

double lerp_table(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    // clamp outside the tabulated range; truncated grids stay inside anyway
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    std::size_t lo = hi - 1;
    double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
    return ys[lo] + t * (ys[hi] - ys[lo]);
}

}  // namespace

double FieldSpec::Q(cpx z) const {
    switch (q.kind) {
        case QKind::real_poly:
            return horner(q.coeffs, z.real());
        case QKind::radial_poly:
            return horner(q.coeffs, std::abs(z));
        case QKind::tabulated1d:
            return lerp_table(q.abscissae, q.values,
                              q.radial_abscissa ? std::abs(z) : z.real());
        case QKind::tabulated_nodes: {
            // nearest-node lookup; adequate for evaluation on (or near) the
            // node set the tabulation came from
            double best = std::numeric_limits<double>::infinity();
            std::size_t arg = 0;
            for (std::size_t i = 0; i < q.nodes.size(); ++i) {
                double d = std::norm(z - q.nodes[i]);
                if (d < best) {
                    best = d;
                    arg = i;
                }
            }
            return q.values[arg];
        }
    }
    return 0.0;
}

bool FieldSpec::radial() const {
    if (q.kind == QKind::radial_poly) return true;
    if (q.kind == QKind::tabulated1d && q.radial_abscissa) return true;
    return false;
}

double FieldSpec::radial_R_derivative(double r) const {
    if (!radial()) throw std::invalid_argument("radial_R_derivative: field is not radial");
    if (q.kind == QKind::radial_poly) return (2.0 / beta) * horner_deriv(q.coeffs, r);
    // tabulated: symmetric difference with a scale-aware step
    double h = std::max(1e-6, 1e-6 * r);
    double lo = std::max(q.abscissae.front(), r - h);
    double hi = std::min(q.abscissae.back(), r + h);
    if (!(hi > lo)) throw std::runtime_error("radial_R_derivative: degenerate tabulation range");
    return (R(cpx(hi, 0.0)) - R(cpx(lo, 0.0))) / (hi - lo);
}

FieldSpec FieldSpec::scaled(double c) const {
    FieldSpec f = *this;
    switch (q.kind) {
        case QKind::real_poly:
        case QKind::radial_poly:
            for (double& v : f.q.coeffs) v *= c;
            break;
        case QKind::tabulated1d:
        case QKind::tabulated_nodes:
            for (double& v : f.q.values) v *= c;
            break;
    }
    return f;
}

void FieldSpec::validate() const {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw std::invalid_argument("FieldSpec: beta must be positive and finite");
    if (!(superlog_margin_b > 0.0))
        throw std::invalid_argument("FieldSpec: superlog margin b must be positive");
    switch (q.kind) {
        case QKind::real_poly:
        case QKind::radial_poly:
            if (q.coeffs.empty())
                throw std::invalid_argument("FieldSpec: polynomial potential needs coefficients");
            for (double c : q.coeffs)
                if (!std::isfinite(c)) throw std::invalid_argument("FieldSpec: non-finite coefficient");
            break;
        case QKind::tabulated1d:
            if (q.abscissae.size() < 2 || q.abscissae.size() != q.values.size())
                throw std::invalid_argument("FieldSpec: tabulation needs >=2 matching samples");
            for (std::size_t i = 1; i < q.abscissae.size(); ++i)
                if (!(q.abscissae[i] > q.abscissae[i - 1]))
                    throw std::invalid_argument("FieldSpec: tabulation abscissae must increase");
            break;
        case QKind::tabulated_nodes:
            if (q.nodes.empty() || q.nodes.size() != q.values.size())
                throw std::invalid_argument("FieldSpec: node tabulation sizes mismatch");
            break;
    }
}

std::string FieldSpec::tag() const {
    std::ostringstream os;
    os << "beta=" << beta << ";";
    switch (q.kind) {
        case QKind::real_poly:
            os << "poly[";
            break;
        case QKind::radial_poly:
            os << "radial[";
            break;
        case QKind::tabulated1d:
            os << "tab1d[n=" << q.values.size() << "]";
            return os.str();
        case QKind::tabulated_nodes:
            os << "tabnodes[n=" << q.values.size() << "]";
            return os.str();
    }
    for (std::size_t k = 0; k < q.coeffs.size(); ++k)
        os << (k ? "," : "") << q.coeffs[k];
    os << "]";
    return os.str();
}

FieldSpec make_real_poly_field(double beta, std::vector<double> coeffs, double b) {
    FieldSpec f;
    f.beta = beta;
    f.q.kind = QKind::real_poly;
    f.q.coeffs = std::move(coeffs);
    f.superlog_margin_b = b;
    f.validate();
    return f;
}

FieldSpec make_radial_poly_field(double beta, std::vector<double> coeffs, double b) {
    FieldSpec f;
    f.beta = beta;
    f.q.kind = QKind::radial_poly;
    f.q.coeffs = std::move(coeffs);
    f.superlog_margin_b = b;
    f.validate();
    return f;
}

FieldSpec make_tabulated1d_field(double beta, std::vector<double> abscissae,
                                 std::vector<double> values, bool radial, double b) {
    FieldSpec f;
    f.beta = beta;
    f.q.kind = QKind::tabulated1d;
    f.q.abscissae = std::move(abscissae);
    f.q.values = std::move(values);
    f.q.radial_abscissa = radial;
    f.superlog_margin_b = b;
    f.validate();
    return f;
}

FieldSpec make_tabulated_nodes_field(double beta, std::vector<cpx> nodes,
                                     std::vector<double> values, double b) {
    FieldSpec f;
    f.beta = beta;
    f.q.kind = QKind::tabulated_nodes;
    f.q.nodes = std::move(nodes);
    f.q.values = std::move(values);
    f.superlog_margin_b = b;
    f.validate();
    return f;
}

}  // namespace betapot
