#include "betapot/numeric.hpp"

#include <algorithm>
#include <stdexcept>

namespace betapot {

double logsumexp(const std::vector<double>& terms) {
    LogAccumulator acc;
    for (double t : terms) acc.add(t);
    return acc.value();
}

void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
    if (order < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    x.assign(order, 0.0);
    w.assign(order, 0.0);
    const double pi = 3.14159265358979323846264338327950288;
    int m = (order + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Tricomi initial guess, then Newton on P_n via the three-term recurrence
        double z = std::cos(pi * (i + 0.75) / (order + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = order * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[order - 1 - i] = w[i];
    }
}

LinFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& var) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n || var.size() != n)
        throw std::invalid_argument("weighted_linear_fit: need >= 2 points, matching sizes");

    bool unit = false;
    for (double v : var)
        if (!(v > 0.0) || !std::isfinite(v)) unit = true;

    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double wi = unit ? 1.0 : 1.0 / var[i];
        S += wi;
        Sx += wi * x[i];
        Sy += wi * y[i];
        Sxx += wi * x[i] * x[i];
        Sxy += wi * x[i] * y[i];
    }
    double det = S * Sxx - Sx * Sx;
    if (!(std::abs(det) > 0.0))
        throw std::runtime_error("weighted_linear_fit: degenerate abscissae");

    LinFit f;
    f.points = static_cast<int>(n);
    f.slope = (S * Sxy - Sx * Sy) / det;
    f.intercept = (Sxx * Sy - Sx * Sxy) / det;

    double chi2 = 0.0, ybar = Sy / S, tss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double wi = unit ? 1.0 : 1.0 / var[i];
        double r = y[i] - (f.intercept + f.slope * x[i]);
        chi2 += wi * r * r;
        tss += wi * (y[i] - ybar) * (y[i] - ybar);
    }
    f.chi2 = chi2;
    f.r2 = tss > 0.0 ? 1.0 - chi2 / tss : 1.0;
    double var_slope = S / det;
    double dof = static_cast<double>(n) - 2.0;
    double inflate = (dof > 0.0) ? std::max(1.0, chi2 / dof) : 1.0;
    f.se_slope = std::sqrt(var_slope * inflate);
    return f;
}

MeanSe batch_mean_se(const std::vector<double>& batch_means) {
    MeanSe r;
    const std::size_t b = batch_means.size();
    if (b == 0) return r;
    double s = 0.0;
    for (double v : batch_means) s += v;
    r.mean = s / static_cast<double>(b);
    if (b < 2) return r;
    double q = 0.0;
    for (double v : batch_means) q += (v - r.mean) * (v - r.mean);
    r.se = std::sqrt(q / (static_cast<double>(b) * (static_cast<double>(b) - 1.0)));
    return r;
}

}  // namespace betapot
