#include "betapot/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace betapot {

double DiscreteMeasure::total() const {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

void DiscreteMeasure::renormalize() {
    double s = total();
    if (!(s > 0.0)) throw std::runtime_error("DiscreteMeasure: zero total mass");
    for (double& x : w) x /= s;
}

void DiscreteMeasure::validate() const {
    if (idx.size() != w.size())
        throw std::invalid_argument("DiscreteMeasure: index/weight size mismatch");
    if (idx.empty()) throw std::invalid_argument("DiscreteMeasure: empty support");
    std::unordered_set<std::size_t> seen;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (!(w[i] > 0.0) || !std::isfinite(w[i]))
            throw std::invalid_argument("DiscreteMeasure: weights must be positive finite");
        if (!seen.insert(idx[i]).second)
            throw std::invalid_argument("DiscreteMeasure: duplicate support index");
    }
}

double wasserstein1_real(std::vector<std::pair<double, double>> a,
                         std::vector<std::pair<double, double>> b) {
    auto norm = [](std::vector<std::pair<double, double>>& v) {
        double s = 0.0;
        for (auto& p : v) s += p.second;
        if (!(s > 0.0)) throw std::invalid_argument("wasserstein1_real: zero-mass input");
        for (auto& p : v) p.second /= s;
        std::sort(v.begin(), v.end());
    };
    norm(a);
    norm(b);
    // merge events; integrate |F_a - F_b| between consecutive positions
    double dist = 0.0, Fa = 0.0, Fb = 0.0;
    std::size_t i = 0, j = 0;
    double x = std::min(a.front().first, b.front().first);
    while (i < a.size() || j < b.size()) {
        double xn;
        if (i < a.size() && (j >= b.size() || a[i].first <= b[j].first)) xn = a[i].first;
        else xn = b[j].first;
        dist += std::abs(Fa - Fb) * (xn - x);
        while (i < a.size() && a[i].first == xn) Fa += a[i++].second;
        while (j < b.size() && b[j].first == xn) Fb += b[j++].second;
        x = xn;
    }
    return dist;
}

}  // namespace betapot
