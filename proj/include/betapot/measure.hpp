#pragma once

#include <cstddef>
#include <vector>

#include "betapot/numeric.hpp"

namespace betapot {

// discrete probability measure supported on grid nodes: parallel arrays of
// node indices and positive weights
struct DiscreteMeasure {
    std::vector<std::size_t> idx;
    std::vector<double> w;

    double total() const;
    void renormalize();
    void validate() const;  // throws: weights positive, indices unique
};

// W1 distance between two atomic measures supported on the real line.
// Both inputs are (position, weight) pairs; weights must each sum to ~1.
double wasserstein1_real(std::vector<std::pair<double, double>> a,
                         std::vector<std::pair<double, double>> b);

}  // namespace betapot
