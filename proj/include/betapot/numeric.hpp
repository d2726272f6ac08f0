#ifndef BETAPOT_NUMERIC_HPP
#define BETAPOT_NUMERIC_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <vector>

namespace betapot {

using cpx = std::complex<double>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log|a-b| via squared norm; avoids hypot in hot loops. Underflows to -inf
// for gaps below ~1e-154, which coincides with the "coincident points"
// convention (density vanishes).
inline double log_gap(cpx a, cpx b) {
    return 0.5 * std::log(std::norm(a - b));
}

/// Deterministic RNG used everywhere in the project. All draws are derived
/// from raw mt19937_64 output so that streams are reproducible across
/// platforms and standard-library versions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ull) {
        // splitmix64 warm-up to decorrelate small seeds
        for (int i = 0; i < 4; ++i) next();
    }

    std::uint64_t next() {
        // xorshift* variant; period 2^64-1, plenty for desk-scale chains
        s_ ^= s_ >> 12;
        s_ ^= s_ << 25;
        s_ ^= s_ >> 27;
        return s_ * 0x2545f4914f6cdd1dull;
    }

    /// uniform double in [0,1)
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// uniform double in (0,1]
    double uniform_pos() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    /// standard normal (Box-Muller, cached spare)
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = uniform_pos();
        double v = uniform();
        double r = std::sqrt(-2.0 * std::log(u));
        double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// unbiased index in [0,n)
    std::size_t index(std::size_t n) {
        if (n <= 1) return 0;
        std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
        std::uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return static_cast<std::size_t>(x % n);
    }

  private:
    std::uint64_t s_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Streaming log-sum-exp: accumulates log(sum_i exp(t_i)) without storing
/// terms. Adding -inf is a no-op; an empty accumulator reports -inf.
class LogAccumulator {
  public:
    void add(double t) {
        if (t == kNegInf) return;
        if (t <= max_) {
            sum_ += std::exp(t - max_);
        } else {
            if (max_ != kNegInf) sum_ = sum_ * std::exp(max_ - t) + 1.0;
            else sum_ = 1.0;
            max_ = t;
        }
        ++count_;
    }
    double value() const {
        if (count_ == 0 || sum_ <= 0.0) return kNegInf;
        return max_ + std::log(sum_);
    }
    long count() const { return count_; }

  private:
    double max_ = kNegInf;
    double sum_ = 0.0;
    long count_ = 0;
};

double logsumexp(const std::vector<double>& terms);

/// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w);

struct LinFit {
    double intercept = 0.0;
    double slope = 0.0;
    double se_slope = 0.0;  // inflated by sqrt(max(1, chi2/dof))
    double r2 = 0.0;
    double chi2 = 0.0;
    int points = 0;
};

/// Weighted least squares y = a + b x with per-point variances. Zero or
/// non-finite variances fall back to unit weights for all points.
LinFit weighted_linear_fit(const std::vector<double>& x, const std::vector<double>& y,
                           const std::vector<double>& var);

/// mean and standard error of a batch-mean vector
struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};
MeanSe batch_mean_se(const std::vector<double>& batch_means);

}  // namespace betapot

#endif
