#pragma once

// Closed-form reference values used by the unit and acceptance suites. Every
// constant here is derived by hand, independently of the library code paths
// it checks; the derivations are sketched next to each value.

#include <cmath>

namespace oracle {

// --- radial case: R(z) = |z|^2 at inverse temperature 2 on a disc ---------
// The minimizer of -iint log|z-t| dnu dnu + 2 int R dnu is uniform (density
// 2/pi) on the concentric disc of radius T0, where T0 solves T0 R'(T0) = 1,
// i.e. 2 T0^2 = 1.
inline constexpr double kDiscT0 = 0.7071067811865476;  // 1/sqrt(2)

// Far-field constant rho = R(T0) - log T0 = 1/2 + (1/2) log 2.
inline constexpr double kDiscRho = 0.8465735902799727;

// Outside the support the log-potential of the uniform disc is log|z|, so
// the decay exponent of a window at radius r >= T0 is
//   J(r) = beta * (R(r) - log r - rho) = 2 (r^2 - log r - rho).
inline double disc_rate(double r) { return 2.0 * (r * r - std::log(r) - kDiscRho); }
inline constexpr double kDiscRateAt1 = 0.30685281944005464;     // J(1.0)
inline constexpr double kDiscRateAt095 = 0.21443940821515567;   // J(0.95) = inf over [0.95,1.05]

// --- real quadratic case: R(x) = x^2/2 at inverse temperature 2 -----------
// Equilibrium measure is the semicircle on [-sqrt2, sqrt2]; its potential is
// x^2/2 - 1/2 - (1/2) log 2 on the support, so rho = 1/2 + (1/2) log 2 again.
inline constexpr double kQuadSupportRadius = 1.4142135623730951;
inline constexpr double kQuadRho = 0.8465735902799727;
// Ratios of consecutive partition integrals decay like exp(-n beta rho):
inline constexpr double kQuadLogHnPerN = -1.6931471805599454;  // -beta * rho

// --- two-coordinate partition integrals on [0,1] with no field ------------
//   int_0^1 int_0^1 (x-y)^2 dx dy = 1/6         (beta = 2)
//   int_0^1 int_0^1 |x-y|   dx dy = 1/3         (beta = 1)
inline const double kLogZ2Beta2Unit = std::log(1.0 / 6.0);
inline const double kLogZ2Beta1Unit = std::log(1.0 / 3.0);

// --- free circle case: no field, normalized arc measure --------------------
// The n-coordinate integral of prod |z_i - z_j|^2 over the n-torus with
// normalized arc measure equals n!; at n = 32 the squared-size normalization
// log(32!)/32^2 = 0.0796... stays inside the +-0.1 acceptance band around 0.
inline double circle_log_zn(int n) { return std::lgamma(n + 1.0); }

// --- weighted polynomial basics -------------------------------------------
// Degree-0 normalized basis function for Lebesgue measure on [-1,1] is the
// constant 1/sqrt(2), so the degree-0 sup constant is 1/sqrt(2).
inline constexpr double kM0Lebesgue = 0.7071067811865476;

}  // namespace oracle
