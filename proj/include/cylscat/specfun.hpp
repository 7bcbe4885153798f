#pragma once

#include <complex>

namespace cylscat::specfun {

// Euler-Mascheroni constant.
inline constexpr double kEulerGamma = 0.57721566490153286060651209;

// Arguments below this use the Neumann-series / Miller-recurrence branch,
// at or above it the Hankel asymptotic expansion.
inline constexpr double kAsymptoticSwitch = 25.0;

/// Bessel function of the first kind J_order(x), order in {0, 1}, x >= 0.
/// Throws std::domain_error for negative x or an unsupported order.
double bessel_j(int order, double x);

/// Bessel function of the second kind Y_order(x), order in {0, 1}, x > 0.
double bessel_y(int order, double x);

/// Hankel function of the first kind H^(1)_order(x) = J + iY, x > 0.
std::complex<double> hankel1(int order, double x);

/// H^(1)_0 and H^(1)_1 at the same argument; kernels need both.
struct HankelPair {
  std::complex<double> h0;
  std::complex<double> h1;
};
HankelPair hankel01(double x);

namespace detail {

struct BesselValues {
  double j0, j1, y0, y1;
};

// Miller backward recurrence for J_0, J_1 with the Neumann series for
// Y_0, Y_1. Accurate for every x > 0; cost grows linearly in x.
BesselValues series_branch(double x);

// Hankel asymptotic expansion, used for x >= kAsymptoticSwitch.
BesselValues asymptotic_branch(double x);

}  // namespace detail

}  // namespace cylscat::specfun
