#include "cylscat/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace cylscat::specfun {

namespace {

void check_order(int order) {
  if (order != 0 && order != 1) {
    throw std::domain_error("bessel: only orders 0 and 1 are supported, got " +
                            std::to_string(order));
  }
}

detail::BesselValues evaluate(double x) {
  return x < kAsymptoticSwitch ? detail::series_branch(x)
                               : detail::asymptotic_branch(x);
}

}  // namespace

namespace detail {

BesselValues series_branch(double x) {
  using std::numbers::pi;
  if (x <= 0.0) throw std::domain_error("series_branch: x must be positive");

  // Start index: even, comfortably above x so that J_start is negligible.
  int start = static_cast<int>(x + 30.0 + 2.0 * std::sqrt(40.0 * x));
  start += start % 2;

  // j[k] holds the unnormalized J_k from the downward recurrence.
  std::vector<double> j(static_cast<std::size_t>(start) + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1e-300;
  double norm = 0.0;
  for (int k = start; k >= 1; --k) {
    j[k - 1] = 2.0 * k / x * j[k] - j[k + 1];
    if (std::abs(j[k - 1]) > 1e250) {
      for (int i = k - 1; i <= start + 1; ++i) j[i] *= 1e-250;
      norm *= 1e-250;
    }
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j[k - 1];
  }
  norm += j[0];
  for (double& v : j) v /= norm;

  // Neumann series:
  //   Y0 = (2/pi)(ln(x/2)+gamma) J0 - (4/pi) sum_{k>=1} (-1)^k J_{2k}/k
  //   Y1 = -Y0' with J_{2k}' = (J_{2k-1} - J_{2k+1})/2.
  const double log_term = std::log(0.5 * x) + kEulerGamma;
  double sum_y0 = 0.0;
  double sum_y1 = 0.0;
  for (int k = 1; 2 * k + 1 <= start + 1; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    sum_y0 += sign * j[2 * k] / k;
    sum_y1 += sign * (j[2 * k - 1] - j[2 * k + 1]) / k;
  }
  BesselValues out{};
  out.j0 = j[0];
  out.j1 = j[1];
  out.y0 = (2.0 / pi) * log_term * out.j0 - (4.0 / pi) * sum_y0;
  out.y1 = -(2.0 / pi) * out.j0 / x + (2.0 / pi) * log_term * out.j1 +
           (2.0 / pi) * sum_y1;
  return out;
}

BesselValues asymptotic_branch(double x) {
  using std::numbers::pi;
  if (x <= 0.0) throw std::domain_error("asymptotic_branch: x must be positive");

  // P_nu, Q_nu series with a_k(nu) = prod_{i=1..k} (4nu^2 - (2i-1)^2) / (k! 8^k),
  // truncated at the smallest term.
  auto pq = [x](double nu, double& p, double& q) {
    const double mu = 4.0 * nu * nu;
    p = 1.0;
    q = 0.0;
    double term = 1.0;
    double last = 1e300;
    for (int k = 1; k < 200; ++k) {
      term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (k * 8.0 * x);
      const double mag = std::abs(term);
      if (mag >= last) break;
      last = mag;
      // k odd contributes to Q with sign (-1)^((k-1)/2); k even to P with (-1)^(k/2).
      if (k % 2 == 1) {
        q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
      } else {
        p += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
      }
      if (mag < 1e-17) break;
    }
  };

  const double amp = std::sqrt(2.0 / (pi * x));
  BesselValues out{};
  double p = 0.0;
  double q = 0.0;
  pq(0.0, p, q);
  // Phase x - pi/4 computed with cos/sin of x kept separate for large x.
  const double c = std::cos(x);
  const double s = std::sin(x);
  const double r = std::numbers::sqrt2 / 2.0;
  const double cos0 = r * (c + s);  // cos(x - pi/4)
  const double sin0 = r * (s - c);  // sin(x - pi/4)
  out.j0 = amp * (p * cos0 - q * sin0);
  out.y0 = amp * (p * sin0 + q * cos0);
  pq(1.0, p, q);
  const double cos1 = sin0;   // cos(x - 3pi/4)
  const double sin1 = -cos0;  // sin(x - 3pi/4)
  out.j1 = amp * (p * cos1 - q * sin1);
  out.y1 = amp * (p * sin1 + q * cos1);
  return out;
}

}  // namespace detail

double bessel_j(int order, double x) {
  check_order(order);
  if (!(x >= 0.0)) throw std::domain_error("bessel_j: x must be >= 0");
  if (x == 0.0) return order == 0 ? 1.0 : 0.0;
  if (x < 1e-4) {
    // Two-term power series is exact to round-off here.
    const double h = 0.25 * x * x;
    return order == 0 ? 1.0 - h : 0.5 * x * (1.0 - 0.5 * h);
  }
  const auto v = evaluate(x);
  return order == 0 ? v.j0 : v.j1;
}

double bessel_y(int order, double x) {
  check_order(order);
  if (!(x > 0.0)) throw std::domain_error("bessel_y: x must be > 0");
  const auto v = evaluate(x);
  return order == 0 ? v.y0 : v.y1;
}

std::complex<double> hankel1(int order, double x) {
  check_order(order);
  if (!(x > 0.0)) throw std::domain_error("hankel1: x must be > 0");
  const auto v = evaluate(x);
  return order == 0 ? std::complex<double>(v.j0, v.y0)
                    : std::complex<double>(v.j1, v.y1);
}

HankelPair hankel01(double x) {
  if (!(x > 0.0)) throw std::domain_error("hankel01: x must be > 0");
  const auto v = evaluate(x);
  return {{v.j0, v.y0}, {v.j1, v.y1}};
}

}  // namespace cylscat::specfun
