#include "cylscat/errors.hpp"
#include "cylscat/experiment.hpp"
#include "cylscat/layer_operators.hpp"
#include "cylscat/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace cylscat {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

// Power series, long double.
long double series_j0(long double x) {
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4.0L) / (static_cast<long double>(k) * k);
    sum += term;
  }
  return sum;
}

long double series_y0(long double x) {
  const long double gamma = 0.577215664901532860606512090082402431L;
  long double term = 1.0L, harmonic = 0.0L, tail = 0.0L;
  for (int k = 1; k < 60; ++k) {
    term *= -(x * x / 4.0L) / (static_cast<long double>(k) * k);
    harmonic += 1.0L / k;
    tail += term * harmonic;
  }
  const long double pi = 3.141592653589793238462643383279502884L;
  return (2.0L / pi) * ((std::log(x / 2.0L) + gamma) * series_j0(x) - tail);
}

struct Mode {
  cplx j, jp, h, hp;
};

Mode mode_values(int k, double x) {
  const int a = std::abs(k);
  const double sign = (k < 0 && (a % 2)) ? -1.0 : 1.0;
  auto J = [](int v, double z) { return std::cyl_bessel_j(static_cast<double>(v), z); };
  auto Y = [](int v, double z) { return std::cyl_neumann(static_cast<double>(v), z); };
  const double j = J(a, x), y = Y(a, x);
  const double jp = a == 0 ? -J(1, x) : 0.5 * (J(a - 1, x) - J(a + 1, x));
  const double yp = a == 0 ? -Y(1, x) : 0.5 * (Y(a - 1, x) - Y(a + 1, x));
  // J_{-k} H_{-k} = J_k H_k, so the sign cancels in every product used below.
  return {sign * j, sign * jp, sign * cplx(j, y), sign * cplx(jp, yp)};
}

// Worst relative eigenvalue error and relative off-diagonal leakage over
// modes |k| <= kmax of the six operators on the circle of radius `a`, both
// against max(|lambda|, 1e-3) since TS and TD vanish at k = 0.
std::pair<double, double> circle_operator_errors(int n, double kappa, double a) {
  const BoundaryCurve curve = curve_from_radial(RadialFunction::circle(a), n);
  const OperatorSet ops = assemble_operators(curve, kappa);
  const int kmax = std::min(n / 2, 16);
  double eig_err = 0.0, leak = 0.0;
  for (int k = -kmax; k <= kmax; ++k) {
    Eigen::VectorXcd v(curve.size());
    for (int j = 0; j < curve.size(); ++j) v[j] = std::exp(kI * (k * curve.t[j]));
    const Mode m = mode_values(k, kappa * a);
    const cplx s = kI * kPi * a / 2.0 * m.j * m.h;
    const cplx d = kI * kPi * kappa * a / 4.0 * (m.jp * m.h + m.j * m.hp);
    const cplx nd = kI * kPi * kappa * kappa * a / 2.0 * m.jp * m.hp;
    const cplx tk = kI * static_cast<double>(k) / a;
    const std::pair<const Eigen::MatrixXcd*, cplx> table[] = {
        {&ops.S, s}, {&ops.D, d}, {&ops.NS, d}, {&ops.ND, nd}, {&ops.TS, tk * s}, {&ops.TD, tk * d}};
    for (const auto& [mat, lambda] : table) {
      const Eigen::VectorXcd w = (*mat) * v;
      const cplx numeric = v.dot(w) / v.squaredNorm();
      const double scale = std::max(std::abs(lambda), 1e-3);
      eig_err = std::max(eig_err, std::abs(numeric - lambda) / scale);
      leak = std::max(leak, (w - numeric * v).norm() / (v.norm() * scale));
    }
  }
  return {eig_err, leak};
}

double frechet_fd_order(int n) {
  const PhysicalParams p = derive_params(1, 1, 2, 2, 2.5, kPi / 3, 0);
  const RadialFunction base = RadialFunction::peanut();
  const BoundaryCurve curve = curve_from_radial(base, n);
  const Eigen::VectorXd obs = equidistant_angles(32);
  Eigen::VectorXcd zeta(curve.size());
  for (int j = 0; j < curve.size(); ++j)
    zeta[j] = cplx(std::cos(curve.t[j]), 0.5 * std::sin(2.0 * curve.t[j])) + 1.0;
  const TrigPolynomial q({0.0, 1.0}, {0.0});
  Eigen::VectorXd qs(curve.size());
  for (int j = 0; j < curve.size(); ++j) qs[j] = q(curve.t[j]);
  const Eigen::VectorXcd lin = frechet_nodal(curve, p.kappa0, zeta, obs) * qs.cast<cplx>();
  const Eigen::VectorXcd f0 = assemble_farfield(curve, p.kappa0, obs).S_inf * zeta;
  double err[3];
  const double hs[3] = {1e-2, 1e-3, 1e-4};
  for (int i = 0; i < 3; ++i) {
    const double h = hs[i];
    RadialFunction moved{"moved", [&base, &q, h](double t) {
                           RadialSample s = base.eval(t);
                           return RadialSample{s.r + h * q(t), s.dr + h * q.eval(t, 1),
                                               s.ddr + h * q.eval(t, 2)};
                         }};
    const BoundaryCurve c = curve_from_radial(moved, n);
    const Eigen::VectorXcd f = assemble_farfield(c, p.kappa0, obs).S_inf * zeta;
    err[i] = (f - f0 - h * lin).norm();
  }
  return std::min(std::log10(err[0] / err[1]), std::log10(err[1] / err[2]));
}

}  // namespace

std::vector<CheckResult> run_validation(const ValidateOptions& options) {
  const int n = options.n;
  const bool coarse = n < 32;
  std::vector<CheckResult> out;
  auto add = [&](std::string name, double value, double tol, bool larger_is_better = false) {
    const bool ok = std::isfinite(value) && (larger_is_better ? value >= tol : value <= tol);
    out.push_back({std::move(name), value, tol, ok});
  };

  double wr = 0.0;
  for (double x : {0.1, 1.0, 10.0, 100.0}) {
    const double w = specfun::bessel_j(1, x) * specfun::bessel_y(0, x) -
                     specfun::bessel_j(0, x) * specfun::bessel_y(1, x);
    wr = std::max(wr, std::abs(w - 2.0 / (kPi * x)) / (2.0 / (kPi * x)));
  }
  add("wronskian", wr, 1e-10);
  add("j0_series", std::abs(specfun::bessel_j(0, 1.0) - static_cast<double>(series_j0(1.0L))),
      1e-12);
  add("y0_series", std::abs(specfun::bessel_y(0, 1.0) - static_cast<double>(series_y0(1.0L))),
      1e-12);

  for (double kappa : {1.0, 2.5}) {
    const auto [eig, leak] = circle_operator_errors(n, kappa, 1.0);
    const std::string tag = kappa == 1.0 ? "1" : "2.5";
    add("circle_eigen_kappa" + tag, eig, coarse ? 5e-2 : 1e-8);
    add("circle_leakage_kappa" + tag, leak, coarse ? 5e-2 : 1e-9);
  }

  {
    DirectOptions dopt;
    dopt.flip_jump_sign = options.flip_jump_sign;
    const PhysicalParams p = derive_params(1, 1, 2, 2, 2.5, kPi / 3, 0);
    const Eigen::VectorXd obs = equidistant_angles(64);
    double err = INFINITY;
    try {
      const FarFieldPattern num = simulate_farfield(RadialFunction::circle(1.0), n, p, obs, dopt);
      err = relative_l2(num, oracle_circle_farfield(1.0, p, obs));
    } catch (const SolverError&) {
    }
    add("direct_vs_circle_series", err, coarse ? 5e-2 : 1e-7);
  }

  add("frechet_fd_order", frechet_fd_order(std::max(n, 16)), 1.9, true);

  {
    const PhysicalParams p = derive_params(1, 1, 2, 2, 2.5, kPi / 2, 0.3);
    const FarFieldPattern f =
        simulate_farfield(RadialFunction::peanut(), n, p, equidistant_angles(64));
    add("decoupling_theta_pi_2", f.h_inf.norm() / f.e_inf.norm(), 1e-12);
  }

  {
    const PhysicalParams p = derive_params(1, 1, 2, 2, 2.5, kPi / 3, 0);
    const FarFieldPattern f =
        simulate_farfield(RadialFunction::peanut(), n, p, equidistant_angles(64));
    const FarFieldPattern g = add_noise(f, 0.05, 0.03, 7);
    const double de = std::abs((g.e_inf - f.e_inf).norm() / f.e_inf.norm() - 0.05);
    const double dh = std::abs((g.h_inf - f.h_inf).norm() / f.h_inf.norm() - 0.03);
    add("noise_normalization", std::max(de, dh), 1e-13);
  }
  return out;
}

}  // namespace cylscat
