#include "cylscat/layer_operators.hpp"

#include "cylscat/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cylscat {

using std::numbers::pi;
using specfun::kEulerGamma;

namespace {

constexpr cplx kI{0.0, 1.0};

void validate(const BoundaryCurve& curve, double kappa) {
  if (curve.n < 2 || curve.jac.size() != 2 * curve.n)
    throw std::invalid_argument("layer operators: invalid curve");
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("layer operators: wavenumber must be positive");
}

// Log-split kernel K(t,s) = K1 ln(4 sin^2((t-s)/2)) + K2 for S, D and NS,
// evaluated in one pass. Entries are R_ij K1_ij + (pi/n) K2_ij.
struct WeaklySingular {
  Eigen::MatrixXcd S, D, NS;
};

WeaklySingular assemble_weakly_singular(const BoundaryCurve& c, double kappa) {
  validate(c, kappa);
  const int N = c.size();
  const double w = c.weight();
  const Eigen::MatrixXd R = log_quadrature_matrix(c.n);
  WeaklySingular out{Eigen::MatrixXcd(N, N), Eigen::MatrixXcd(N, N), Eigen::MatrixXcd(N, N)};

  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i == j) {
        const double jac = c.jac[i];
        const cplx s1 = -jac / (4.0 * pi);
        const cplx s2 = jac * (kI / 4.0 - kEulerGamma / (2.0 * pi) -
                               std::log(0.5 * kappa * jac) / (2.0 * pi));
        out.S(i, i) = R(i, i) * s1 + w * s2;
        const double curv = (c.dy[i] * c.ddx[i] - c.dx[i] * c.ddy[i]) / (4.0 * pi * jac * jac);
        out.D(i, i) = w * curv;
        out.NS(i, i) = w * curv;
        continue;
      }
      const double ex = c.x[i] - c.x[j];
      const double ey = c.y[i] - c.y[j];
      const double dist = std::hypot(ex, ey);
      const auto h = specfun::hankel01(kappa * dist);
      const double logterm = std::log(4.0 * std::pow(std::sin(0.5 * (c.t[i] - c.t[j])), 2));
      const double jac_j = c.jac[j];

      const cplx ks = kI / 4.0 * h.h0 * jac_j;
      const double ks1 = -h.h0.real() * jac_j / (4.0 * pi);
      out.S(i, j) = R(i, j) * ks1 + w * (ks - ks1 * logterm);

      // (x - y) . nu(y), nu = (z2', -z1') = |z'| n(y)
      const double dot_y = ex * c.dy[j] - ey * c.dx[j];
      const cplx kd = kI * kappa / 4.0 * h.h1 * dot_y / dist;
      const double kd1 = -kappa / (4.0 * pi) * h.h1.real() * dot_y / dist;
      out.D(i, j) = R(i, j) * kd1 + w * (kd - kd1 * logterm);

      const double dot_x = ex * c.nx[i] + ey * c.ny[i];
      const cplx kn = -kI * kappa / 4.0 * h.h1 * dot_x / dist * jac_j;
      const double kn1 = kappa / (4.0 * pi) * h.h1.real() * dot_x / dist * jac_j;
      out.NS(i, j) = R(i, j) * kn1 + w * (kn - kn1 * logterm);
    }
  }
  return out;
}

Eigen::MatrixXcd maue_nd(const BoundaryCurve& c, double kappa, const Eigen::MatrixXcd& S,
                         const Eigen::MatrixXd& Dt) {
  const Eigen::MatrixXcd tangential = Dt * S * Dt;
  const Eigen::MatrixXcd normal =
      c.nx.asDiagonal() * S * c.nx.asDiagonal() + c.ny.asDiagonal() * S * c.ny.asDiagonal();
  return tangential + kappa * kappa * normal;
}

}  // namespace

Eigen::MatrixXd tangential_derivative_matrix(const BoundaryCurve& curve) {
  return curve.jac.cwiseInverse().asDiagonal() * trig_diff_matrix(curve.n);
}

Eigen::MatrixXcd assemble_S(const BoundaryCurve& curve, double kappa) {
  return assemble_weakly_singular(curve, kappa).S;
}

Eigen::MatrixXcd assemble_D(const BoundaryCurve& curve, double kappa) {
  return assemble_weakly_singular(curve, kappa).D;
}

Eigen::MatrixXcd assemble_NS(const BoundaryCurve& curve, double kappa) {
  return assemble_weakly_singular(curve, kappa).NS;
}

Eigen::MatrixXcd assemble_TS(const BoundaryCurve& curve, double kappa) {
  return tangential_derivative_matrix(curve) * assemble_S(curve, kappa);
}

Eigen::MatrixXcd assemble_TD(const BoundaryCurve& curve, double kappa) {
  return tangential_derivative_matrix(curve) * assemble_D(curve, kappa);
}

Eigen::MatrixXcd assemble_ND(const BoundaryCurve& curve, double kappa) {
  return maue_nd(curve, kappa, assemble_S(curve, kappa), tangential_derivative_matrix(curve));
}

OperatorSet assemble_operators(const BoundaryCurve& curve, double kappa) {
  auto ws = assemble_weakly_singular(curve, kappa);
  const Eigen::MatrixXd Dt = tangential_derivative_matrix(curve);
  OperatorSet ops;
  ops.kappa = kappa;
  ops.TS = Dt * ws.S;
  ops.TD = Dt * ws.D;
  ops.ND = maue_nd(curve, kappa, ws.S, Dt);
  ops.S = std::move(ws.S);
  ops.D = std::move(ws.D);
  ops.NS = std::move(ws.NS);
  return ops;
}

cplx farfield_constant(double kappa) {
  return std::exp(kI * (pi / 4.0)) / std::sqrt(8.0 * pi * kappa);
}

FarFieldOperators assemble_farfield(const BoundaryCurve& c, double kappa0,
                                    const Eigen::VectorXd& obs_angles) {
  validate(c, kappa0);
  if (obs_angles.size() == 0) throw std::invalid_argument("assemble_farfield: no observation angles");
  const int M = static_cast<int>(obs_angles.size());
  const int N = c.size();
  const cplx pref = farfield_constant(kappa0) * c.weight();
  FarFieldOperators out{Eigen::MatrixXcd(M, N), Eigen::MatrixXcd(M, N)};
  for (int k = 0; k < M; ++k) {
    const double ox = std::cos(obs_angles[k]);
    const double oy = std::sin(obs_angles[k]);
    for (int j = 0; j < N; ++j) {
      const cplx e = pref * std::exp(-kI * kappa0 * (ox * c.x[j] + oy * c.y[j]));
      out.S_inf(k, j) = e * c.jac[j];
      out.D_inf(k, j) = e * (-kI * kappa0 * (ox * c.dy[j] - oy * c.dx[j]));
    }
  }
  return out;
}

cplx single_layer_potential(const BoundaryCurve& c, double kappa, const Eigen::VectorXcd& density,
                            double px, double py) {
  validate(c, kappa);
  cplx sum = 0.0;
  for (int j = 0; j < c.size(); ++j) {
    const double dist = std::hypot(px - c.x[j], py - c.y[j]);
    sum += kI / 4.0 * specfun::hankel1(0, kappa * dist) * density[j] * c.jac[j];
  }
  return sum * c.weight();
}

cplx double_layer_potential(const BoundaryCurve& c, double kappa, const Eigen::VectorXcd& density,
                            double px, double py) {
  validate(c, kappa);
  cplx sum = 0.0;
  for (int j = 0; j < c.size(); ++j) {
    const double ex = px - c.x[j];
    const double ey = py - c.y[j];
    const double dist = std::hypot(ex, ey);
    const double dot = ex * c.dy[j] - ey * c.dx[j];
    sum += kI * kappa / 4.0 * specfun::hankel1(1, kappa * dist) * dot / dist * density[j];
  }
  return sum * c.weight();
}

}  // namespace cylscat
