#pragma once

#include "cylscat/geometry.hpp"

#include <Eigen/Dense>

#include <complex>

namespace cylscat {

using cplx = std::complex<double>;

/// Material and illumination constants plus every derived wavenumber.
/// Build with derive_params(); fields are plain data afterwards.
struct PhysicalParams {
  double eps0 = 1.0, mu0 = 1.0;
  double eps1 = 2.0, mu1 = 2.0;
  double omega = 2.5;
  double theta = 0.0;  // incidence angle w.r.t. the negative z axis
  double phi = 0.0;    // polar angle of the incident direction

  double k0 = 0.0;
  double beta = 0.0;
  double kappa0 = 0.0;
  double kappa1 = 0.0;
  double beta0 = 0.0, beta1 = 0.0;  // beta / kappa_j^2
  double eps_t0 = 0.0, eps_t1 = 0.0;  // eps_j / kappa_j^2
  double mu_t0 = 0.0, mu_t1 = 0.0;    // mu_j / kappa_j^2

  double kappa(int domain) const { return domain == 0 ? kappa0 : kappa1; }
};

/// Nystrom matrices of the six boundary operators for one wavenumber.
/// Each maps density samples at the 2n nodes to operator values at the nodes.
struct OperatorSet {
  double kappa = 0.0;
  Eigen::MatrixXcd S, D, NS, ND, TS, TD;
};

/// Far-field matrices (n_obs x 2n) for the exterior wavenumber.
struct FarFieldOperators {
  Eigen::MatrixXcd S_inf, D_inf;
};

Eigen::MatrixXcd assemble_S(const BoundaryCurve& curve, double kappa);
Eigen::MatrixXcd assemble_D(const BoundaryCurve& curve, double kappa);
Eigen::MatrixXcd assemble_NS(const BoundaryCurve& curve, double kappa);
Eigen::MatrixXcd assemble_TS(const BoundaryCurve& curve, double kappa);
Eigen::MatrixXcd assemble_TD(const BoundaryCurve& curve, double kappa);
Eigen::MatrixXcd assemble_ND(const BoundaryCurve& curve, double kappa);

/// All six operators, sharing kernel evaluations.
OperatorSet assemble_operators(const BoundaryCurve& curve, double kappa);

/// diag(1/|z'|) Q: tangential derivative of the trigonometric interpolant.
Eigen::MatrixXd tangential_derivative_matrix(const BoundaryCurve& curve);

FarFieldOperators assemble_farfield(const BoundaryCurve& curve, double kappa0,
                                    const Eigen::VectorXd& obs_angles);

/// Phi^inf prefactor e^{i pi/4} / sqrt(8 pi kappa).
cplx farfield_constant(double kappa);

/// Layer potentials at a point off the boundary, trapezoidal rule on the nodes.
/// Accurate when the point is several grid spacings away from the curve.
cplx single_layer_potential(const BoundaryCurve& curve, double kappa,
                            const Eigen::VectorXcd& density, double px, double py);
cplx double_layer_potential(const BoundaryCurve& curve, double kappa,
                            const Eigen::VectorXcd& density, double px, double py);

}  // namespace cylscat
