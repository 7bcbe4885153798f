#pragma once

#include "cylscat/direct_solver.hpp"
#include "cylscat/geometry.hpp"
#include "cylscat/layer_operators.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace cylscat {

/// Densities of the single/double-layer representation, unknown order
/// (zeta_e, xi_h, zeta_h, xi_e): exterior electric, interior magnetic,
/// exterior magnetic, interior electric.
struct InverseDensities {
  Eigen::VectorXcd zeta_e, xi_h, zeta_h, xi_e;
  double relative_residual = 0.0;
};

/// Discrete (I + C) phi = g for the four boundary equations.
struct Subsystem {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
};

/// Operators on one boundary, shared by all illuminations of an iteration step.
struct BoundaryOperators {
  OperatorSet exterior;  // kappa0
  OperatorSet interior;  // kappa1
  Eigen::MatrixXd dtau;  // diag(1/|z'|) Q
};

BoundaryOperators assemble_boundary_operators(const BoundaryCurve& curve,
                                              const PhysicalParams& params);

Subsystem assemble_subsystem(const BoundaryCurve& curve, const PhysicalParams& params,
                             const IncidentTrace& trace);
Eigen::MatrixXcd subsystem_matrix(const BoundaryOperators& ops, const PhysicalParams& params);
Eigen::VectorXcd subsystem_rhs(const PhysicalParams& params, const IncidentTrace& trace);

/// The unreduced transmission system (T + K) phi = b together with the
/// closed-form T^{-1}; used to check that T^{-1}(T + K) = I + C.
struct TransmissionBlocks {
  Eigen::MatrixXcd T, T_inv, K;
  Eigen::VectorXcd b;
};
TransmissionBlocks transmission_blocks(const BoundaryOperators& ops, const PhysicalParams& params,
                                       const IncidentTrace& trace);

/// Dense LU solve. Throws IrregularFrequencyError when singular.
InverseDensities solve_subsystem(const Subsystem& system, double max_condition = 1e12);

/// F5 - S_inf (zeta_e + zeta_h) with F5 = eps~0 e_inf + mu~0 h_inf.
Eigen::VectorXcd farfield_residual(const BoundaryCurve& curve, const PhysicalParams& params,
                                   const InverseDensities& densities, const FarFieldPattern& data);

/// Linearized far-field operator in nodal form (n_obs x 2n): maps samples of a
/// radial perturbation q at the grid nodes to the directional derivative of
/// S_inf zeta. Built as G1 + G2 Q.
Eigen::MatrixXcd frechet_nodal(const BoundaryCurve& curve, double kappa0,
                               const Eigen::VectorXcd& zeta, const Eigen::VectorXd& obs_angles);

/// frechet_nodal composed with the trigonometric basis matrix (2n x (2m+1)).
Eigen::MatrixXcd frechet_matrix(const BoundaryCurve& curve, double kappa0,
                                const Eigen::VectorXcd& zeta, const Eigen::VectorXd& obs_angles,
                                int degree);

/// Diagonal Sobolev weights (1 + k^2)^p in packed (a_0..a_m, b_1..b_m) order.
Eigen::VectorXd sobolev_weights(int degree, double p);

struct TikhonovResult {
  Eigen::VectorXd x;
  int cg_iterations = 0;
  double cg_relative_residual = 0.0;
};

/// Solves (Re(A)^T Re(A) + Im(A)^T Im(A) + lambda I_p) x = Re(A)^T Re(b) + Im(A)^T Im(b)
/// by conjugate gradients. `design` is already composed with the basis matrix.
/// Throws SolverError if CG stalls above 1e-8 relative residual.
TikhonovResult tikhonov_solve(const Eigen::MatrixXcd& design, const Eigen::VectorXcd& rhs,
                              double lambda, double p);
TrigPolynomial tikhonov_step(const Eigen::MatrixXcd& design, const Eigen::VectorXcd& rhs,
                             double lambda, double p);

struct RegularizationConfig {
  int degree = 3;           // m
  double sobolev_p = 0.0;   // p
  double lambda0 = 0.65;
  double decay = 2.0 / 3.0;
  int max_iter = 9;
  double stop_tol = 1e-4;
  void validate() const;
};

enum class Variant {
  Combined,   // eps~0 e + mu~0 h against S_inf (zeta_e + zeta_h), stacked over illuminations
  StackedEH,  // separate e and h blocks per illumination
};
Variant parse_variant(const std::string& name);  // "combined", "multi", "stacked_eh"
std::string to_string(Variant v);

struct Illumination {
  double phi = 0.0;
  FarFieldPattern data;
};

/// Incident directions phi_l = 2 pi l / L + offset, l = 1..L.
std::vector<double> illumination_angles(int count, double offset);

struct IterationRecord {
  int k = 0;
  TrigPolynomial radial;   // r^(k) after the update
  double lambda = 0.0;
  double misfit = 0.0;     // ||b|| / ||F|| before the update
  double update_norm = 0.0;  // ||q|| / ||r^(k-1)|| on the grid
  int halvings = 0;
  int cg_iterations = 0;
};

struct ReconstructionResult {
  TrigPolynomial initial;
  TrigPolynomial final_radial;
  std::vector<IterationRecord> history;
  std::string stop_reason;       // "max_iter", "stop_tol", or "failed"
  std::optional<std::string> failure;
};

/// Two-step regularized iteration: subsystem solve per illumination, then a
/// Tikhonov-regularized linearized far-field update of the radial function.
/// `params` supplies material/frequency/theta; phi is taken per illumination.
/// Solver failures mid-run end the iteration with `failure` set and the
/// history so far preserved.
ReconstructionResult reconstruct(const PhysicalParams& params,
                                 const std::vector<Illumination>& illuminations,
                                 const RegularizationConfig& config, const TrigPolynomial& r0,
                                 Variant variant, int n_inverse);

}  // namespace cylscat
