#pragma once

#include "cylscat/geometry.hpp"
#include "cylscat/layer_operators.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace cylscat {

/// Computes k0, beta, kappa_j and the scaled constants.
/// Throws ConfigError for non-positive material constants or frequency,
/// theta outside (0, pi), or kappa1^2 <= 0 (evanescent interior).
/// theta = pi/2 is accepted (beta = 0).
PhysicalParams derive_params(double eps0, double mu0, double eps1, double mu1, double omega,
                             double theta, double phi);

/// Incident electric z-component and its normal/tangential derivatives on the
/// boundary. The magnetic incident component is identically zero.
struct IncidentTrace {
  Eigen::VectorXcd e3inc;
  Eigen::VectorXcd dn_e3inc;
  Eigen::VectorXcd dtau_e3inc;
};

IncidentTrace incident_trace(const BoundaryCurve& curve, const PhysicalParams& params);

struct DirectDensities {
  Eigen::VectorXcd phi0, psi0;  // scattered traces (primary unknowns)
  Eigen::VectorXcd phi1, psi1;  // interior traces
  Eigen::VectorXcd eta0, eta1;  // electric normal derivatives
  Eigen::VectorXcd xi0, xi1;    // magnetic normal derivatives
  double relative_residual = 0.0;
  double condition_estimate = 0.0;
};

struct DirectOptions {
  // Systems whose condition estimate exceeds this are rejected as irregular.
  double max_condition = 1e12;
  // Test hook: swap the +-1/2 jump terms in the Dirichlet-to-Neumann maps.
  bool flip_jump_sign = false;
};

/// Dirichlet-to-Neumann maps K_j = (NS_j +- 1/2 I)^{-1} ND_j (+ for the exterior).
Eigen::MatrixXcd dirichlet_to_neumann(const OperatorSet& ops, int domain,
                                      const DirectOptions& options = {});

/// Solves the 4n x 4n transmission system for the scattered traces.
/// Throws IrregularFrequencyError when the system is numerically singular.
DirectDensities solve_direct(const BoundaryCurve& curve, const PhysicalParams& params,
                             const IncidentTrace& trace, const DirectOptions& options = {});

struct FarFieldPattern {
  Eigen::VectorXd obs_angles;
  Eigen::VectorXcd e_inf;
  Eigen::VectorXcd h_inf;
};

/// Equidistant angles 2 pi k / count, k = 0..count-1.
Eigen::VectorXd equidistant_angles(int count);

FarFieldPattern far_field(const BoundaryCurve& curve, const PhysicalParams& params,
                          const DirectDensities& densities, const Eigen::VectorXd& obs_angles);

/// Scattered (e3, h3) at a point of the exterior domain.
struct FieldValue {
  cplx e, h;
};
FieldValue scattered_field(const BoundaryCurve& curve, const PhysicalParams& params,
                           const DirectDensities& densities, double px, double py);

/// Far field of a circular cylinder from the separation-of-variables series.
FarFieldPattern oracle_circle_farfield(double radius, const PhysicalParams& params,
                                       const Eigen::VectorXd& obs_angles);

/// Convenience: geometry + trace + solve + far field.
FarFieldPattern simulate_farfield(const RadialFunction& radial, int n,
                                  const PhysicalParams& params, const Eigen::VectorXd& obs_angles,
                                  const DirectOptions& options = {});

/// Adds complex Gaussian noise scaled so that ||e_delta - e|| = delta1 ||e||
/// and likewise for h. Deterministic for a fixed seed.
FarFieldPattern add_noise(const FarFieldPattern& pattern, double delta1, double delta2,
                          std::uint64_t seed);

/// Relative discrete L2 distance over both components (e and h stacked).
double relative_l2(const FarFieldPattern& a, const FarFieldPattern& reference);

/// Far-field data file: '#'-prefixed key=value header lines, then
/// obs_angle,re_e,im_e,re_h,im_h rows.
struct FarFieldFile {
  std::map<std::string, std::string> header;
  FarFieldPattern pattern;
};
void write_farfield_csv(std::ostream& out, const FarFieldFile& file);
FarFieldFile read_farfield_csv(std::istream& in);

}  // namespace cylscat
