#include "cylscat/inverse.hpp"

#include "cylscat/errors.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cylscat {

using std::numbers::pi;

namespace {

constexpr cplx kI{0.0, 1.0};

double grid_norm(const TrigPolynomial& q, const Eigen::VectorXd& t) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < t.size(); ++j) s += q(t[j]) * q(t[j]);
  return std::sqrt(s / static_cast<double>(t.size()));
}

bool positive_on(const TrigPolynomial& r, int n_check) {
  const auto t = grid_nodes(n_check);
  for (Eigen::Index j = 0; j < t.size(); ++j)
    if (!(r(t[j]) > 0.0)) return false;
  return true;
}

}  // namespace

BoundaryOperators assemble_boundary_operators(const BoundaryCurve& curve,
                                              const PhysicalParams& params) {
  return {assemble_operators(curve, params.kappa0), assemble_operators(curve, params.kappa1),
          tangential_derivative_matrix(curve)};
}

Eigen::MatrixXcd subsystem_matrix(const BoundaryOperators& ops, const PhysicalParams& p) {
  const auto& o0 = ops.exterior;
  const auto& o1 = ops.interior;
  const Eigen::Index N = o0.S.rows();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  const double dbeta = p.beta0 - p.beta1;

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(4 * N, 4 * N);
  // rows: (psi_e, phi_h, psi_h, phi_e) equations in the (I + C) ordering
  A.block(0, 0, N, N) = I - 2.0 * o0.NS;
  A.block(0, 2 * N, N, N) = (2.0 * dbeta / (p.omega * p.mu_t0)) * o0.TS;
  A.block(0, 3 * N, N, N) = 2.0 * o1.ND;

  A.block(N, N, N, N) = I - 2.0 * o1.D;
  A.block(N, 2 * N, N, N) = (2.0 * p.mu_t1 / p.mu_t0) * o0.S;

  A.block(2 * N, 0, N, N) = (-2.0 * dbeta / (p.omega * p.eps_t0)) * o0.TS;
  A.block(2 * N, N, N, N) = 2.0 * o1.ND;
  A.block(2 * N, 2 * N, N, N) = I - 2.0 * o0.NS;

  A.block(3 * N, 0, N, N) = (2.0 * p.eps_t1 / p.eps_t0) * o0.S;
  A.block(3 * N, 3 * N, N, N) = I - 2.0 * o1.D;
  return A;
}

Eigen::VectorXcd subsystem_rhs(const PhysicalParams& p, const IncidentTrace& tr) {
  const Eigen::Index N = tr.e3inc.size();
  Eigen::VectorXcd g = Eigen::VectorXcd::Zero(4 * N);
  g.segment(0, N) = 2.0 * p.eps_t0 * tr.dn_e3inc;
  g.segment(2 * N, N) = (2.0 / p.omega) * (p.beta0 - p.beta1) * tr.dtau_e3inc;
  g.segment(3 * N, N) = -2.0 * p.eps_t1 * tr.e3inc;
  return g;
}

Subsystem assemble_subsystem(const BoundaryCurve& curve, const PhysicalParams& params,
                             const IncidentTrace& trace) {
  const auto ops = assemble_boundary_operators(curve, params);
  return {subsystem_matrix(ops, params), subsystem_rhs(params, trace)};
}

TransmissionBlocks transmission_blocks(const BoundaryOperators& ops, const PhysicalParams& p,
                                       const IncidentTrace& tr) {
  const auto& o0 = ops.exterior;
  const auto& o1 = ops.interior;
  const Eigen::Index N = o0.S.rows();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  const Eigen::MatrixXcd dtau = ops.dtau.cast<cplx>();
  const double w = p.omega;

  TransmissionBlocks out;
  out.T = Eigen::MatrixXcd::Zero(4 * N, 4 * N);
  out.T.block(0, 0, N, N) = (w / 2.0) * I;
  out.T.block(0, N, N, N) = (p.beta1 / (2.0 * p.mu_t1)) * dtau;
  out.T.block(N, N, N, N) = (-1.0 / (2.0 * p.mu_t1)) * I;
  out.T.block(2 * N, 2 * N, N, N) = (w / 2.0) * I;
  out.T.block(2 * N, 3 * N, N, N) = (-p.beta1 / (2.0 * p.eps_t1)) * dtau;
  out.T.block(3 * N, 3 * N, N, N) = (-1.0 / (2.0 * p.eps_t1)) * I;

  out.T_inv = Eigen::MatrixXcd::Zero(4 * N, 4 * N);
  out.T_inv.block(0, 0, N, N) = (2.0 / w) * I;
  out.T_inv.block(0, N, N, N) = (2.0 * p.beta1 / w) * dtau;
  out.T_inv.block(N, N, N, N) = (-2.0 * p.mu_t1) * I;
  out.T_inv.block(2 * N, 2 * N, N, N) = (2.0 / w) * I;
  out.T_inv.block(2 * N, 3 * N, N, N) = (-2.0 * p.beta1 / w) * dtau;
  out.T_inv.block(3 * N, 3 * N, N, N) = (-2.0 * p.eps_t1) * I;

  out.K = Eigen::MatrixXcd::Zero(4 * N, 4 * N);
  out.K.block(0, 0, N, N) = -w * o0.NS;
  out.K.block(0, N, N, N) = (-p.beta1 / p.mu_t1) * o1.TD;
  out.K.block(0, 2 * N, N, N) = (p.beta0 / p.mu_t0) * o0.TS;
  out.K.block(0, 3 * N, N, N) = w * o1.ND;
  out.K.block(N, N, N, N) = (1.0 / p.mu_t1) * o1.D;
  out.K.block(N, 2 * N, N, N) = (-1.0 / p.mu_t0) * o0.S;
  out.K.block(2 * N, 0, N, N) = (-p.beta0 / p.eps_t0) * o0.TS;
  out.K.block(2 * N, N, N, N) = w * o1.ND;
  out.K.block(2 * N, 2 * N, N, N) = -w * o0.NS;
  out.K.block(2 * N, 3 * N, N, N) = (p.beta1 / p.eps_t1) * o1.TD;
  out.K.block(3 * N, 0, N, N) = (-1.0 / p.eps_t0) * o0.S;
  out.K.block(3 * N, 3 * N, N, N) = (1.0 / p.eps_t1) * o1.D;

  out.b = Eigen::VectorXcd::Zero(4 * N);
  out.b.segment(0, N) = p.eps_t0 * w * tr.dn_e3inc;
  out.b.segment(2 * N, N) = p.beta0 * tr.dtau_e3inc;
  out.b.segment(3 * N, N) = tr.e3inc;
  return out;
}

InverseDensities solve_subsystem(const Subsystem& system, double max_condition) {
  const Eigen::Index N4 = system.matrix.rows();
  if (N4 % 4 != 0 || system.matrix.cols() != N4 || system.rhs.size() != N4)
    throw std::invalid_argument("solve_subsystem: inconsistent dimensions");
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(system.matrix);
  const double cond = 1.0 / lu.rcond();
  if (!(cond < max_condition))
    throw IrregularFrequencyError("inverse subsystem is singular for the current boundary", cond);
  const Eigen::VectorXcd x = lu.solve(system.rhs);
  const Eigen::Index N = N4 / 4;
  InverseDensities d;
  d.zeta_e = x.segment(0, N);
  d.xi_h = x.segment(N, N);
  d.zeta_h = x.segment(2 * N, N);
  d.xi_e = x.segment(3 * N, N);
  const double bn = system.rhs.norm();
  const double rn = (system.matrix * x - system.rhs).norm();
  d.relative_residual = bn > 0 ? rn / bn : rn;
  return d;
}

Eigen::VectorXcd farfield_residual(const BoundaryCurve& curve, const PhysicalParams& p,
                                   const InverseDensities& d, const FarFieldPattern& data) {
  const auto ff = assemble_farfield(curve, p.kappa0, data.obs_angles);
  return (p.eps_t0 * data.e_inf + p.mu_t0 * data.h_inf) - ff.S_inf * (d.zeta_e + d.zeta_h);
}

Eigen::MatrixXcd frechet_nodal(const BoundaryCurve& c, double kappa0, const Eigen::VectorXcd& zeta,
                               const Eigen::VectorXd& obs_angles) {
  const Eigen::Index M = obs_angles.size();
  const int N = c.size();
  const cplx pref = farfield_constant(kappa0) * c.weight();
  Eigen::MatrixXcd G1(M, N), G2(M, N);
  for (Eigen::Index k = 0; k < M; ++k) {
    const double ox = std::cos(obs_angles[k]);
    const double oy = std::sin(obs_angles[k]);
    for (int j = 0; j < N; ++j) {
      const double ct = std::cos(c.t[j]);
      const double st = std::sin(c.t[j]);
      const cplx e = pref * std::exp(-kI * kappa0 * (ox * c.x[j] + oy * c.y[j])) * zeta[j];
      // q(s) multiplies the radial direction (cos s, sin s) and q'(s) enters
      // through z' . (q (cos, sin))' / |z'|.
      const cplx g1 = -kI * kappa0 * (ox * ct + oy * st) * c.jac[j] +
                      (-c.dx[j] * st + c.dy[j] * ct) / c.jac[j];
      const double g2 = (c.dx[j] * ct + c.dy[j] * st) / c.jac[j];
      G1(k, j) = e * g1;
      G2(k, j) = e * g2;
    }
  }
  return G1 + G2 * trig_diff_matrix(c.n);
}

Eigen::MatrixXcd frechet_matrix(const BoundaryCurve& curve, double kappa0,
                                const Eigen::VectorXcd& zeta, const Eigen::VectorXd& obs_angles,
                                int degree) {
  return frechet_nodal(curve, kappa0, zeta, obs_angles) * trig_basis_matrix(curve.n, degree);
}

Eigen::VectorXd sobolev_weights(int degree, double p) {
  if (degree < 0) throw std::invalid_argument("sobolev_weights: degree must be >= 0");
  if (!(p >= 0)) throw std::invalid_argument("sobolev_weights: p must be >= 0");
  Eigen::VectorXd w(2 * degree + 1);
  for (int k = 0; k <= degree; ++k) w[k] = std::pow(1.0 + double(k) * k, p);
  for (int k = 1; k <= degree; ++k) w[degree + k] = std::pow(1.0 + double(k) * k, p);
  return w;
}

TikhonovResult tikhonov_solve(const Eigen::MatrixXcd& design, const Eigen::VectorXcd& rhs,
                              double lambda, double p) {
  if (!(lambda > 0)) throw std::invalid_argument("tikhonov: lambda must be positive");
  if (design.rows() != rhs.size()) throw std::invalid_argument("tikhonov: dimension mismatch");
  const Eigen::Index cols = design.cols();
  if (cols % 2 == 0) throw std::invalid_argument("tikhonov: expected 2m+1 columns");
  const int degree = static_cast<int>(cols - 1) / 2;

  const Eigen::MatrixXd re = design.real();
  const Eigen::MatrixXd im = design.imag();
  Eigen::MatrixXd normal = re.transpose() * re + im.transpose() * im;
  normal.diagonal() += lambda * sobolev_weights(degree, p);
  const Eigen::VectorXd b = re.transpose() * rhs.real() + im.transpose() * rhs.imag();

  // Conjugate gradients; 2m+1 steps suffice in exact arithmetic, extra sweeps
  // absorb round-off on ill-conditioned steps.
  TikhonovResult out;
  out.x = Eigen::VectorXd::Zero(cols);
  Eigen::VectorXd r = b;
  Eigen::VectorXd d = r;
  const double bnorm = b.norm();
  if (bnorm == 0.0) return out;
  double rr = r.squaredNorm();
  const int max_iter = 10 * static_cast<int>(cols);
  constexpr double tol = 1e-10;
  while (out.cg_iterations < max_iter && std::sqrt(rr) > tol * bnorm) {
    const Eigen::VectorXd Ad = normal * d;
    const double alpha = rr / d.dot(Ad);
    out.x += alpha * d;
    r -= alpha * Ad;
    const double rr_new = r.squaredNorm();
    d = r + (rr_new / rr) * d;
    rr = rr_new;
    ++out.cg_iterations;
  }
  out.cg_relative_residual = (b - normal * out.x).norm() / bnorm;
  if (!(out.cg_relative_residual < 1e-8)) {
    throw SolverError("tikhonov: conjugate gradients stalled at relative residual " +
                      std::to_string(out.cg_relative_residual));
  }
  return out;
}

TrigPolynomial tikhonov_step(const Eigen::MatrixXcd& design, const Eigen::VectorXcd& rhs,
                             double lambda, double p) {
  return TrigPolynomial::from_packed(tikhonov_solve(design, rhs, lambda, p).x);
}

void RegularizationConfig::validate() const {
  if (degree < 1) throw ConfigError("regularization: degree m must be >= 1");
  if (!(sobolev_p >= 0)) throw ConfigError("regularization: p must be >= 0");
  if (!(lambda0 > 0)) throw ConfigError("regularization: lambda0 must be positive");
  if (!(decay > 0 && decay < 1)) throw ConfigError("regularization: decay must lie in (0, 1)");
  if (max_iter < 1) throw ConfigError("regularization: max_iter must be >= 1");
  if (!(stop_tol >= 0)) throw ConfigError("regularization: stop_tol must be >= 0");
}

Variant parse_variant(const std::string& name) {
  if (name == "combined" || name == "multi") return Variant::Combined;
  if (name == "stacked_eh") return Variant::StackedEH;
  throw ConfigError("unknown variant '" + name + "' (expected combined, multi or stacked_eh)");
}

std::string to_string(Variant v) { return v == Variant::Combined ? "combined" : "stacked_eh"; }

std::vector<double> illumination_angles(int count, double offset) {
  if (count < 1) throw ConfigError("illuminations: count must be >= 1");
  std::vector<double> out;
  for (int l = 1; l <= count; ++l) out.push_back(2.0 * pi * l / count + offset);
  return out;
}

ReconstructionResult reconstruct(const PhysicalParams& params,
                                 const std::vector<Illumination>& illuminations,
                                 const RegularizationConfig& config, const TrigPolynomial& r0,
                                 Variant variant, int n_inverse) {
  config.validate();
  if (illuminations.empty()) throw ConfigError("reconstruct: no illuminations");
  for (const auto& il : illuminations) {
    const auto m = il.data.obs_angles.size();
    if (m == 0 || il.data.e_inf.size() != m || il.data.h_inf.size() != m)
      throw ConfigError("reconstruct: inconsistent far-field data");
  }
  if (!positive_on(r0, n_inverse)) throw ConfigError("reconstruct: initial radius must be positive");

  ReconstructionResult result;
  result.initial = r0;
  // Keep the radial function in the update space so coefficients add directly.
  TrigPolynomial radial = r0 + TrigPolynomial::constant(0.0, config.degree);
  const Eigen::VectorXd grid = grid_nodes(n_inverse);
  result.stop_reason = "max_iter";

  for (int k = 1; k <= config.max_iter; ++k) {
    IterationRecord rec;
    rec.k = k;
    rec.lambda = config.lambda0 * std::pow(config.decay, k - 1);
    try {
      const BoundaryCurve curve = curve_from_radial(radial, n_inverse);
      const BoundaryOperators ops = assemble_boundary_operators(curve, params);
      Subsystem system{subsystem_matrix(ops, params), {}};

      std::vector<Eigen::MatrixXcd> blocks;
      std::vector<Eigen::VectorXcd> rhs_blocks;
      double data_norm_sq = 0.0;
      for (const auto& il : illuminations) {
        PhysicalParams pl = params;
        pl.phi = il.phi;
        system.rhs = subsystem_rhs(pl, incident_trace(curve, pl));
        const InverseDensities dens = solve_subsystem(system);
        const auto ff = assemble_farfield(curve, params.kappa0, il.data.obs_angles);
        if (variant == Variant::Combined) {
          const Eigen::VectorXcd zeta = dens.zeta_e + dens.zeta_h;
          const Eigen::VectorXcd f5 = params.eps_t0 * il.data.e_inf + params.mu_t0 * il.data.h_inf;
          blocks.push_back(frechet_matrix(curve, params.kappa0, zeta, il.data.obs_angles,
                                          config.degree));
          rhs_blocks.push_back(f5 - ff.S_inf * zeta);
          data_norm_sq += f5.squaredNorm();
        } else {
          const Eigen::VectorXcd fe = params.eps_t0 * il.data.e_inf;
          const Eigen::VectorXcd fh = params.mu_t0 * il.data.h_inf;
          blocks.push_back(frechet_matrix(curve, params.kappa0, dens.zeta_e, il.data.obs_angles,
                                          config.degree));
          rhs_blocks.push_back(fe - ff.S_inf * dens.zeta_e);
          blocks.push_back(frechet_matrix(curve, params.kappa0, dens.zeta_h, il.data.obs_angles,
                                          config.degree));
          rhs_blocks.push_back(fh - ff.S_inf * dens.zeta_h);
          data_norm_sq += fe.squaredNorm() + fh.squaredNorm();
        }
      }

      Eigen::Index rows = 0;
      for (const auto& b : blocks) rows += b.rows();
      Eigen::MatrixXcd design(rows, 2 * config.degree + 1);
      Eigen::VectorXcd rhs(rows);
      Eigen::Index offset = 0;
      for (std::size_t i = 0; i < blocks.size(); ++i) {
        design.middleRows(offset, blocks[i].rows()) = blocks[i];
        rhs.segment(offset, rhs_blocks[i].size()) = rhs_blocks[i];
        offset += blocks[i].rows();
      }
      rec.misfit = rhs.norm() / std::sqrt(data_norm_sq);

      const TikhonovResult step = tikhonov_solve(design, rhs, rec.lambda, config.sobolev_p);
      rec.cg_iterations = step.cg_iterations;
      TrigPolynomial q = TrigPolynomial::from_packed(step.x);
      TrigPolynomial candidate = radial + q;
      while (!positive_on(candidate, 2 * n_inverse)) {
        if (++rec.halvings > 10)
          throw SolverError("reconstruct: update keeps the radius non-positive after 10 halvings");
        q = q * 0.5;
        candidate = radial + q;
      }
      rec.update_norm = grid_norm(q, grid) / grid_norm(radial, grid);
      radial = candidate;
      rec.radial = radial;
      result.history.push_back(rec);
      if (rec.update_norm < config.stop_tol) {
        result.stop_reason = "stop_tol";
        break;
      }
    } catch (const SolverError& e) {
      result.failure = "iteration " + std::to_string(k) + ": " + e.what();
      result.stop_reason = "failed";
      break;
    }
  }
  result.final_radial = radial;
  return result;
}

}  // namespace cylscat
