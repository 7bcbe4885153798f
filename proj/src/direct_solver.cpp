#include "cylscat/direct_solver.hpp"

#include "cylscat/errors.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace cylscat {

using std::numbers::pi;

namespace {

constexpr cplx kI{0.0, 1.0};

Eigen::MatrixXcd identity(int n) { return Eigen::MatrixXcd::Identity(n, n); }

// Integer-order cylinder functions for the series oracle. std::cyl_bessel_j
// and std::cyl_neumann keep the oracle independent of specfun.
double bessel_jn(int k, double x) {
  const double v = std::cyl_bessel_j(std::abs(k), x);
  return (k < 0 && (k % 2 != 0)) ? -v : v;
}

cplx hankel_n(int k, double x) {
  const cplx v(std::cyl_bessel_j(std::abs(k), x), std::cyl_neumann(std::abs(k), x));
  return (k < 0 && (k % 2 != 0)) ? -v : v;
}

}  // namespace

PhysicalParams derive_params(double eps0, double mu0, double eps1, double mu1, double omega,
                             double theta, double phi) {
  if (!(eps0 > 0 && mu0 > 0 && eps1 > 0 && mu1 > 0))
    throw ConfigError("derive_params: permittivities and permeabilities must be positive");
  if (!(omega > 0)) throw ConfigError("derive_params: omega must be positive");
  if (!(theta > 0 && theta < pi)) throw ConfigError("derive_params: theta must lie in (0, pi)");
  PhysicalParams p;
  p.eps0 = eps0;
  p.mu0 = mu0;
  p.eps1 = eps1;
  p.mu1 = mu1;
  p.omega = omega;
  p.theta = theta;
  p.phi = phi;
  p.k0 = omega * std::sqrt(mu0 * eps0);
  p.beta = p.k0 * std::cos(theta);
  if (std::abs(p.beta) < 1e-15 * p.k0) p.beta = 0.0;
  p.kappa0 = p.k0 * std::sin(theta);
  const double kappa1_sq = mu1 * eps1 * omega * omega - p.beta * p.beta;
  if (!(kappa1_sq > 0.0))
    throw ConfigError("derive_params: kappa1^2 <= 0 (requires mu1 eps1 > mu0 eps0 cos^2 theta)");
  p.kappa1 = std::sqrt(kappa1_sq);
  const double k0sq = p.kappa0 * p.kappa0;
  p.beta0 = p.beta / k0sq;
  p.beta1 = p.beta / kappa1_sq;
  p.eps_t0 = eps0 / k0sq;
  p.eps_t1 = eps1 / kappa1_sq;
  p.mu_t0 = mu0 / k0sq;
  p.mu_t1 = mu1 / kappa1_sq;
  return p;
}

IncidentTrace incident_trace(const BoundaryCurve& c, const PhysicalParams& p) {
  const int N = c.size();
  const double amp = std::sin(p.theta) / std::sqrt(p.eps0);
  const double dx = std::cos(p.phi);
  const double dy = std::sin(p.phi);
  IncidentTrace tr{Eigen::VectorXcd(N), Eigen::VectorXcd(N), Eigen::VectorXcd(N)};
  for (int j = 0; j < N; ++j) {
    const cplx e = amp * std::exp(kI * p.kappa0 * (c.x[j] * dx + c.y[j] * dy));
    tr.e3inc[j] = e;
    tr.dn_e3inc[j] = kI * p.kappa0 * (c.nx[j] * dx + c.ny[j] * dy) * e;
    tr.dtau_e3inc[j] = kI * p.kappa0 * (c.tx[j] * dx + c.ty[j] * dy) * e;
  }
  return tr;
}

Eigen::MatrixXcd dirichlet_to_neumann(const OperatorSet& ops, int domain,
                                      const DirectOptions& options) {
  const int N = static_cast<int>(ops.S.rows());
  double jump = domain == 0 ? 0.5 : -0.5;
  if (options.flip_jump_sign) jump = -jump;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(ops.NS + jump * identity(N));
  const double cond = 1.0 / lu.rcond();
  if (!(cond < options.max_condition)) {
    throw IrregularFrequencyError(
        "Dirichlet-to-Neumann map is singular (domain " + std::to_string(domain) +
            "); perturb omega to leave the interior eigenvalue",
        cond);
  }
  return lu.solve(ops.ND);
}

DirectDensities solve_direct(const BoundaryCurve& curve, const PhysicalParams& p,
                             const IncidentTrace& trace, const DirectOptions& options) {
  const int N = curve.size();
  const OperatorSet ops0 = assemble_operators(curve, p.kappa0);
  const OperatorSet ops1 = assemble_operators(curve, p.kappa1);
  const Eigen::MatrixXcd K0 = dirichlet_to_neumann(ops0, 0, options);
  const Eigen::MatrixXcd K1 = dirichlet_to_neumann(ops1, 1, options);
  const Eigen::MatrixXcd L0 = 2.0 * (ops0.TD - ops0.TS * K0);
  const Eigen::MatrixXcd L1 = 2.0 * (ops1.TD - ops1.TS * K1);
  const Eigen::MatrixXcd coupling = ops0.S * (p.beta1 * L1 + p.beta0 * L0);
  const Eigen::MatrixXcd S0K1 = ops0.S * K1;
  const Eigen::MatrixXcd diag = ops0.D - 0.5 * identity(N);

  Eigen::MatrixXcd A(2 * N, 2 * N);
  A.topLeftCorner(N, N) = diag - (p.eps_t1 / p.eps_t0) * S0K1;
  A.topRightCorner(N, N) = -(1.0 / (p.eps_t0 * p.omega)) * coupling;
  A.bottomLeftCorner(N, N) = (1.0 / (p.mu_t0 * p.omega)) * coupling;
  A.bottomRightCorner(N, N) = diag - (p.mu_t1 / p.mu_t0) * S0K1;

  Eigen::VectorXcd b(2 * N);
  b.head(N) = -ops0.S * trace.dn_e3inc + (p.eps_t1 / p.eps_t0) * (S0K1 * trace.e3inc);
  b.tail(N) = -(1.0 / (p.mu_t0 * p.omega)) *
              (ops0.S * (p.beta0 * trace.dtau_e3inc + p.beta1 * (L1 * trace.e3inc)));

  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  const double cond = 1.0 / lu.rcond();
  if (!(cond < options.max_condition)) {
    throw IrregularFrequencyError(
        "direct transmission system is singular (condition ~" + std::to_string(cond) +
            "); perturb omega to leave the irregular frequency",
        cond);
  }
  const Eigen::VectorXcd x = lu.solve(b);

  DirectDensities d;
  d.phi0 = x.head(N);
  d.psi0 = x.tail(N);
  d.phi1 = d.phi0 + trace.e3inc;
  d.psi1 = d.psi0;
  d.eta0 = K0 * d.phi0;
  d.eta1 = K1 * d.phi1;
  d.xi0 = K0 * d.psi0;
  d.xi1 = K1 * d.psi1;
  const double bnorm = b.norm();
  d.relative_residual = bnorm > 0 ? (A * x - b).norm() / bnorm : (A * x).norm();
  d.condition_estimate = cond;
  return d;
}

Eigen::VectorXd equidistant_angles(int count) {
  if (count < 1) throw ConfigError("equidistant_angles: count must be positive");
  Eigen::VectorXd a(count);
  for (int k = 0; k < count; ++k) a[k] = 2.0 * pi * k / count;
  return a;
}

FarFieldPattern far_field(const BoundaryCurve& curve, const PhysicalParams& p,
                          const DirectDensities& d, const Eigen::VectorXd& obs_angles) {
  const FarFieldOperators ff = assemble_farfield(curve, p.kappa0, obs_angles);
  return {obs_angles, ff.D_inf * d.phi0 - ff.S_inf * d.eta0, ff.D_inf * d.psi0 - ff.S_inf * d.xi0};
}

FieldValue scattered_field(const BoundaryCurve& curve, const PhysicalParams& p,
                           const DirectDensities& d, double px, double py) {
  const double k = p.kappa0;
  return {double_layer_potential(curve, k, d.phi0, px, py) -
              single_layer_potential(curve, k, d.eta0, px, py),
          double_layer_potential(curve, k, d.psi0, px, py) -
              single_layer_potential(curve, k, d.xi0, px, py)};
}

FarFieldPattern oracle_circle_farfield(double radius, const PhysicalParams& p,
                                       const Eigen::VectorXd& obs_angles) {
  if (!(radius > 0)) throw ConfigError("oracle_circle_farfield: radius must be positive");
  const double x0 = p.kappa0 * radius;
  const double x1 = p.kappa1 * radius;
  const int kmax = static_cast<int>(std::ceil(std::max(x0, x1))) + 20;
  const double amp = std::sin(p.theta) / std::sqrt(p.eps0);
  const cplx far_pref = std::sqrt(2.0 / (pi * p.kappa0)) * std::exp(-kI * (pi / 4.0));

  FarFieldPattern out{obs_angles, Eigen::VectorXcd::Zero(obs_angles.size()),
                      Eigen::VectorXcd::Zero(obs_angles.size())};
  for (int k = -kmax; k <= kmax; ++k) {
    const double j1 = bessel_jn(k, x1);
    const double j1p = 0.5 * (bessel_jn(k - 1, x1) - bessel_jn(k + 1, x1));
    const double j0 = bessel_jn(k, x0);
    const double j0p = 0.5 * (bessel_jn(k - 1, x0) - bessel_jn(k + 1, x0));
    const cplx h0 = hankel_n(k, x0);
    const cplx h0p = 0.5 * (hankel_n(k - 1, x0) - hankel_n(k + 1, x0));
    const cplx g = amp * std::pow(kI, k) * std::exp(-kI * double(k) * p.phi);
    const cplx tau = kI * double(k) / radius;

    // Unknowns are the mode traces on the circle (interior e, interior h,
    // scattered e, scattered h); the radial behaviour enters only through
    // logarithmic derivatives, which keeps high orders well scaled.
    const double ld1 = p.kappa1 * j1p / j1;
    const cplx ld0 = p.kappa0 * h0p / h0;
    Eigen::Matrix4cd M = Eigen::Matrix4cd::Zero();
    Eigen::Vector4cd rhs;
    M(0, 0) = 1.0;
    M(0, 2) = -1.0;
    rhs[0] = g * j0;
    M(1, 1) = 1.0;
    M(1, 3) = -1.0;
    rhs[1] = 0.0;
    M(2, 1) = p.mu_t1 * p.omega * ld1;
    M(2, 0) = p.beta1 * tau;
    M(2, 3) = -p.mu_t0 * p.omega * ld0;
    M(2, 2) = -p.beta0 * tau;
    rhs[2] = p.beta0 * tau * g * j0;
    M(3, 0) = p.eps_t1 * p.omega * ld1;
    M(3, 1) = -p.beta1 * tau;
    M(3, 2) = -p.eps_t0 * p.omega * ld0;
    M(3, 3) = p.beta0 * tau;
    rhs[3] = p.eps_t0 * p.omega * p.kappa0 * g * j0p;

    Eigen::PartialPivLU<Eigen::Matrix4cd> lu(M);
    if (!std::isfinite(ld1) || !(lu.rcond() > 1e-14))
      throw IrregularFrequencyError("circle oracle: singular mode system at order " +
                                        std::to_string(k),
                                    lu.rcond() > 0 ? 1.0 / lu.rcond() : INFINITY);
    Eigen::Vector4cd c = lu.solve(rhs);
    c[2] /= h0;
    c[3] /= h0;
    const cplx mode_pref = far_pref * std::pow(-kI, k);
    for (int i = 0; i < obs_angles.size(); ++i) {
      const cplx e = mode_pref * std::exp(kI * double(k) * obs_angles[i]);
      out.e_inf[i] += c[2] * e;
      out.h_inf[i] += c[3] * e;
    }
  }
  return out;
}

FarFieldPattern simulate_farfield(const RadialFunction& radial, int n, const PhysicalParams& params,
                                  const Eigen::VectorXd& obs_angles, const DirectOptions& options) {
  const BoundaryCurve curve = curve_from_radial(radial, n);
  const IncidentTrace trace = incident_trace(curve, params);
  const DirectDensities d = solve_direct(curve, params, trace, options);
  return far_field(curve, params, d, obs_angles);
}

FarFieldPattern add_noise(const FarFieldPattern& pattern, double delta1, double delta2,
                          std::uint64_t seed) {
  if (!(delta1 >= 0 && delta2 >= 0)) throw ConfigError("add_noise: noise levels must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto draw = [&](Eigen::Index size) {
    Eigen::VectorXcd u(size);
    for (Eigen::Index i = 0; i < size; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      u[i] = cplx(re, im);
    }
    return u;
  };
  const Eigen::VectorXcd u = draw(pattern.e_inf.size());
  const Eigen::VectorXcd v = draw(pattern.h_inf.size());
  FarFieldPattern out = pattern;
  if (delta1 > 0) out.e_inf += (delta1 * pattern.e_inf.norm() / u.norm()) * u;
  if (delta2 > 0) out.h_inf += (delta2 * pattern.h_inf.norm() / v.norm()) * v;
  return out;
}

double relative_l2(const FarFieldPattern& a, const FarFieldPattern& ref) {
  const double num = (a.e_inf - ref.e_inf).squaredNorm() + (a.h_inf - ref.h_inf).squaredNorm();
  const double den = ref.e_inf.squaredNorm() + ref.h_inf.squaredNorm();
  return std::sqrt(num / den);
}

void write_farfield_csv(std::ostream& out, const FarFieldFile& file) {
  for (const auto& [key, value] : file.header) out << "# " << key << '=' << value << '\n';
  out << "obs_angle,re_e,im_e,re_h,im_h\n" << std::setprecision(17);
  const auto& p = file.pattern;
  for (Eigen::Index i = 0; i < p.obs_angles.size(); ++i) {
    out << p.obs_angles[i] << ',' << p.e_inf[i].real() << ',' << p.e_inf[i].imag() << ','
        << p.h_inf[i].real() << ',' << p.h_inf[i].imag() << '\n';
  }
}

FarFieldFile read_farfield_csv(std::istream& in) {
  FarFieldFile file;
  std::vector<std::array<double, 5>> rows;
  std::string line;
  bool seen_columns = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto key = line.substr(1, eq - 1);
      key.erase(0, key.find_first_not_of(' '));
      key.erase(key.find_last_not_of(' ') + 1);
      file.header[key] = line.substr(eq + 1);
      continue;
    }
    if (!seen_columns) {
      if (line.rfind("obs_angle", 0) != 0)
        throw ConfigError("far-field file: missing column header at line " + std::to_string(line_no));
      seen_columns = true;
      continue;
    }
    std::array<double, 5> row{};
    std::istringstream ss(line);
    std::string cell;
    for (int c = 0; c < 5; ++c) {
      if (!std::getline(ss, cell, ','))
        throw ConfigError("far-field file: expected 5 columns at line " + std::to_string(line_no));
      try {
        row[c] = std::stod(cell);
      } catch (const std::exception&) {
        throw ConfigError("far-field file: malformed number at line " + std::to_string(line_no));
      }
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw ConfigError("far-field file: no data rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  file.pattern = {Eigen::VectorXd(n), Eigen::VectorXcd(n), Eigen::VectorXcd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    file.pattern.obs_angles[i] = rows[i][0];
    file.pattern.e_inf[i] = cplx(rows[i][1], rows[i][2]);
    file.pattern.h_inf[i] = cplx(rows[i][3], rows[i][4]);
  }
  return file;
}

}  // namespace cylscat
