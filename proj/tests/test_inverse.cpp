#include "cylscat/errors.hpp"
#include "cylscat/inverse.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cylscat;
constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

namespace {

PhysicalParams base_params(double omega = 2.5, double theta = kPi / 3, double phi = 0.0) {
  return derive_params(1, 1, 2, 2, omega, theta, phi);
}

std::vector<Illumination> synth(const RadialFunction& truth, const PhysicalParams& base,
                                const std::vector<double>& phis, int n_forward,
                                const Eigen::VectorXd& obs, double delta = 0.0) {
  std::vector<Illumination> out;
  std::uint64_t seed = 1;
  for (double phi : phis) {
    PhysicalParams p = base;
    p.phi = phi;
    FarFieldPattern f = simulate_farfield(truth, n_forward, p, obs);
    if (delta > 0) f = add_noise(f, delta, delta, seed++);
    out.push_back({phi, f});
  }
  return out;
}

double fd_order(const RadialFunction& base, int n, const PhysicalParams& p) {
  const BoundaryCurve curve = curve_from_radial(base, n);
  const InverseDensities d = solve_subsystem(assemble_subsystem(curve, p, incident_trace(curve, p)));
  const Eigen::VectorXcd zeta = d.zeta_e + d.zeta_h;
  const Eigen::VectorXd obs = equidistant_angles(2 * n);
  Eigen::VectorXd q(curve.size());
  for (int j = 0; j < curve.size(); ++j) q[j] = std::cos(curve.t[j]);
  const Eigen::VectorXcd lin = frechet_nodal(curve, p.kappa0, zeta, obs) * q.cast<cplx>();
  const Eigen::VectorXcd f0 = assemble_farfield(curve, p.kappa0, obs).S_inf * zeta;
  double err[3];
  const double hs[3] = {1e-2, 1e-3, 1e-4};
  for (int i = 0; i < 3; ++i) {
    const double h = hs[i];
    const RadialFunction moved{"moved", [&base, h](double t) {
                                 RadialSample s = base.eval(t);
                                 return RadialSample{s.r + h * std::cos(t), s.dr - h * std::sin(t),
                                                     s.ddr - h * std::cos(t)};
                               }};
    const Eigen::VectorXcd f = assemble_farfield(curve_from_radial(moved, n), p.kappa0, obs).S_inf * zeta;
    err[i] = (f - f0 - h * lin).norm();
  }
  return std::min(std::log10(err[0] / err[1]), std::log10(err[1] / err[2]));
}

}  // namespace

TEST_CASE("transmission blocks reduce to I + C") {
  const PhysicalParams p = base_params(2.5, kPi / 3, 0.4);
  const BoundaryCurve c = curve_from_radial(RadialFunction::apple(), 24);
  const BoundaryOperators ops = assemble_boundary_operators(c, p);
  const IncidentTrace tr = incident_trace(c, p);
  const TransmissionBlocks tb = transmission_blocks(ops, p, tr);
  const Eigen::Index N = tb.T.rows();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
  CHECK((tb.T * tb.T_inv - I).norm() < 1e-12 * std::sqrt(double(N)));
  CHECK((tb.T_inv * tb.T - I).norm() < 1e-12 * std::sqrt(double(N)));
  const Eigen::MatrixXcd lhs = tb.T_inv * (tb.T + tb.K);
  const Eigen::MatrixXcd sub = subsystem_matrix(ops, p);
  CHECK((lhs - sub).norm() < 1e-11 * sub.norm());
  // The tangential segment differs by the spectral derivative error of e3inc.
  const Eigen::VectorXcd diff = tb.T_inv * tb.b - subsystem_rhs(p, tr);
  const Eigen::Index n2 = 2 * c.n;
  CHECK(diff.segment(0, 2 * n2).norm() < 1e-12 * tb.b.norm());
  CHECK(diff.segment(3 * n2, n2).norm() < 1e-12 * tb.b.norm());
  CHECK(diff.norm() < 1e-5 * tb.b.norm());
}

TEST_CASE("subsystem solve") {
  const PhysicalParams p = base_params();
  const BoundaryCurve c = curve_from_radial(RadialFunction::peanut(), 32);
  const Subsystem s = assemble_subsystem(c, p, incident_trace(c, p));
  const InverseDensities d = solve_subsystem(s);
  CHECK(d.relative_residual < 1e-12);
  CHECK(d.zeta_e.size() == c.size());

  SUBCASE("zero incident trace gives zero densities") {
    IncidentTrace zero{Eigen::VectorXcd::Zero(c.size()), Eigen::VectorXcd::Zero(c.size()),
                       Eigen::VectorXcd::Zero(c.size())};
    const InverseDensities z = solve_subsystem(assemble_subsystem(c, p, zero));
    CHECK(z.zeta_e.norm() + z.zeta_h.norm() + z.xi_e.norm() + z.xi_h.norm() == 0.0);
  }
  SUBCASE("permuting unknowns and equations does not change the densities") {
    const Eigen::Index N4 = s.matrix.rows();
    Eigen::VectorXi idx(N4);
    for (Eigen::Index i = 0; i < N4; ++i) idx[i] = static_cast<int>((i * 7 + 3) % N4);
    Eigen::PermutationMatrix<Eigen::Dynamic> P(idx);
    const Subsystem permuted{P * s.matrix * P.transpose(), P * s.rhs};
    Eigen::VectorXcd y = Eigen::PartialPivLU<Eigen::MatrixXcd>(permuted.matrix).solve(permuted.rhs);
    Eigen::VectorXcd x = P.transpose() * y;
    const Eigen::Index N = N4 / 4;
    CHECK((x.segment(0, N) - d.zeta_e).norm() < 1e-11 * d.zeta_e.norm());
    CHECK((x.segment(2 * N, N) - d.zeta_h).norm() < 1e-11 * d.zeta_h.norm());
  }
  SUBCASE("singular guard") {
    CHECK_THROWS_AS(solve_subsystem(s, 1.0), IrregularFrequencyError);
  }
}

TEST_CASE("magnetic densities vanish at normal incidence") {
  const PhysicalParams p = base_params(2.5, kPi / 2, 0.3);
  const BoundaryCurve c = curve_from_radial(RadialFunction::peanut(), 32);
  const InverseDensities d = solve_subsystem(assemble_subsystem(c, p, incident_trace(c, p)));
  CHECK(d.zeta_h.norm() < 1e-10 * d.zeta_e.norm());
  CHECK(d.xi_h.norm() < 1e-10 * d.zeta_e.norm());
}

TEST_CASE("indirect formulation reproduces data on the true boundary") {
  const PhysicalParams base = base_params();
  const Eigen::VectorXd obs = equidistant_angles(64);
  for (const RadialFunction& f : {RadialFunction::peanut(), RadialFunction::apple()}) {
    const auto ills = synth(f, base, {0.0, 2.0}, 64, obs);
    for (const Illumination& il : ills) {
      PhysicalParams p = base;
      p.phi = il.phi;
      const BoundaryCurve c = curve_from_radial(f, 32);
      const InverseDensities d = solve_subsystem(assemble_subsystem(c, p, incident_trace(c, p)));
      const Eigen::VectorXcd data = p.eps_t0 * il.data.e_inf + p.mu_t0 * il.data.h_inf;
      const Eigen::VectorXcd res = farfield_residual(c, p, d, il.data);
      CAPTURE(f.name);
      CHECK(res.norm() < 1e-6 * data.norm());

      const InverseDensities zero{Eigen::VectorXcd::Zero(c.size()), Eigen::VectorXcd::Zero(c.size()),
                                  Eigen::VectorXcd::Zero(c.size()), Eigen::VectorXcd::Zero(c.size()), 0.0};
      CHECK((farfield_residual(c, p, zero, il.data) - data).norm() == 0.0);
      FarFieldPattern scaled = il.data;
      scaled.e_inf *= 3.0;
      scaled.h_inf *= 3.0;
      const Eigen::VectorXcd r3 = farfield_residual(c, p, d, scaled);
      CHECK((r3 - (res + 2.0 * data)).norm() < 1e-12 * data.norm());
    }
  }
}

TEST_CASE("Frechet derivative: finite-difference order") {
  CHECK(fd_order(RadialFunction::peanut(), 32, base_params()) >= 1.9);
  CHECK(fd_order(RadialFunction::apple(), 32, base_params(3.0)) >= 1.9);
}

TEST_CASE("Frechet matrix structure") {
  const PhysicalParams p = base_params();
  const BoundaryCurve c = curve_from_radial(RadialFunction::peanut(), 16);
  Eigen::VectorXcd zeta(c.size());
  for (int j = 0; j < c.size(); ++j) zeta[j] = std::exp(kI * std::sin(c.t[j]));
  const Eigen::VectorXd obs = equidistant_angles(20);
  const Eigen::MatrixXcd nodal = frechet_nodal(c, p.kappa0, zeta, obs);
  const Eigen::MatrixXcd A = frechet_matrix(c, p.kappa0, zeta, obs, 3);
  CHECK(A.rows() == 20);
  CHECK(A.cols() == 7);
  CHECK((A - nodal * trig_basis_matrix(16, 3)).norm() < 1e-13 * A.norm());
  CHECK((nodal * Eigen::VectorXcd::Zero(c.size())).norm() == 0.0);

  SUBCASE("circle dilation keeps Fourier modes") {
    const BoundaryCurve circ = curve_from_radial(RadialFunction::circle(1.0), 32);
    const Eigen::VectorXd o = equidistant_angles(64);
    for (int k : {0, 2, -3}) {
      Eigen::VectorXcd z(circ.size());
      for (int j = 0; j < circ.size(); ++j) z[j] = std::exp(kI * double(k) * circ.t[j]);
      const Eigen::VectorXcd w = frechet_nodal(circ, p.kappa0, z, o) * Eigen::VectorXcd::Ones(circ.size());
      Eigen::VectorXcd e(o.size());
      for (int i = 0; i < o.size(); ++i) e[i] = std::exp(kI * double(k) * o[i]);
      const cplx coef = e.dot(w) / e.squaredNorm();
      CAPTURE(k);
      CHECK((w - coef * e).norm() < 1e-8 * w.norm());
    }
  }
}

TEST_CASE("Tikhonov step") {
  SUBCASE("identity design gives the scalar closed form") {
    const int m = 3;
    const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(2 * m + 1, 2 * m + 1);
    Eigen::VectorXcd b(2 * m + 1);
    for (int i = 0; i < b.size(); ++i) b[i] = cplx(0.1 * i - 0.2, 0.3);
    const double lambda = 0.4;
    const TikhonovResult r = tikhonov_solve(A, b, lambda, 0.0);
    CHECK((r.x - b.real() / (1.0 + lambda)).norm() < 1e-12);
    CHECK(tikhonov_solve(A, b, 1e12, 0.0).x.norm() < 1e-11);
    const TrigPolynomial q = tikhonov_step(A, b, lambda, 0.0);
    CHECK((q.packed() - r.x).norm() < 1e-15);
  }
  SUBCASE("matches a dense solve of the normal equations") {
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    const int m = 4;
    Eigen::MatrixXcd A(40, 2 * m + 1);
    Eigen::VectorXcd b(40);
    for (int i = 0; i < A.rows(); ++i) {
      for (int j = 0; j < A.cols(); ++j) A(i, j) = cplx(nd(gen), nd(gen));
      b[i] = cplx(nd(gen), nd(gen));
    }
    for (double p : {0.0, 1.0, 1.5}) {
      const double lambda = 0.3;
      Eigen::MatrixXd N = A.real().transpose() * A.real() + A.imag().transpose() * A.imag();
      for (int k = 0; k <= m; ++k) N(k, k) += lambda * std::pow(1.0 + k * k, p);
      for (int k = 1; k <= m; ++k) N(m + k, m + k) += lambda * std::pow(1.0 + k * k, p);
      const Eigen::VectorXd rhs = A.real().transpose() * b.real() + A.imag().transpose() * b.imag();
      const Eigen::VectorXd ref = N.ldlt().solve(rhs);
      const TikhonovResult r = tikhonov_solve(A, b, lambda, p);
      CAPTURE(p);
      CHECK((r.x - ref).norm() < 1e-9 * ref.norm());
      CHECK(r.cg_relative_residual < 1e-9);
    }
  }
  SUBCASE("Sobolev weights") {
    const Eigen::VectorXd w = sobolev_weights(2, 1.0);
    REQUIRE(w.size() == 5);
    CHECK(w[0] == 1.0);
    CHECK(w[1] == 2.0);
    CHECK(w[2] == 5.0);
    CHECK(w[3] == 2.0);
    CHECK(w[4] == 5.0);
    CHECK(sobolev_weights(3, 0.0) == Eigen::VectorXd::Ones(7));
  }
}

TEST_CASE("configuration helpers") {
  RegularizationConfig c;
  CHECK_NOTHROW(c.validate());
  c.lambda0 = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.decay = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.degree = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK(parse_variant("combined") == Variant::Combined);
  CHECK(parse_variant("multi") == Variant::Combined);
  CHECK(parse_variant("stacked_eh") == Variant::StackedEH);
  CHECK(to_string(Variant::StackedEH) == "stacked_eh");
  CHECK_THROWS_AS(parse_variant("newton"), ConfigError);
  const std::vector<double> a = illumination_angles(4, 0.0);
  REQUIRE(a.size() == 4);
  CHECK(a[0] == doctest::Approx(kPi / 2));
  CHECK(a[3] == doctest::Approx(2 * kPi));
  CHECK(illumination_angles(2, kPi / 2)[0] == doctest::Approx(3 * kPi / 2));
}

TEST_CASE("inverse crime: the true curve is a fixed point") {
  const TrigPolynomial truth({0.6, 0.05, 0.1, 0.0}, {0.03, 0.0, -0.02});
  const PhysicalParams base = base_params();
  const int n = 32;
  const auto ills = synth(RadialFunction::from_trig(truth), base, {0.5, 3.0}, n, equidistant_angles(2 * n));
  RegularizationConfig cfg;
  cfg.max_iter = 1;
  for (Variant v : {Variant::Combined, Variant::StackedEH}) {
    const ReconstructionResult r = reconstruct(base, ills, cfg, truth, v, n);
    REQUIRE(r.history.size() == 1);
    CHECK(r.history[0].update_norm < 1e-6);
  }
}

TEST_CASE("reconstruction: peanut benchmark behaviour") {
  const PhysicalParams base = base_params();
  const Eigen::VectorXd obs = equidistant_angles(64);
  const std::vector<double> phis = illumination_angles(2, kPi / 2);
  const auto ills = synth(RadialFunction::peanut(), base, phis, 64, obs);
  RegularizationConfig cfg;
  cfg.max_iter = 9;
  cfg.stop_tol = 0.0;
  const ReconstructionResult r =
      reconstruct(base, ills, cfg, TrigPolynomial::constant(0.6), Variant::Combined, 32);
  REQUIRE(r.history.size() == 9);
  CHECK_FALSE(r.failure.has_value());
  CHECK(r.stop_reason == "max_iter");
  for (int k = 1; k < 6; ++k) CHECK(r.history[k].misfit < r.history[k - 1].misfit);
  for (std::size_t k = 0; k < r.history.size(); ++k)
    CHECK(r.history[k].lambda == doctest::Approx(0.65 * std::pow(2.0 / 3.0, double(k))));
  const double err = radial_error(RadialFunction::from_trig(r.final_radial), RadialFunction::peanut()).relative_l2;
  CHECK(err < 0.05);

  SUBCASE("rotation equivariance") {
    const double alpha = kPi / 8;  // maps grid nodes onto grid nodes
    const Eigen::VectorXd obs_rot = (obs.array() + alpha).matrix();
    std::vector<double> phis_rot;
    for (double phi : phis) phis_rot.push_back(phi + alpha);
    const auto ills_rot = synth(RadialFunction::peanut().rotated(alpha), base, phis_rot, 64, obs_rot);
    const ReconstructionResult rr =
        reconstruct(base, ills_rot, cfg, TrigPolynomial::constant(0.6), Variant::Combined, 32);
    const Eigen::VectorXd t = grid_nodes(32);
    double diff = 0.0;
    for (int j = 0; j < t.size(); ++j)
      diff = std::max(diff, std::abs(rr.final_radial(t[j]) - r.final_radial(t[j] - alpha)));
    CHECK(diff < 1e-8);
  }
  SUBCASE("stop tolerance ends the run early") {
    RegularizationConfig loose = cfg;
    loose.stop_tol = 0.5;
    const ReconstructionResult s =
        reconstruct(base, ills, loose, TrigPolynomial::constant(0.6), Variant::Combined, 32);
    CHECK(s.history.size() == 1);
    CHECK(s.stop_reason == "stop_tol");
  }
}

TEST_CASE("reconstruction: apple, more illuminations do not hurt") {
  const PhysicalParams base = base_params(3.0);
  const Eigen::VectorXd obs = equidistant_angles(64);
  RegularizationConfig cfg;
  cfg.sobolev_p = 1.0;
  cfg.max_iter = 15;
  cfg.stop_tol = 0.0;
  double err[2];
  const int counts[2] = {1, 4};
  for (int i = 0; i < 2; ++i) {
    const auto ills = synth(RadialFunction::apple(), base, illumination_angles(counts[i], 0.0), 64, obs, 0.03);
    const ReconstructionResult r =
        reconstruct(base, ills, cfg, TrigPolynomial::constant(0.6), Variant::Combined, 32);
    err[i] = radial_error(RadialFunction::from_trig(r.final_radial), RadialFunction::apple()).relative_l2;
  }
  CHECK(err[1] <= err[0]);
}

TEST_CASE("reconstruction input errors and failure reporting") {
  const PhysicalParams base = base_params();
  RegularizationConfig cfg;
  CHECK_THROWS_AS(reconstruct(base, {}, cfg, TrigPolynomial::constant(0.6), Variant::Combined, 16),
                  ConfigError);
  const auto ills = synth(RadialFunction::peanut(), base, {0.0}, 32, equidistant_angles(32));
  CHECK_THROWS_AS(reconstruct(base, ills, cfg, TrigPolynomial::constant(-0.6), Variant::Combined, 16),
                  ConfigError);
  auto broken = ills;
  broken[0].data.h_inf.resize(3);
  CHECK_THROWS_AS(reconstruct(base, broken, cfg, TrigPolynomial::constant(0.6), Variant::Combined, 16),
                  ConfigError);
}
