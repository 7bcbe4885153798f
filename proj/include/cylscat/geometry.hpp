#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace cylscat {

/// Real trigonometric polynomial q(t) = sum_{k=0}^m a_k cos kt + sum_{k=1}^m b_k sin kt.
///
/// `a` has m+1 entries, `b` has m entries (b[0] is the coefficient of sin t).
/// The packed coefficient vector used by the regularized update is
/// (a_0, ..., a_m, b_1, ..., b_m).
class TrigPolynomial {
 public:
  TrigPolynomial() : a_(1, 0.0) {}
  TrigPolynomial(std::vector<double> a, std::vector<double> b);

  static TrigPolynomial constant(double value, int degree = 0);
  static TrigPolynomial from_packed(const Eigen::VectorXd& packed);

  int degree() const { return static_cast<int>(a_.size()) - 1; }
  const std::vector<double>& a() const { return a_; }
  const std::vector<double>& b() const { return b_; }

  /// Value of the `order`-th derivative (0, 1 or 2) at t.
  double eval(double t, int order = 0) const;
  double operator()(double t) const { return eval(t, 0); }

  Eigen::VectorXd packed() const;
  /// Degree is raised to max(degree(), other.degree()).
  TrigPolynomial operator+(const TrigPolynomial& other) const;
  TrigPolynomial operator*(double s) const;

 private:
  std::vector<double> a_;
  std::vector<double> b_;
};

/// r(t), r'(t), r''(t) of a star-shaped boundary.
struct RadialSample {
  double r, dr, ddr;
};

/// Radial function with analytic derivatives.
struct RadialFunction {
  std::string name;
  std::function<RadialSample(double)> eval;

  static RadialFunction circle(double radius);
  static RadialFunction peanut();
  static RadialFunction apple();
  static RadialFunction from_trig(const TrigPolynomial& q);
  /// Rotated copy: r_rot(t) = r(t - angle).
  RadialFunction rotated(double angle) const;
};

/// Samples of z(t) = r(t)(cos t, sin t) and its differential geometry on the
/// equidistant grid t_j = j pi / n, j = 0..2n-1. Immutable once built.
struct BoundaryCurve {
  int n = 0;
  Eigen::VectorXd t;
  Eigen::VectorXd r;
  Eigen::VectorXd x, y;      // z
  Eigen::VectorXd dx, dy;    // z'
  Eigen::VectorXd ddx, ddy;  // z''
  Eigen::VectorXd jac;       // |z'|
  Eigen::VectorXd nx, ny;    // outward unit normal (z2', -z1') / |z'|
  Eigen::VectorXd tx, ty;    // unit tangent (-n2, n1)

  int size() const { return 2 * n; }
  /// Trapezoidal weight pi/n.
  double weight() const;
  double perimeter() const;
};

/// Grid nodes t_j = j pi / n.
Eigen::VectorXd grid_nodes(int n);

/// Builds the curve from a radial function with analytic derivatives.
/// Throws std::invalid_argument for n < 4, r <= 0 or |z'| == 0 on the grid.
BoundaryCurve curve_from_radial(const RadialFunction& radial, int n);
BoundaryCurve curve_from_radial(const TrigPolynomial& radial, int n);

/// Builds the curve from 2n radial samples; r' and r'' by spectral differentiation.
BoundaryCurve curve_from_samples(const Eigen::VectorXd& radial_samples);

/// Trigonometric differentiation matrix on the 2n grid:
/// Q(k, j) = 0.5 (-1)^{k-j} cot((t_k - t_j)/2) for k != j, zero diagonal.
Eigen::MatrixXd trig_diff_matrix(int n);

/// Weights R_j(t_i) for int_0^{2pi} ln(4 sin^2((t_i - s)/2)) f(s) ds.
Eigen::VectorXd log_quadrature_weights(int n, int node);
/// Same, with the node given as an angle; throws if t is not a grid node.
Eigen::VectorXd log_quadrature_weights(int n, double t);
/// Full matrix R(i, j) = R_j(t_i); circulant.
Eigen::MatrixXd log_quadrature_matrix(int n);

/// Trigonometric basis evaluation matrix (2n x (2m+1)): columns cos(k t), k = 0..m,
/// then sin(k t), k = 1..m, evaluated at the grid nodes.
Eigen::MatrixXd trig_basis_matrix(int n, int m);

/// Relative L2 and sup distances between radial functions on a 2n_fine grid.
struct RadialError {
  double relative_l2;
  double sup;
};
RadialError radial_error(const RadialFunction& reconstructed,
                         const RadialFunction& truth, int n_fine = 256);

/// CSV rows: t,r,x,y,nx,ny.
void write_curve_csv(std::ostream& out, const BoundaryCurve& curve);

}  // namespace cylscat
