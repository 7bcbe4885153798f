#include "cylscat/geometry.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace cylscat {

using std::numbers::pi;

TrigPolynomial::TrigPolynomial(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.empty()) a_.push_back(0.0);
  const std::size_t m = std::max(a_.size() - 1, b_.size());
  a_.resize(m + 1, 0.0);
  b_.resize(m, 0.0);
  for (double v : a_)
    if (!std::isfinite(v)) throw std::invalid_argument("TrigPolynomial: non-finite coefficient");
  for (double v : b_)
    if (!std::isfinite(v)) throw std::invalid_argument("TrigPolynomial: non-finite coefficient");
}

TrigPolynomial TrigPolynomial::constant(double value, int degree) {
  std::vector<double> a(static_cast<std::size_t>(degree) + 1, 0.0);
  a[0] = value;
  return TrigPolynomial(std::move(a), std::vector<double>(static_cast<std::size_t>(degree), 0.0));
}

TrigPolynomial TrigPolynomial::from_packed(const Eigen::VectorXd& packed) {
  if (packed.size() < 1 || packed.size() % 2 == 0)
    throw std::invalid_argument("TrigPolynomial: packed vector must have odd length 2m+1");
  const int m = static_cast<int>(packed.size() - 1) / 2;
  std::vector<double> a(packed.data(), packed.data() + m + 1);
  std::vector<double> b(packed.data() + m + 1, packed.data() + 2 * m + 1);
  return TrigPolynomial(std::move(a), std::move(b));
}

double TrigPolynomial::eval(double t, int order) const {
  double sum = 0.0;
  for (int k = 0; k <= degree(); ++k) {
    const double c = std::cos(k * t);
    const double s = std::sin(k * t);
    const double ak = a_[k];
    const double bk = k > 0 ? b_[k - 1] : 0.0;
    switch (order) {
      case 0: sum += ak * c + bk * s; break;
      case 1: sum += k * (-ak * s + bk * c); break;
      case 2: sum += -double(k) * k * (ak * c + bk * s); break;
      default: throw std::invalid_argument("TrigPolynomial: derivative order must be 0..2");
    }
  }
  return sum;
}

Eigen::VectorXd TrigPolynomial::packed() const {
  const int m = degree();
  Eigen::VectorXd out(2 * m + 1);
  for (int k = 0; k <= m; ++k) out[k] = a_[k];
  for (int k = 0; k < m; ++k) out[m + 1 + k] = b_[k];
  return out;
}

TrigPolynomial TrigPolynomial::operator+(const TrigPolynomial& other) const {
  const std::size_t m = std::max(a_.size(), other.a_.size()) - 1;
  std::vector<double> a(m + 1, 0.0), b(m, 0.0);
  for (std::size_t k = 0; k < a_.size(); ++k) a[k] += a_[k];
  for (std::size_t k = 0; k < other.a_.size(); ++k) a[k] += other.a_[k];
  for (std::size_t k = 0; k < b_.size(); ++k) b[k] += b_[k];
  for (std::size_t k = 0; k < other.b_.size(); ++k) b[k] += other.b_[k];
  return TrigPolynomial(std::move(a), std::move(b));
}

TrigPolynomial TrigPolynomial::operator*(double s) const {
  auto a = a_;
  auto b = b_;
  for (double& v : a) v *= s;
  for (double& v : b) v *= s;
  return TrigPolynomial(std::move(a), std::move(b));
}

RadialFunction RadialFunction::circle(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("circle: radius must be positive");
  return {"circle", [radius](double) { return RadialSample{radius, 0.0, 0.0}; }};
}

RadialFunction RadialFunction::peanut() {
  // r^2 = 0.5 cos^2 t + 0.15 sin^2 t = 0.325 + 0.175 cos 2t
  return {"peanut", [](double t) {
            const double g = 0.325 + 0.175 * std::cos(2.0 * t);
            const double dg = -0.35 * std::sin(2.0 * t);
            const double ddg = -0.7 * std::cos(2.0 * t);
            const double r = std::sqrt(g);
            const double dr = dg / (2.0 * r);
            const double ddr = ddg / (2.0 * r) - dg * dg / (4.0 * r * r * r);
            return RadialSample{r, dr, ddr};
          }};
}

RadialFunction RadialFunction::apple() {
  return {"apple", [](double t) {
            const double num = 0.45 + 0.3 * std::cos(t) - 0.1 * std::sin(2.0 * t);
            const double dnum = -0.3 * std::sin(t) - 0.2 * std::cos(2.0 * t);
            const double ddnum = -0.3 * std::cos(t) + 0.4 * std::sin(2.0 * t);
            const double den = 1.0 + 0.7 * std::cos(t);
            const double dden = -0.7 * std::sin(t);
            const double ddden = -0.7 * std::cos(t);
            const double r = num / den;
            const double dr = (dnum - r * dden) / den;
            const double ddr = (ddnum - 2.0 * dr * dden - r * ddden) / den;
            return RadialSample{r, dr, ddr};
          }};
}

RadialFunction RadialFunction::from_trig(const TrigPolynomial& q) {
  return {"trig", [q](double t) { return RadialSample{q.eval(t, 0), q.eval(t, 1), q.eval(t, 2)}; }};
}

RadialFunction RadialFunction::rotated(double angle) const {
  auto f = eval;
  return {name + "_rotated", [f, angle](double t) { return f(t - angle); }};
}

double BoundaryCurve::weight() const { return pi / n; }

double BoundaryCurve::perimeter() const { return weight() * jac.sum(); }

Eigen::VectorXd grid_nodes(int n) {
  Eigen::VectorXd t(2 * n);
  for (int j = 0; j < 2 * n; ++j) t[j] = j * pi / n;
  return t;
}

namespace {

BoundaryCurve build_curve(int n, const Eigen::VectorXd& r, const Eigen::VectorXd& dr,
                          const Eigen::VectorXd& ddr) {
  if (n < 4) throw std::invalid_argument("curve: grid half-size n must be >= 4");
  BoundaryCurve c;
  c.n = n;
  c.t = grid_nodes(n);
  const int N = 2 * n;
  c.r = r;
  c.x.resize(N); c.y.resize(N);
  c.dx.resize(N); c.dy.resize(N);
  c.ddx.resize(N); c.ddy.resize(N);
  c.jac.resize(N);
  c.nx.resize(N); c.ny.resize(N);
  c.tx.resize(N); c.ty.resize(N);
  for (int j = 0; j < N; ++j) {
    if (!(r[j] > 0.0) || !std::isfinite(r[j]))
      throw std::invalid_argument("curve: non-positive radius at node " + std::to_string(j));
    const double ct = std::cos(c.t[j]);
    const double st = std::sin(c.t[j]);
    c.x[j] = r[j] * ct;
    c.y[j] = r[j] * st;
    c.dx[j] = dr[j] * ct - r[j] * st;
    c.dy[j] = dr[j] * st + r[j] * ct;
    c.ddx[j] = ddr[j] * ct - 2.0 * dr[j] * st - r[j] * ct;
    c.ddy[j] = ddr[j] * st + 2.0 * dr[j] * ct - r[j] * st;
    c.jac[j] = std::hypot(c.dx[j], c.dy[j]);
    if (!(c.jac[j] > 0.0))
      throw std::invalid_argument("curve: degenerate Jacobian at node " + std::to_string(j));
    c.nx[j] = c.dy[j] / c.jac[j];
    c.ny[j] = -c.dx[j] / c.jac[j];
    c.tx[j] = -c.ny[j];
    c.ty[j] = c.nx[j];
  }
  return c;
}

}  // namespace

BoundaryCurve curve_from_radial(const RadialFunction& radial, int n) {
  if (n < 4) throw std::invalid_argument("curve: grid half-size n must be >= 4");
  const auto t = grid_nodes(n);
  Eigen::VectorXd r(2 * n), dr(2 * n), ddr(2 * n);
  for (int j = 0; j < 2 * n; ++j) {
    const auto s = radial.eval(t[j]);
    r[j] = s.r;
    dr[j] = s.dr;
    ddr[j] = s.ddr;
  }
  return build_curve(n, r, dr, ddr);
}

BoundaryCurve curve_from_radial(const TrigPolynomial& radial, int n) {
  return curve_from_radial(RadialFunction::from_trig(radial), n);
}

BoundaryCurve curve_from_samples(const Eigen::VectorXd& radial_samples) {
  if (radial_samples.size() % 2 != 0)
    throw std::invalid_argument("curve: sample count must be even (2n)");
  const int n = static_cast<int>(radial_samples.size() / 2);
  const Eigen::MatrixXd Q = trig_diff_matrix(n);
  const Eigen::VectorXd dr = Q * radial_samples;
  const Eigen::VectorXd ddr = Q * dr;
  return build_curve(n, radial_samples, dr, ddr);
}

Eigen::MatrixXd trig_diff_matrix(int n) {
  if (n < 2) throw std::invalid_argument("trig_diff_matrix: n must be >= 2");
  const int N = 2 * n;
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(N, N);
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j < N; ++j) {
      if (k == j) continue;
      const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
      Q(k, j) = 0.5 * sign / std::tan(0.5 * (k - j) * pi / n);
    }
  }
  return Q;
}

Eigen::VectorXd log_quadrature_weights(int n, int node) {
  if (n < 2) throw std::invalid_argument("log_quadrature_weights: n must be >= 2");
  if (node < 0 || node >= 2 * n)
    throw std::invalid_argument("log_quadrature_weights: node index out of range");
  const int N = 2 * n;
  Eigen::VectorXd w(N);
  for (int j = 0; j < N; ++j) {
    const double d = (node - j) * pi / n;
    double sum = 0.0;
    for (int m = 1; m < n; ++m) sum += std::cos(m * d) / m;
    w[j] = -(2.0 * pi / n) * sum - (pi / (double(n) * n)) * std::cos(n * d);
  }
  return w;
}

Eigen::VectorXd log_quadrature_weights(int n, double t) {
  const double idx = t * n / pi;
  const double rounded = std::round(idx);
  if (std::abs(idx - rounded) > 1e-9 || rounded < 0 || rounded >= 2 * n)
    throw std::invalid_argument("log_quadrature_weights: t is not a grid node");
  return log_quadrature_weights(n, static_cast<int>(rounded));
}

Eigen::MatrixXd log_quadrature_matrix(int n) {
  const int N = 2 * n;
  const Eigen::VectorXd row0 = log_quadrature_weights(n, 0);
  Eigen::MatrixXd R(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) R(i, j) = row0[((j - i) % N + N) % N];
  return R;
}

Eigen::MatrixXd trig_basis_matrix(int n, int m) {
  if (m < 0) throw std::invalid_argument("trig_basis_matrix: degree must be >= 0");
  const int N = 2 * n;
  Eigen::MatrixXd T(N, 2 * m + 1);
  for (int k = 0; k < N; ++k) {
    for (int j = 0; j <= m; ++j) T(k, j) = std::cos(double(k) * j * pi / n);
    for (int j = m + 1; j <= 2 * m; ++j) T(k, j) = std::sin(double(k) * (j - m) * pi / n);
  }
  return T;
}

RadialError radial_error(const RadialFunction& reconstructed, const RadialFunction& truth,
                         int n_fine) {
  const auto t = grid_nodes(n_fine);
  double num = 0.0, den = 0.0, sup = 0.0;
  for (int j = 0; j < t.size(); ++j) {
    const double a = reconstructed.eval(t[j]).r;
    const double b = truth.eval(t[j]).r;
    num += (a - b) * (a - b);
    den += b * b;
    sup = std::max(sup, std::abs(a - b));
  }
  return {std::sqrt(num / den), sup};
}

void write_curve_csv(std::ostream& out, const BoundaryCurve& c) {
  out << "t,r,x,y,nx,ny\n" << std::setprecision(17);
  for (int j = 0; j < c.size(); ++j) {
    out << c.t[j] << ',' << c.r[j] << ',' << c.x[j] << ',' << c.y[j] << ',' << c.nx[j] << ','
        << c.ny[j] << '\n';
  }
}

}  // namespace cylscat
