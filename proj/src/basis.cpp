#include "hdgml/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hdgml {

void legendre(int n, double x, double& value, double& derivative) {
  double p0 = 1.0;
  double p1 = x;
  double d0 = 0.0;
  double d1 = 1.0;
  if (n == 0) {
    value = 1.0;
    derivative = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    const double d2 = d0 + (2.0 * k - 1.0) * p1;
    p0 = p1;
    p1 = p2;
    d0 = d1;
    d1 = d2;
  }
  value = p1;
  derivative = d1;
}

QuadratureRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  QuadratureRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    // Chebyshev initial guess, then Newton.
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double v = 0.0;
    double d = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(n, x, v, d);
      const double dx = v / d;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    legendre(n, x, v, d);
    rule.points[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * d * d);
  }
  return rule;
}

std::vector<double> gll_nodes(int p) {
  if (p < 1) throw std::invalid_argument("gll_nodes: order must be >= 1");
  std::vector<double> x(p + 1);
  x[0] = -1.0;
  x[p] = 1.0;
  // Interior nodes are roots of P_p'; P_p'' from the Legendre ODE.
  for (int i = 1; i < p; ++i) {
    double t = -std::cos(std::numbers::pi * i / p);
    for (int it = 0; it < 100; ++it) {
      double v = 0.0;
      double d = 0.0;
      legendre(p, t, v, d);
      const double dd = (2.0 * t * d - p * (p + 1.0) * v) / (1.0 - t * t);
      const double dt = d / dd;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = t;
  }
  return x;
}

LagrangeBasis::LagrangeBasis(int order) : order_(order), nodes_(gll_nodes(order)) {}

double LagrangeBasis::value(int i, double x) const {
  double v = 1.0;
  for (int k = 0; k < size(); ++k)
    if (k != i) v *= (x - nodes_[k]) / (nodes_[i] - nodes_[k]);
  return v;
}

double LagrangeBasis::derivative(int i, double x) const {
  // Sum over the factor being differentiated; stable at the nodes.
  double sum = 0.0;
  for (int m = 0; m < size(); ++m) {
    if (m == i) continue;
    double prod = 1.0 / (nodes_[i] - nodes_[m]);
    for (int k = 0; k < size(); ++k)
      if (k != i && k != m) prod *= (x - nodes_[k]) / (nodes_[i] - nodes_[k]);
    sum += prod;
  }
  return sum;
}

Eigen::MatrixXd LagrangeBasis::values(const std::vector<double>& points) const {
  Eigen::MatrixXd v(points.size(), size());
  for (std::size_t r = 0; r < points.size(); ++r)
    for (int i = 0; i < size(); ++i) v(r, i) = value(i, points[r]);
  return v;
}

Eigen::MatrixXd LagrangeBasis::derivatives(const std::vector<double>& points) const {
  Eigen::MatrixXd v(points.size(), size());
  for (std::size_t r = 0; r < points.size(); ++r)
    for (int i = 0; i < size(); ++i) v(r, i) = derivative(i, points[r]);
  return v;
}

Eigen::MatrixXd LagrangeBasis::mass() const {
  const auto rule = gauss_legendre(order_ + 1);
  const Eigen::MatrixXd phi = values(rule.points);
  const Eigen::Map<const Eigen::VectorXd> w(rule.weights.data(), rule.size());
  return phi.transpose() * w.asDiagonal() * phi;
}

}  // namespace hdgml
