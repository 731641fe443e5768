#pragma once

// One-dimensional polynomial machinery: Gauss quadrature, Gauss-Lobatto-Legendre
// nodes and the nodal Lagrange basis built on them. Everything on [-1, 1].

#include <Eigen/Dense>

#include <vector>

namespace hdgml {

struct QuadratureRule {
  std::vector<double> points;
  std::vector<double> weights;

  int size() const { return static_cast<int>(points.size()); }
};

/// Legendre polynomial P_n and its derivative at x.
void legendre(int n, double x, double& value, double& derivative);

/// n-point Gauss-Legendre rule, exact for degree 2n-1.
QuadratureRule gauss_legendre(int n);

/// Gauss-Lobatto-Legendre nodes for polynomial order p (p+1 nodes, endpoints included).
std::vector<double> gll_nodes(int p);

/// Nodal Lagrange basis of order p on the GLL nodes.
class LagrangeBasis {
 public:
  explicit LagrangeBasis(int order);

  int order() const { return order_; }
  int size() const { return order_ + 1; }
  const std::vector<double>& nodes() const { return nodes_; }

  double value(int i, double x) const;
  double derivative(int i, double x) const;

  /// Row r holds all basis values at points[r].
  Eigen::MatrixXd values(const std::vector<double>& points) const;
  Eigen::MatrixXd derivatives(const std::vector<double>& points) const;

  /// Reference mass matrix on [-1, 1] (exact quadrature).
  Eigen::MatrixXd mass() const;

 private:
  int order_;
  std::vector<double> nodes_;
};

}  // namespace hdgml
