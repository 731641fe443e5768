#pragma once

// Upwind HDG discretization of -div(K grad u) + div(beta u) = f on structured
// quadrilateral meshes: element-local solvers, static condensation onto the
// skeleton, and element-by-element recovery of (u, sigma).
//
// Volume fields use the tensor-product GLL nodal basis of Q^p (node a + (p+1) b
// sits at (xi_a, eta_b)); traces use the GLL nodal basis of order p along each
// edge, parameterised by increasing coordinate.

#include "hdgml/basis.hpp"
#include "hdgml/block_csr.hpp"
#include "hdgml/mesh.hpp"

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hdgml {

enum class TransportMode { diffusive, pure_transport };

struct ProblemCoefficients {
  TransportMode mode = TransportMode::diffusive;
  /// Evaluated once per element at its centre; must be SPD in diffusive mode.
  std::function<Eigen::Matrix2d(double, double)> K;
  std::function<std::array<double, 2>(double, double)> beta;
  std::function<double(double, double)> f;
  /// Dirichlet data (diffusive) or inflow data (pure transport).
  std::function<double(double, double)> g;
  /// K and beta are constant in space, so every element shares one local operator.
  bool uniform = false;
};

/// Upwind stabilization 1/2 (sqrt(|b.n|^2 + 4) - b.n); always > 0.
double stabilization_tau(double beta_dot_n);

class SingularLocalSolver : public std::runtime_error {
 public:
  SingularLocalSolver(int element, const std::string& what)
      : std::runtime_error(what), element_(element) {}
  int element() const { return element_; }

 private:
  int element_;
};

/// Reference-element data for order p and one element size.
class ReferenceElement {
 public:
  ReferenceElement(int order, double hx, double hy);

  int order() const { return p_; }
  int trace_size() const { return p_ + 1; }     // q
  int volume_size() const { return nb_; }        // (p+1)^2
  double hx() const { return hx_; }
  double hy() const { return hy_; }

  const LagrangeBasis& basis() const { return basis_; }
  const QuadratureRule& line_rule() const { return line_; }
  /// Quadrature node r of the volume rule in reference coordinates.
  double xi(int r) const { return line_.points[r % nq1_]; }
  double eta(int r) const { return line_.points[r / nq1_]; }
  double volume_weight(int r) const { return line_.weights[r % nq1_] * line_.weights[r / nq1_]; }
  int volume_points() const { return nq1_ * nq1_; }
  /// Reference coordinates of face point t on face f.
  std::array<double, 2> face_point(int f, double t) const;
  double face_jacobian(int f) const { return (f == south || f == north) ? hx_ / 2 : hy_ / 2; }
  static std::array<double, 2> normal(int f);

  // Basis tables at quadrature points.
  Eigen::MatrixXd phi;                   // nq x nb
  Eigen::MatrixXd dphi_dx, dphi_dy;      // physical derivatives, nq x nb
  std::array<Eigen::MatrixXd, 4> phi_face;  // nqf x nb
  Eigen::MatrixXd psi;                   // nqf x q, trace basis at face points

  // Geometry-only element matrices.
  Eigen::MatrixXd mass, mass_inv;
  Eigen::MatrixXd trace_mass;            // q x q, reference [-1, 1]
  /// sigma-elimination products, indexed [c][d] by tensor component of K.
  std::array<std::array<Eigen::MatrixXd, 2>, 2> b_m_d;  // nb x nb
  std::array<std::array<Eigen::MatrixXd, 2>, 2> b_m_e;  // nb x 4q
  std::array<std::array<Eigen::MatrixXd, 2>, 2> e_m_d;  // 4q x nb
  std::array<std::array<Eigen::MatrixXd, 2>, 2> e_m_e;  // 4q x 4q
  std::array<Eigen::MatrixXd, 2> m_d;  // Minv D_d, nb x nb
  std::array<Eigen::MatrixXd, 2> m_e;  // Minv E_d, nb x 4q

 private:
  int p_;
  int nb_;
  int nq1_;
  double hx_;
  double hy_;
  LagrangeBasis basis_;
  QuadratureRule line_;
};

/// Which edges carry trace unknowns and in what order.
struct TraceLayout {
  std::vector<int> unknown_edges;       // unknown index -> edge id
  std::vector<int> edge_to_unknown;     // edge id -> unknown index or -1
  std::vector<char> outflow;            // per edge: boundary edge kept as unknown
  /// Outflow unknowns grouped by the level-1 front whose 2x2 block holds them
  /// (only filled when built with a hierarchy).
  std::vector<std::vector<int>> level1_extras;

  int size() const { return static_cast<int>(unknown_edges.size()); }
};

/// Diffusive: every boundary edge is Dirichlet. Pure transport: inflow edges
/// (integral of beta.n <= 0) are Dirichlet, outflow edges stay unknown.
/// With a hierarchy the unknowns follow nested-dissection order; otherwise edge-id order.
TraceLayout build_trace_layout(const StructuredMesh& mesh, const ProblemCoefficients& coeffs,
                               const SkeletonHierarchy* hierarchy = nullptr);

/// L2 projection of g onto the order-p trace space of one edge.
Eigen::VectorXd project_edge_data(const StructuredMesh& mesh, int edge,
                                  const std::function<double(double, double)>& g, int p);

/// Trace-to-volume maps of one element. Face data is ordered (face, node).
struct LocalElement {
  int element = -1;
  Eigen::MatrixXd u_lambda;      // nb x 4q
  Eigen::VectorXd u_f;           // nb
  Eigen::MatrixXd sigma_lambda;  // 2nb x 4q (x block then y block); empty in transport mode
  Eigen::VectorXd sigma_f;
  /// Conservation residual on the element's faces: trace_matrix * lambda + trace_rhs.
  Eigen::MatrixXd trace_matrix;  // 4q x 4q
  Eigen::VectorXd trace_rhs;     // 4q
};

/// `outflow_faces[f]` marks faces lying on outflow boundary edges that remain unknown.
LocalElement condense_element(const ReferenceElement& ref, const StructuredMesh& mesh, int element,
                              const ProblemCoefficients& coeffs,
                              std::array<bool, 4> outflow_faces = {false, false, false, false});

struct TraceSystem {
  StructuredMesh mesh;
  ProblemCoefficients coeffs;
  int order = 1;
  TraceLayout layout;
  BlockCsr matrix;  // A, blocks of size order+1 over unknown edges
  Eigen::VectorXd rhs;  // g
  /// Projected Dirichlet/inflow data per edge (empty for unknown edges).
  std::vector<Eigen::VectorXd> boundary_values;

  int dofs_per_edge() const { return order + 1; }
  int size() const { return layout.size() * dofs_per_edge(); }
};

TraceSystem assemble_trace_system(const StructuredMesh& mesh, const ProblemCoefficients& coeffs, int order,
                                  const SkeletonHierarchy* hierarchy = nullptr, Exec exec = Exec::parallel);

/// Face-ordered trace values of element e (unknowns from lambda, boundary data otherwise).
Eigen::VectorXd element_trace(const TraceSystem& system, const Eigen::VectorXd& lambda, int element);

struct VolumeSolution {
  std::vector<Eigen::VectorXd> u;      // per element, nb nodal values
  std::vector<Eigen::VectorXd> sigma;  // per element, 2nb (empty in transport mode)
};

VolumeSolution recover_volume(const TraceSystem& system, const Eigen::VectorXd& lambda);

/// Per-unknown-edge conservation residual (the assembled face-jump functional)
/// computed from the recovered volume fields, max-norm per edge.
std::vector<double> conservation_defect(const TraceSystem& system, const Eigen::VectorXd& lambda);

/// Sparse direct solve of the trace system (reference route).
Eigen::VectorXd solve_direct(const TraceSystem& system);

}  // namespace hdgml
