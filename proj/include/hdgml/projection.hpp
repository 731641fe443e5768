#pragma once

// Level-0 <-> level-1 transfer for the multilevel solvers.
//
// The level-1 space is a list of segments. A lumped segment carries one
// polynomial of order `order` along a whole separator arm; an identity segment
// keeps the fine trace dofs of its edges unchanged. Outflow-boundary unknowns
// (transport) become their own single-edge segments attached to a level-1 front.

#include "hdgml/block_csr.hpp"
#include "hdgml/hdg.hpp"
#include "hdgml/mesh.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace hdgml {

enum class CoarseKind { ml, eml, identity };

CoarseKind parse_coarse_kind(const std::string& s);
std::string coarse_kind_name(CoarseKind k);

struct EnrichmentSchedule {
  CoarseKind kind = CoarseKind::ml;
  int base_order = 1;
  int cap = 10;

  /// Polynomial order on a level-k lumped edge.
  int order(int level) const;
};

struct CoarseSegment {
  int level = 1;
  int front = 0;
  int arm = -1;               // -1 for an outflow-boundary segment
  std::vector<int> unknowns;  // fine unknown indices (TraceLayout), increasing coordinate
  std::vector<int> edges;     // matching mesh edge ids
  int order = 1;
  bool identity = false;
  double length = 0.0;

  int size(int fine_dofs) const {
    return identity ? static_cast<int>(unknowns.size()) * fine_dofs : order + 1;
  }
};

struct CoarseSpace {
  EnrichmentSchedule schedule;
  int fine_dofs = 2;  // p + 1
  std::vector<CoarseSegment> segments;
  /// fronts[k - 1][f] lists the segment ids owned by level-k front f.
  std::vector<std::vector<std::vector<int>>> fronts;
  std::vector<int> segment_of_unknown;
  std::vector<int> position_of_unknown;  // index inside its segment

  std::vector<int> segment_sizes() const;
  int size() const;
};

/// Requires a layout built with the same hierarchy.
CoarseSpace build_coarse_space(const SkeletonHierarchy& hierarchy, const TraceLayout& layout,
                               const EnrichmentSchedule& schedule);

/// I0 (level 1 -> level 0) and its L2 adjoint Q1 = M1^-1 I0^T M0.
class ProjectionPair {
 public:
  ProjectionPair(CoarseSpace space, const StructuredMesh& mesh);

  const CoarseSpace& space() const { return space_; }
  int fine_size() const { return fine_size_; }
  int coarse_size() const { return coarse_size_; }

  /// Block of I0 for a fine unknown edge: q x (order+1). Empty for identity segments.
  const Eigen::MatrixXd& fine_block(int unknown) const { return block_table_[block_id_[unknown]]; }
  const Eigen::MatrixXd& fine_mass(int unknown) const { return fine_mass_table_[fine_mass_id_[unknown]]; }
  /// Mass of a lumped or single-edge segment (empty for multi-edge identity segments).
  const Eigen::MatrixXd& coarse_mass(int segment) const { return coarse_mass_[segment]; }

  Eigen::VectorXd prolong(const Eigen::VectorXd& coarse) const;        // I0
  Eigen::VectorXd prolong_transpose(const Eigen::VectorXd& fine) const;  // I0^T (dual residuals)
  Eigen::VectorXd restrict_function(const Eigen::VectorXd& fine) const;  // Q1
  Eigen::VectorXd fine_mass_apply(const Eigen::VectorXd& fine) const;    // M0
  Eigen::VectorXd coarse_mass_apply(const Eigen::VectorXd& coarse) const;  // M1

  Eigen::SparseMatrix<double> prolongation_matrix() const;

 private:
  CoarseSpace space_;
  int fine_size_ = 0;
  int coarse_size_ = 0;
  std::vector<int> coarse_offset_;
  // Blocks depend only on (order, piece, pieces) and masses only on edge length.
  std::vector<Eigen::MatrixXd> block_table_;
  std::vector<int> block_id_;
  std::vector<Eigen::MatrixXd> fine_mass_table_;
  std::vector<int> fine_mass_id_;
  std::vector<Eigen::MatrixXd> coarse_mass_;
};

/// Coarse-to-fine L2 projection block on fine edge j of s equal pieces:
/// (p+1) x (order+1), nodal GLL bases on both sides.
Eigen::MatrixXd lumped_projection_block(int fine_order, int coarse_order, int j, int s);

/// A1 = I0^T A0 I0 in the dual (stiffness) representation; as an operator this
/// is Q1 (M0^-1 A0) I0.
SegmentMatrix galerkin_coarse_matrix(const BlockCsr& a0, const ProjectionPair& pair, Exec exec = Exec::parallel);

}  // namespace hdgml
