#pragma once

// Nested-dissection Schur elimination of the level-1 matrix (the ML/EML coarse
// direct solver), block-Jacobi smoothing on the fine trace system, and the
// two-level v-cycle built from them.

#include "hdgml/block_csr.hpp"
#include "hdgml/projection.hpp"

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace hdgml {

class SingularFront : public std::runtime_error {
 public:
  SingularFront(int level, int front, const std::string& what)
      : std::runtime_error(what), level_(level), front_(front) {}
  int level() const { return level_; }
  int front() const { return front_; }

 private:
  int level_;
  int front_;
};

struct FactorCounters {
  double factor_flops = 0.0;  // sum of m^3 over factored fronts
  double memory = 0.0;        // sum of m^2
  long long stored_entries = 0;  // LU + coupling blocks actually kept
  std::vector<std::vector<int>> front_sizes;  // [level - 1][front]
  double factor_seconds = 0.0;
};

/// Dense copy of the partially eliminated matrix before level k is factored.
struct LevelSnapshot {
  int level = 0;
  std::vector<int> segments;  // remaining segments, increasing id
  std::vector<int> interior;  // subset eliminated at this level
  Eigen::MatrixXd matrix;     // over `segments`, offsets by cumulative size
};

struct FactorOptions {
  Exec exec = Exec::parallel;
  bool keep_snapshots = false;
  double pivot_tolerance = 1e-14;
};

class MultilevelFactorization {
 public:
  /// fronts[k - 1][f] lists the segments eliminated with front f of level k.
  MultilevelFactorization(SegmentMatrix a, const std::vector<std::vector<std::vector<int>>>& fronts,
                          FactorOptions options = {});

  int size() const { return static_cast<int>(offsets_.back()); }
  int levels() const { return static_cast<int>(levels_.size()); }
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

  const FactorCounters& counters() const { return counters_; }
  const std::vector<LevelSnapshot>& snapshots() const { return snapshots_; }

 private:
  struct Front {
    int level = 0;
    int index = 0;
    std::vector<int> interior;
    std::vector<int> boundary;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    Eigen::MatrixXd w;     // A_II^-1 A_IB
    Eigen::MatrixXd a_bi;  // A_BI
    Eigen::MatrixXd schur; // A_BI W, released after the scatter
  };

  Eigen::VectorXd gather(const Eigen::VectorXd& x, const std::vector<int>& segs) const;
  void scatter_add(Eigen::VectorXd& x, const std::vector<int>& segs, const Eigen::VectorXd& v, double sign) const;
  void factor_front(const SegmentMatrix& a, Front& f) const;

  std::vector<int> sizes_;
  std::vector<int> offsets_;
  std::vector<std::vector<Front>> levels_;
  FactorCounters counters_;
  std::vector<LevelSnapshot> snapshots_;
  FactorOptions options_;
};

/// Undamped block-Jacobi with one (p+1) x (p+1) block per fine edge.
class BlockJacobiSmoother {
 public:
  explicit BlockJacobiSmoother(const BlockCsr& a);

  int blocks() const { return static_cast<int>(inv_.size()); }
  /// D^-1 r.
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& r, Exec exec = Exec::parallel) const;
  /// m sweeps of x <- x + D^-1 (b - A x).
  void smooth(const BlockCsr& a, Eigen::VectorXd& x, const Eigen::VectorXd& b, int steps,
              Exec exec = Exec::parallel) const;

 private:
  int bs_;
  std::vector<Eigen::MatrixXd> inv_;
};

namespace kernels {
namespace serial {
void block_jacobi_apply(const std::vector<Eigen::MatrixXd>& inv, const Eigen::VectorXd& r, Eigen::VectorXd& z);
}
namespace omp {
void block_jacobi_apply(const std::vector<Eigen::MatrixXd>& inv, const Eigen::VectorXd& r, Eigen::VectorXd& z);
}
}  // namespace kernels

struct VCycleConfig {
  int pre_steps = 2;
  int post_steps = 2;
  Exec exec = Exec::parallel;
};

/// One two-level cycle: pre-smoothing from zero, coarse correction
/// I0 A1^-1 I0^T, post-smoothing. Residuals are in the dual (assembled) form.
class VCyclePreconditioner {
 public:
  VCyclePreconditioner(const BlockCsr& a0, const ProjectionPair& pair, const MultilevelFactorization& coarse,
                       const BlockJacobiSmoother& smoother, VCycleConfig config = {});

  Eigen::VectorXd coarse_correct(const Eigen::VectorXd& r0) const;
  void smooth(Eigen::VectorXd& x, const Eigen::VectorXd& b, int steps) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& r0) const;
  const VCycleConfig& config() const { return config_; }

 private:
  const BlockCsr& a0_;
  const ProjectionPair& pair_;
  const MultilevelFactorization& coarse_;
  const BlockJacobiSmoother& smoother_;
  VCycleConfig config_;
};

}  // namespace hdgml
