#pragma once

// Block sparse storage for trace systems.
//
// BlockCsr: uniform square blocks (one block per pair of coupled edges), the
// layout of the fine trace matrix. SegmentMatrix: variable block sizes keyed by
// segment pairs, used for the lumped/enriched coarse matrix and its Schur
// complements.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <map>
#include <vector>

namespace hdgml {

/// Selects the serial reference kernel or the OpenMP kernel.
enum class Exec { serial, parallel };

class BlockCsr {
 public:
  BlockCsr() = default;
  /// Builds the pattern from sorted, duplicate-free column lists per block row.
  BlockCsr(int block_size, const std::vector<std::vector<int>>& pattern);

  int block_size() const { return bs_; }
  int block_rows() const { return static_cast<int>(row_ptr_.size()) - 1; }
  int rows() const { return block_rows() * bs_; }
  long long nonzero_blocks() const { return static_cast<long long>(col_.size()); }
  long long nonzeros() const { return nonzero_blocks() * bs_ * bs_; }

  const std::vector<long long>& row_ptr() const { return row_ptr_; }
  const std::vector<int>& col_index() const { return col_; }

  /// Slot of block (r, c) or -1.
  long long find(int r, int c) const;
  Eigen::Map<Eigen::MatrixXd> block(long long slot) {
    return {values_.data() + slot * bs_ * bs_, bs_, bs_};
  }
  Eigen::Map<const Eigen::MatrixXd> block(long long slot) const {
    return {values_.data() + slot * bs_ * bs_, bs_, bs_};
  }
  Eigen::Map<const Eigen::MatrixXd> diagonal_block(int r) const { return block(find(r, r)); }

  void set_zero();
  Eigen::VectorXd multiply(const Eigen::VectorXd& x, Exec exec = Exec::parallel) const;
  void multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y, Exec exec = Exec::parallel) const;

  Eigen::SparseMatrix<double> to_sparse() const;
  Eigen::MatrixXd to_dense() const;

 private:
  int bs_ = 0;
  std::vector<long long> row_ptr_{0};
  std::vector<int> col_;
  std::vector<double> values_;
};

namespace kernels {
namespace serial {
void bsr_multiply(const BlockCsr& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
}
namespace omp {
void bsr_multiply(const BlockCsr& a, const Eigen::VectorXd& x, Eigen::VectorXd& y);
}
}  // namespace kernels

class SegmentMatrix {
 public:
  SegmentMatrix() = default;
  explicit SegmentMatrix(std::vector<int> segment_sizes);

  int segments() const { return static_cast<int>(sizes_.size()); }
  int segment_size(int s) const { return sizes_[s]; }
  int offset(int s) const { return offsets_[s]; }
  int rows() const { return offsets_.back(); }
  const std::vector<int>& sizes() const { return sizes_; }

  /// Zero-initialised on first access.
  Eigen::MatrixXd& block(int r, int c);
  const Eigen::MatrixXd* find(int r, int c) const;
  const std::map<int, Eigen::MatrixXd>& row(int r) const { return rows_[r]; }
  std::map<int, Eigen::MatrixXd>& row(int r) { return rows_[r]; }
  void clear_row(int r) { rows_[r].clear(); }

  Eigen::VectorXd multiply(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd to_dense() const;
  long long stored_entries() const;

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_{0};
  std::vector<std::map<int, Eigen::MatrixXd>> rows_;
};

}  // namespace hdgml
