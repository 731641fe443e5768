#include "hdgml/block_csr.hpp"

#include <algorithm>
#include <stdexcept>

namespace hdgml {

BlockCsr::BlockCsr(int block_size, const std::vector<std::vector<int>>& pattern) : bs_(block_size) {
  if (bs_ < 1) throw std::invalid_argument("BlockCsr: block size must be positive");
  row_ptr_.assign(pattern.size() + 1, 0);
  for (std::size_t r = 0; r < pattern.size(); ++r)
    row_ptr_[r + 1] = row_ptr_[r] + static_cast<long long>(pattern[r].size());
  col_.reserve(row_ptr_.back());
  for (const auto& cols : pattern) {
    if (!std::is_sorted(cols.begin(), cols.end()))
      throw std::invalid_argument("BlockCsr: pattern rows must be sorted");
    col_.insert(col_.end(), cols.begin(), cols.end());
  }
  values_.assign(static_cast<std::size_t>(row_ptr_.back()) * bs_ * bs_, 0.0);
}

long long BlockCsr::find(int r, int c) const {
  const auto first = col_.begin() + row_ptr_[r];
  const auto last = col_.begin() + row_ptr_[r + 1];
  const auto it = std::lower_bound(first, last, c);
  if (it == last || *it != c) return -1;
  return it - col_.begin();
}

void BlockCsr::set_zero() { std::fill(values_.begin(), values_.end(), 0.0); }

Eigen::VectorXd BlockCsr::multiply(const Eigen::VectorXd& x, Exec exec) const {
  Eigen::VectorXd y(rows());
  multiply(x, y, exec);
  return y;
}

void BlockCsr::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y, Exec exec) const {
  if (x.size() != rows()) throw std::invalid_argument("BlockCsr::multiply: dimension mismatch");
  y.resize(rows());
  if (exec == Exec::serial)
    kernels::serial::bsr_multiply(*this, x, y);
  else
    kernels::omp::bsr_multiply(*this, x, y);
}

namespace {

inline void bsr_row(const BlockCsr& a, int r, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const int bs = a.block_size();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(bs);
  const auto& ptr = a.row_ptr();
  const auto& col = a.col_index();
  for (long long k = ptr[r]; k < ptr[r + 1]; ++k)
    acc.noalias() += a.block(k) * x.segment(static_cast<Eigen::Index>(col[k]) * bs, bs);
  y.segment(static_cast<Eigen::Index>(r) * bs, bs) = acc;
}

}  // namespace

namespace kernels {
namespace serial {
void bsr_multiply(const BlockCsr& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  for (int r = 0; r < a.block_rows(); ++r) bsr_row(a, r, x, y);
}
}  // namespace serial

namespace omp {
void bsr_multiply(const BlockCsr& a, const Eigen::VectorXd& x, Eigen::VectorXd& y) {
  const int n = a.block_rows();
#pragma omp parallel for schedule(static)
  for (int r = 0; r < n; ++r) bsr_row(a, r, x, y);
}
}  // namespace omp
}  // namespace kernels

Eigen::SparseMatrix<double> BlockCsr::to_sparse() const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(nonzeros()));
  for (int r = 0; r < block_rows(); ++r)
    for (long long k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      const auto b = block(k);
      for (int j = 0; j < bs_; ++j)
        for (int i = 0; i < bs_; ++i)
          if (b(i, j) != 0.0) trip.emplace_back(r * bs_ + i, col_[k] * bs_ + j, b(i, j));
    }
  Eigen::SparseMatrix<double> s(rows(), rows());
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

Eigen::MatrixXd BlockCsr::to_dense() const { return Eigen::MatrixXd(to_sparse()); }

SegmentMatrix::SegmentMatrix(std::vector<int> segment_sizes) : sizes_(std::move(segment_sizes)) {
  offsets_.resize(sizes_.size() + 1);
  offsets_[0] = 0;
  for (std::size_t s = 0; s < sizes_.size(); ++s) offsets_[s + 1] = offsets_[s] + sizes_[s];
  rows_.resize(sizes_.size());
}

Eigen::MatrixXd& SegmentMatrix::block(int r, int c) {
  auto [it, inserted] = rows_[r].try_emplace(c);
  if (inserted) it->second = Eigen::MatrixXd::Zero(sizes_[r], sizes_[c]);
  return it->second;
}

const Eigen::MatrixXd* SegmentMatrix::find(int r, int c) const {
  const auto it = rows_[r].find(c);
  return it == rows_[r].end() ? nullptr : &it->second;
}

Eigen::VectorXd SegmentMatrix::multiply(const Eigen::VectorXd& x) const {
  if (x.size() != rows()) throw std::invalid_argument("SegmentMatrix::multiply: dimension mismatch");
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows());
  for (int r = 0; r < segments(); ++r)
    for (const auto& [c, b] : rows_[r])
      y.segment(offsets_[r], sizes_[r]).noalias() += b * x.segment(offsets_[c], sizes_[c]);
  return y;
}

Eigen::MatrixXd SegmentMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows(), rows());
  for (int r = 0; r < segments(); ++r)
    for (const auto& [c, b] : rows_[r]) d.block(offsets_[r], offsets_[c], sizes_[r], sizes_[c]) = b;
  return d;
}

long long SegmentMatrix::stored_entries() const {
  long long total = 0;
  for (const auto& row : rows_)
    for (const auto& [c, b] : row) total += b.size();
  return total;
}

}  // namespace hdgml
