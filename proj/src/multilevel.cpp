#include "hdgml/multilevel.hpp"

#include <algorithm>
#include <chrono>
#include <exception>

namespace hdgml {

MultilevelFactorization::MultilevelFactorization(SegmentMatrix a,
                                                 const std::vector<std::vector<std::vector<int>>>& fronts,
                                                 FactorOptions options)
    : sizes_(a.sizes()), options_(options) {
  offsets_.assign(sizes_.size() + 1, 0);
  for (std::size_t s = 0; s < sizes_.size(); ++s) offsets_[s + 1] = offsets_[s] + sizes_[s];

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<char> eliminated(sizes_.size(), 0);
  {
    std::vector<char> listed(sizes_.size(), 0);
    for (const auto& lvl : fronts)
      for (const auto& fr : lvl)
        for (int s : fr)
          if (s >= 0 && s < a.segments()) listed[s] = 1;
    for (std::size_t s = 0; s < listed.size(); ++s)
      if (!listed[s])
        throw std::invalid_argument("MultilevelFactorization: segment " + std::to_string(s) + " is never eliminated");
  }
  levels_.resize(fronts.size());
  counters_.front_sizes.resize(fronts.size());

  for (std::size_t k = 0; k < fronts.size(); ++k) {
    auto& lv = levels_[k];
    lv.resize(fronts[k].size());
    for (std::size_t f = 0; f < lv.size(); ++f) {
      lv[f].level = static_cast<int>(k) + 1;
      lv[f].index = static_cast<int>(f);
      lv[f].interior = fronts[k][f];
      for (int s : lv[f].interior) {
        if (s < 0 || s >= a.segments() || eliminated[s])
          throw std::invalid_argument("MultilevelFactorization: segment " + std::to_string(s) +
                                      " is invalid or listed twice");
        eliminated[s] = 2;  // scheduled at this level
      }
    }

    if (options_.keep_snapshots) {
      LevelSnapshot snap;
      snap.level = static_cast<int>(k) + 1;
      std::vector<int> local(sizes_.size(), -1);
      int n = 0;
      for (int s = 0; s < a.segments(); ++s)
        if (eliminated[s] != 1) {
          local[s] = n;
          n += sizes_[s];
          snap.segments.push_back(s);
          if (eliminated[s] == 2) snap.interior.push_back(s);
        }
      snap.matrix = Eigen::MatrixXd::Zero(n, n);
      for (int s : snap.segments)
        for (const auto& [c, blk] : a.row(s))
          if (local[c] >= 0) snap.matrix.block(local[s], local[c], sizes_[s], sizes_[c]) = blk;
      snapshots_.push_back(std::move(snap));
    }

    std::exception_ptr failure;
    const int nf = static_cast<int>(lv.size());
    if (options_.exec == Exec::serial) {
      for (int f = 0; f < nf; ++f) factor_front(a, lv[f]);
    } else {
#pragma omp parallel for schedule(dynamic, 4)
      for (int f = 0; f < nf; ++f) {
        try {
          factor_front(a, lv[f]);
        } catch (...) {
#pragma omp critical(hdgml_front_failure)
          if (!failure) failure = std::current_exception();
        }
      }
      if (failure) std::rethrow_exception(failure);
    }

    auto& sizes_out = counters_.front_sizes[k];
    for (auto& fr : lv) {
      int pos_r = 0;
      for (int br : fr.boundary) {
        int pos_c = 0;
        for (int bc : fr.boundary) {
          a.block(br, bc) -= fr.schur.block(pos_r, pos_c, sizes_[br], sizes_[bc]);
          pos_c += sizes_[bc];
        }
        pos_r += sizes_[br];
      }
      for (int i : fr.interior) a.clear_row(i);
      for (int b : fr.boundary)
        for (int i : fr.interior) a.row(b).erase(i);
      fr.schur = Eigen::MatrixXd();

      const int m = static_cast<int>(fr.lu.rows());
      sizes_out.push_back(m);
      counters_.factor_flops += static_cast<double>(m) * m * m;
      counters_.memory += static_cast<double>(m) * m;
      counters_.stored_entries += static_cast<long long>(m) * m + fr.w.size() + fr.a_bi.size();
    }
    for (auto& fr : lv)
      for (int s : fr.interior) eliminated[s] = 1;
  }
  counters_.factor_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void MultilevelFactorization::factor_front(const SegmentMatrix& a, Front& f) const {
  std::vector<int> loc_i;
  int m = 0;
  for (int s : f.interior) {
    loc_i.push_back(m);
    m += sizes_[s];
  }
  auto in_interior = [&](int s) { return std::find(f.interior.begin(), f.interior.end(), s) != f.interior.end(); };
  for (int s : f.interior)
    for (const auto& entry : a.row(s))
      if (!in_interior(entry.first)) f.boundary.push_back(entry.first);
  std::sort(f.boundary.begin(), f.boundary.end());
  f.boundary.erase(std::unique(f.boundary.begin(), f.boundary.end()), f.boundary.end());
  std::vector<int> loc_b;
  int nb = 0;
  for (int s : f.boundary) {
    loc_b.push_back(nb);
    nb += sizes_[s];
  }

  Eigen::MatrixXd a_ii = Eigen::MatrixXd::Zero(m, m);
  Eigen::MatrixXd a_ib = Eigen::MatrixXd::Zero(m, nb);
  f.a_bi = Eigen::MatrixXd::Zero(nb, m);
  for (std::size_t r = 0; r < f.interior.size(); ++r) {
    const int sr = f.interior[r];
    for (std::size_t c = 0; c < f.interior.size(); ++c)
      if (const auto* blk = a.find(sr, f.interior[c])) a_ii.block(loc_i[r], loc_i[c], blk->rows(), blk->cols()) = *blk;
    for (std::size_t c = 0; c < f.boundary.size(); ++c) {
      if (const auto* blk = a.find(sr, f.boundary[c])) a_ib.block(loc_i[r], loc_b[c], blk->rows(), blk->cols()) = *blk;
      if (const auto* blk = a.find(f.boundary[c], sr)) f.a_bi.block(loc_b[c], loc_i[r], blk->rows(), blk->cols()) = *blk;
    }
  }

  f.lu.compute(a_ii);
  const double rc = m ? f.lu.rcond() : 1.0;
  if (!(rc > options_.pivot_tolerance))
    throw SingularFront(f.level, f.index,
                        "MultilevelFactorization: singular front (level " + std::to_string(f.level) + ", front " +
                            std::to_string(f.index) + ", rcond " + std::to_string(rc) + ")");
  f.w = f.lu.solve(a_ib);
  f.schur = f.a_bi * f.w;
}

Eigen::VectorXd MultilevelFactorization::gather(const Eigen::VectorXd& x, const std::vector<int>& segs) const {
  int n = 0;
  for (int s : segs) n += sizes_[s];
  Eigen::VectorXd out(n);
  int pos = 0;
  for (int s : segs) {
    out.segment(pos, sizes_[s]) = x.segment(offsets_[s], sizes_[s]);
    pos += sizes_[s];
  }
  return out;
}

void MultilevelFactorization::scatter_add(Eigen::VectorXd& x, const std::vector<int>& segs, const Eigen::VectorXd& v,
                                          double sign) const {
  int pos = 0;
  for (int s : segs) {
    x.segment(offsets_[s], sizes_[s]) += sign * v.segment(pos, sizes_[s]);
    pos += sizes_[s];
  }
}

Eigen::VectorXd MultilevelFactorization::solve(const Eigen::VectorXd& b) const {
  if (b.size() != size()) throw std::invalid_argument("MultilevelFactorization::solve: dimension mismatch");
  Eigen::VectorXd x = b;
  const bool par = options_.exec == Exec::parallel;
  for (const auto& lv : levels_) {
    const int nf = static_cast<int>(lv.size());
    std::vector<Eigen::VectorXd> upd(nf);
#pragma omp parallel for schedule(dynamic, 16) if (par)
    for (int f = 0; f < nf; ++f) {
      const Eigen::VectorXd xi = lv[f].lu.solve(gather(x, lv[f].interior));
      int pos = 0;
      for (int s : lv[f].interior) {
        x.segment(offsets_[s], sizes_[s]) = xi.segment(pos, sizes_[s]);
        pos += sizes_[s];
      }
      upd[f] = lv[f].a_bi * xi;
    }
    for (int f = 0; f < nf; ++f) scatter_add(x, lv[f].boundary, upd[f], -1.0);
  }
  for (auto it = levels_.rbegin(); it != levels_.rend(); ++it) {
    const auto& lv = *it;
    const int nf = static_cast<int>(lv.size());
#pragma omp parallel for schedule(dynamic, 16) if (par)
    for (int f = 0; f < nf; ++f) {
      if (lv[f].boundary.empty()) continue;
      const Eigen::VectorXd corr = lv[f].w * gather(x, lv[f].boundary);
      int pos = 0;
      for (int s : lv[f].interior) {
        x.segment(offsets_[s], sizes_[s]) -= corr.segment(pos, sizes_[s]);
        pos += sizes_[s];
      }
    }
  }
  return x;
}

BlockJacobiSmoother::BlockJacobiSmoother(const BlockCsr& a) : bs_(a.block_size()) {
  inv_.resize(a.block_rows());
  for (int r = 0; r < a.block_rows(); ++r) {
    const long long slot = a.find(r, r);
    if (slot < 0) throw std::invalid_argument("BlockJacobiSmoother: missing diagonal block " + std::to_string(r));
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Eigen::MatrixXd(a.block(slot)));
    if (!(lu.rcond() > 1e-14))
      throw std::runtime_error("BlockJacobiSmoother: singular diagonal block on edge unknown " + std::to_string(r));
    inv_[r] = lu.inverse();
  }
}

namespace kernels {
namespace serial {
void block_jacobi_apply(const std::vector<Eigen::MatrixXd>& inv, const Eigen::VectorXd& r, Eigen::VectorXd& z) {
  const int n = static_cast<int>(inv.size());
  for (int b = 0; b < n; ++b) {
    const auto bs = inv[b].rows();
    z.segment(b * bs, bs).noalias() = inv[b] * r.segment(b * bs, bs);
  }
}
}  // namespace serial
namespace omp {
void block_jacobi_apply(const std::vector<Eigen::MatrixXd>& inv, const Eigen::VectorXd& r, Eigen::VectorXd& z) {
  const int n = static_cast<int>(inv.size());
#pragma omp parallel for schedule(static)
  for (int b = 0; b < n; ++b) {
    const auto bs = inv[b].rows();
    z.segment(b * bs, bs).noalias() = inv[b] * r.segment(b * bs, bs);
  }
}
}  // namespace omp
}  // namespace kernels

Eigen::VectorXd BlockJacobiSmoother::apply_inverse(const Eigen::VectorXd& r, Exec exec) const {
  if (r.size() != static_cast<Eigen::Index>(inv_.size()) * bs_)
    throw std::invalid_argument("BlockJacobiSmoother: dimension mismatch");
  Eigen::VectorXd z(r.size());
  if (exec == Exec::serial)
    kernels::serial::block_jacobi_apply(inv_, r, z);
  else
    kernels::omp::block_jacobi_apply(inv_, r, z);
  return z;
}

void BlockJacobiSmoother::smooth(const BlockCsr& a, Eigen::VectorXd& x, const Eigen::VectorXd& b, int steps,
                                 Exec exec) const {
  Eigen::VectorXd ax(x.size());
  for (int s = 0; s < steps; ++s) {
    a.multiply(x, ax, exec);
    x += apply_inverse(b - ax, exec);
  }
}

VCyclePreconditioner::VCyclePreconditioner(const BlockCsr& a0, const ProjectionPair& pair,
                                           const MultilevelFactorization& coarse, const BlockJacobiSmoother& smoother,
                                           VCycleConfig config)
    : a0_(a0), pair_(pair), coarse_(coarse), smoother_(smoother), config_(config) {
  if (pair.fine_size() != a0.rows() || pair.coarse_size() != coarse.size())
    throw std::invalid_argument("VCyclePreconditioner: dimension mismatch");
}

Eigen::VectorXd VCyclePreconditioner::coarse_correct(const Eigen::VectorXd& r0) const {
  return pair_.prolong(coarse_.solve(pair_.prolong_transpose(r0)));
}

void VCyclePreconditioner::smooth(Eigen::VectorXd& x, const Eigen::VectorXd& b, int steps) const {
  smoother_.smooth(a0_, x, b, steps, config_.exec);
}

Eigen::VectorXd VCyclePreconditioner::apply(const Eigen::VectorXd& r0) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(r0.size());
  smooth(x, r0, config_.pre_steps);
  if (config_.pre_steps > 0)
    x += coarse_correct(r0 - a0_.multiply(x, config_.exec));
  else
    x = coarse_correct(r0);
  smooth(x, r0, config_.post_steps);
  return x;
}

}  // namespace hdgml
