#include "hdgml/projection.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

namespace hdgml {

CoarseKind parse_coarse_kind(const std::string& s) {
  if (s == "ML" || s == "ml") return CoarseKind::ml;
  if (s == "EML" || s == "eml") return CoarseKind::eml;
  if (s == "ND" || s == "nd" || s == "identity") return CoarseKind::identity;
  throw std::invalid_argument("unknown coarse space '" + s + "'");
}

std::string coarse_kind_name(CoarseKind k) {
  switch (k) {
    case CoarseKind::ml: return "ML";
    case CoarseKind::eml: return "EML";
    case CoarseKind::identity: return "ND";
  }
  return "?";
}

int EnrichmentSchedule::order(int level) const {
  if (kind == CoarseKind::eml) return std::min(base_order + level - 1, cap);
  return base_order;
}

std::vector<int> CoarseSpace::segment_sizes() const {
  std::vector<int> out(segments.size());
  for (std::size_t s = 0; s < segments.size(); ++s) out[s] = segments[s].size(fine_dofs);
  return out;
}

int CoarseSpace::size() const {
  int total = 0;
  for (const auto& s : segments) total += s.size(fine_dofs);
  return total;
}

CoarseSpace build_coarse_space(const SkeletonHierarchy& hierarchy, const TraceLayout& layout,
                               const EnrichmentSchedule& schedule) {
  const int p = schedule.base_order;
  if (p < 1) throw std::invalid_argument("build_coarse_space: order must be >= 1");
  if (schedule.kind == CoarseKind::eml && p > schedule.cap)
    throw std::invalid_argument("build_coarse_space: base order exceeds the enrichment cap");
  const StructuredMesh& mesh = hierarchy.mesh();
  if (static_cast<int>(layout.edge_to_unknown.size()) != mesh.edge_count())
    throw std::invalid_argument("build_coarse_space: layout does not match hierarchy");

  CoarseSpace cs;
  cs.schedule = schedule;
  cs.fine_dofs = p + 1;
  cs.segment_of_unknown.assign(layout.size(), -1);
  cs.position_of_unknown.assign(layout.size(), -1);
  cs.fronts.resize(hierarchy.levels());

  auto add = [&](CoarseSegment seg) {
    const int id = static_cast<int>(cs.segments.size());
    for (std::size_t i = 0; i < seg.unknowns.size(); ++i) {
      const int u = seg.unknowns[i];
      if (cs.segment_of_unknown[u] >= 0) throw std::logic_error("build_coarse_space: unknown in two segments");
      cs.segment_of_unknown[u] = id;
      cs.position_of_unknown[u] = static_cast<int>(i);
    }
    cs.segments.push_back(std::move(seg));
    return id;
  };

  for (int k = 1; k <= hierarchy.levels(); ++k) {
    const auto& fronts = hierarchy.fronts()[k - 1];
    auto& owned = cs.fronts[k - 1];
    owned.resize(fronts.size());
    for (const auto& front : fronts) {
      for (int a = 0; a < 4; ++a) {
        CoarseSegment seg;
        seg.level = k;
        seg.front = front.index;
        seg.arm = a;
        seg.order = schedule.order(k);
        for (int e : front.arms[a]) {
          const int u = layout.edge_to_unknown[e];
          if (u < 0) throw std::logic_error("build_coarse_space: separator edge is not an unknown");
          seg.unknowns.push_back(u);
          seg.edges.push_back(e);
          seg.length += mesh.edge_length(e);
        }
        seg.identity = schedule.kind == CoarseKind::identity || (seg.unknowns.size() == 1 && seg.order == p);
        owned[front.index].push_back(add(std::move(seg)));
      }
      if (k == 1 && !layout.level1_extras.empty()) {
        for (int e : layout.level1_extras[front.index]) {
          CoarseSegment seg;
          seg.level = 1;
          seg.front = front.index;
          seg.order = p;
          seg.identity = true;
          seg.unknowns = {layout.edge_to_unknown[e]};
          seg.edges = {e};
          seg.length = mesh.edge_length(e);
          owned[front.index].push_back(add(std::move(seg)));
        }
      }
    }
  }
  for (int u = 0; u < layout.size(); ++u)
    if (cs.segment_of_unknown[u] < 0) throw std::logic_error("build_coarse_space: unknown without a segment");
  return cs;
}

Eigen::MatrixXd lumped_projection_block(int fine_order, int coarse_order, int j, int s) {
  const LagrangeBasis fine(fine_order);
  const LagrangeBasis coarse(coarse_order);
  const auto rule = gauss_legendre(std::max(coarse_order, fine_order) + 2);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(fine_order + 1, coarse_order + 1);
  const double a = -1.0 + 2.0 * j / s;
  for (int r = 0; r < rule.size(); ++r) {
    const double t = rule.points[r];
    const double x = a + (t + 1.0) / s;
    for (int i = 0; i <= fine_order; ++i) {
      const double wi = rule.weights[r] * fine.value(i, t);
      for (int m = 0; m <= coarse_order; ++m) b(i, m) += wi * coarse.value(m, x);
    }
  }
  return fine.mass().ldlt().solve(b);
}

ProjectionPair::ProjectionPair(CoarseSpace space, const StructuredMesh& mesh) : space_(std::move(space)) {
  const int q = space_.fine_dofs;
  const int p = q - 1;
  const int nu = static_cast<int>(space_.segment_of_unknown.size());
  fine_size_ = nu * q;
  coarse_offset_.resize(space_.segments.size() + 1, 0);
  for (std::size_t s = 0; s < space_.segments.size(); ++s)
    coarse_offset_[s + 1] = coarse_offset_[s] + space_.segments[s].size(q);
  coarse_size_ = coarse_offset_.back();

  const Eigen::MatrixXd mhat = LagrangeBasis(p).mass();
  fine_mass_table_ = {mhat * (mesh.hx() / 2), mhat * (mesh.hy() / 2)};
  fine_mass_id_.assign(nu, 0);

  block_table_.emplace_back();  // id 0: identity segments
  block_id_.assign(nu, 0);
  std::map<std::tuple<int, int, int>, int> ids;
  std::map<int, Eigen::MatrixXd> coarse_ref_mass;

  coarse_mass_.resize(space_.segments.size());
  for (std::size_t sid = 0; sid < space_.segments.size(); ++sid) {
    const CoarseSegment& seg = space_.segments[sid];
    const int s = static_cast<int>(seg.unknowns.size());
    for (int j = 0; j < s; ++j) {
      const int u = seg.unknowns[j];
      fine_mass_id_[u] = mesh.orientation(seg.edges[j]) == Orientation::vertical ? 1 : 0;
      if (seg.identity) continue;
      const auto key = std::make_tuple(seg.order, j, s);
      auto it = ids.find(key);
      if (it == ids.end()) {
        it = ids.emplace(key, static_cast<int>(block_table_.size())).first;
        block_table_.push_back(lumped_projection_block(p, seg.order, j, s));
      }
      block_id_[u] = it->second;
    }
    if (seg.identity) {
      if (s == 1) coarse_mass_[sid] = fine_mass(seg.unknowns[0]);
    } else {
      auto it = coarse_ref_mass.find(seg.order);
      if (it == coarse_ref_mass.end()) it = coarse_ref_mass.emplace(seg.order, LagrangeBasis(seg.order).mass()).first;
      coarse_mass_[sid] = it->second * (seg.length / 2);
    }
  }
}

Eigen::VectorXd ProjectionPair::prolong(const Eigen::VectorXd& coarse) const {
  if (coarse.size() != coarse_size_) throw std::invalid_argument("prolong: dimension mismatch");
  const int q = space_.fine_dofs;
  Eigen::VectorXd fine(fine_size_);
  for (std::size_t sid = 0; sid < space_.segments.size(); ++sid) {
    const CoarseSegment& seg = space_.segments[sid];
    const int off = coarse_offset_[sid];
    for (std::size_t j = 0; j < seg.unknowns.size(); ++j) {
      auto dst = fine.segment(static_cast<Eigen::Index>(seg.unknowns[j]) * q, q);
      if (seg.identity)
        dst = coarse.segment(off + static_cast<int>(j) * q, q);
      else
        dst.noalias() = fine_block(seg.unknowns[j]) * coarse.segment(off, seg.order + 1);
    }
  }
  return fine;
}

Eigen::VectorXd ProjectionPair::prolong_transpose(const Eigen::VectorXd& fine) const {
  if (fine.size() != fine_size_) throw std::invalid_argument("prolong_transpose: dimension mismatch");
  const int q = space_.fine_dofs;
  Eigen::VectorXd coarse = Eigen::VectorXd::Zero(coarse_size_);
  for (std::size_t sid = 0; sid < space_.segments.size(); ++sid) {
    const CoarseSegment& seg = space_.segments[sid];
    const int off = coarse_offset_[sid];
    for (std::size_t j = 0; j < seg.unknowns.size(); ++j) {
      const auto src = fine.segment(static_cast<Eigen::Index>(seg.unknowns[j]) * q, q);
      if (seg.identity)
        coarse.segment(off + static_cast<int>(j) * q, q) = src;
      else
        coarse.segment(off, seg.order + 1).noalias() += fine_block(seg.unknowns[j]).transpose() * src;
    }
  }
  return coarse;
}

Eigen::VectorXd ProjectionPair::fine_mass_apply(const Eigen::VectorXd& fine) const {
  const int q = space_.fine_dofs;
  Eigen::VectorXd out(fine.size());
  for (int u = 0; u < static_cast<int>(fine_mass_id_.size()); ++u)
    out.segment(u * q, q).noalias() = fine_mass(u) * fine.segment(u * q, q);
  return out;
}

Eigen::VectorXd ProjectionPair::coarse_mass_apply(const Eigen::VectorXd& coarse) const {
  const int q = space_.fine_dofs;
  Eigen::VectorXd out(coarse.size());
  for (std::size_t sid = 0; sid < space_.segments.size(); ++sid) {
    const CoarseSegment& seg = space_.segments[sid];
    const int off = coarse_offset_[sid];
    if (seg.identity) {
      for (std::size_t j = 0; j < seg.unknowns.size(); ++j) {
        const int o = off + static_cast<int>(j) * q;
        out.segment(o, q).noalias() = fine_mass(seg.unknowns[j]) * coarse.segment(o, q);
      }
    } else {
      out.segment(off, seg.order + 1).noalias() = coarse_mass_[sid] * coarse.segment(off, seg.order + 1);
    }
  }
  return out;
}

Eigen::VectorXd ProjectionPair::restrict_function(const Eigen::VectorXd& fine) const {
  const int q = space_.fine_dofs;
  Eigen::VectorXd c = prolong_transpose(fine_mass_apply(fine));
  for (std::size_t sid = 0; sid < space_.segments.size(); ++sid) {
    const CoarseSegment& seg = space_.segments[sid];
    const int off = coarse_offset_[sid];
    if (seg.identity) {
      for (std::size_t j = 0; j < seg.unknowns.size(); ++j) {
        const int o = off + static_cast<int>(j) * q;
        c.segment(o, q) = fine_mass(seg.unknowns[j]).ldlt().solve(c.segment(o, q));
      }
    } else {
      c.segment(off, seg.order + 1) = coarse_mass_[sid].ldlt().solve(c.segment(off, seg.order + 1));
    }
  }
  return c;
}

Eigen::SparseMatrix<double> ProjectionPair::prolongation_matrix() const {
  const int q = space_.fine_dofs;
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t sid = 0; sid < space_.segments.size(); ++sid) {
    const CoarseSegment& seg = space_.segments[sid];
    const int off = coarse_offset_[sid];
    for (std::size_t j = 0; j < seg.unknowns.size(); ++j) {
      const int row = seg.unknowns[j] * q;
      if (seg.identity) {
        for (int i = 0; i < q; ++i) trip.emplace_back(row + i, off + static_cast<int>(j) * q + i, 1.0);
      } else {
        const Eigen::MatrixXd& b = fine_block(seg.unknowns[j]);
        for (int c = 0; c < b.cols(); ++c)
          for (int i = 0; i < q; ++i) trip.emplace_back(row + i, off + c, b(i, c));
      }
    }
  }
  Eigen::SparseMatrix<double> m(fine_size_, coarse_size_);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

namespace {

void galerkin_row(const BlockCsr& a0, const ProjectionPair& pair, SegmentMatrix& a1, int s) {
  const CoarseSpace& cs = pair.space();
  const int q = cs.fine_dofs;
  const CoarseSegment& seg = cs.segments[s];
  const auto& ptr = a0.row_ptr();
  const auto& col = a0.col_index();
  for (std::size_t i = 0; i < seg.unknowns.size(); ++i) {
    const int u = seg.unknowns[i];
    for (long long k = ptr[u]; k < ptr[u + 1]; ++k) {
      const int v = col[k];
      const int t = cs.segment_of_unknown[v];
      const CoarseSegment& tseg = cs.segments[t];
      const int jv = cs.position_of_unknown[v];
      const auto b = a0.block(k);
      Eigen::MatrixXd right = tseg.identity ? Eigen::MatrixXd(b) : Eigen::MatrixXd(b * pair.fine_block(v));
      Eigen::MatrixXd& dst = a1.block(s, t);
      const int c0 = tseg.identity ? jv * q : 0;
      const int nc = static_cast<int>(right.cols());
      if (seg.identity)
        dst.block(static_cast<int>(i) * q, c0, q, nc) += right;
      else
        dst.middleCols(c0, nc).noalias() += pair.fine_block(u).transpose() * right;
    }
  }
}

}  // namespace

SegmentMatrix galerkin_coarse_matrix(const BlockCsr& a0, const ProjectionPair& pair, Exec exec) {
  if (a0.rows() != pair.fine_size() || a0.block_size() != pair.space().fine_dofs)
    throw std::invalid_argument("galerkin_coarse_matrix: dimension mismatch");
  SegmentMatrix a1(pair.space().segment_sizes());
  const int ns = a1.segments();
  if (exec == Exec::serial) {
    for (int s = 0; s < ns; ++s) galerkin_row(a0, pair, a1, s);
  } else {
#pragma omp parallel for schedule(dynamic, 32)
    for (int s = 0; s < ns; ++s) galerkin_row(a0, pair, a1, s);
  }
  return a1;
}

}  // namespace hdgml
