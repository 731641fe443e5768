#include "hdgml/hdg.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace hdgml {

double stabilization_tau(double beta_dot_n) {
  return 0.5 * (std::sqrt(beta_dot_n * beta_dot_n + 4.0) - beta_dot_n);
}

std::array<double, 2> ReferenceElement::normal(int f) {
  switch (f) {
    case south: return {0.0, -1.0};
    case east: return {1.0, 0.0};
    case north: return {0.0, 1.0};
    default: return {-1.0, 0.0};
  }
}

std::array<double, 2> ReferenceElement::face_point(int f, double t) const {
  switch (f) {
    case south: return {t, -1.0};
    case east: return {1.0, t};
    case north: return {t, 1.0};
    default: return {-1.0, t};
  }
}

ReferenceElement::ReferenceElement(int order, double hx, double hy)
    : p_(order), nb_((order + 1) * (order + 1)), nq1_(order + 2), hx_(hx), hy_(hy), basis_(order),
      line_(gauss_legendre(order + 2)) {
  if (order < 1) throw std::invalid_argument("ReferenceElement: order must be >= 1");
  const int q = p_ + 1;
  const int nq = nq1_ * nq1_;
  const Eigen::MatrixXd l = basis_.values(line_.points);       // nq1 x q
  const Eigen::MatrixXd dl = basis_.derivatives(line_.points);  // nq1 x q

  phi.resize(nq, nb_);
  dphi_dx.resize(nq, nb_);
  dphi_dy.resize(nq, nb_);
  for (int b = 0; b < nq1_; ++b)
    for (int a = 0; a < nq1_; ++a) {
      const int r = a + nq1_ * b;
      for (int ib = 0; ib < q; ++ib)
        for (int ia = 0; ia < q; ++ia) {
          const int i = ia + q * ib;
          phi(r, i) = l(a, ia) * l(b, ib);
          dphi_dx(r, i) = dl(a, ia) * l(b, ib) * 2.0 / hx_;
          dphi_dy(r, i) = l(a, ia) * dl(b, ib) * 2.0 / hy_;
        }
    }

  psi = l;
  for (int f = 0; f < 4; ++f) {
    phi_face[f].resize(nq1_, nb_);
    for (int r = 0; r < nq1_; ++r) {
      const auto xy = face_point(f, line_.points[r]);
      for (int ib = 0; ib < q; ++ib)
        for (int ia = 0; ia < q; ++ia)
          phi_face[f](r, ia + q * ib) = basis_.value(ia, xy[0]) * basis_.value(ib, xy[1]);
    }
  }

  const double jac = hx_ * hy_ / 4.0;
  Eigen::VectorXd w(nq);
  for (int r = 0; r < nq; ++r) w(r) = volume_weight(r) * jac;
  mass = phi.transpose() * w.asDiagonal() * phi;
  mass_inv = mass.inverse();
  trace_mass = basis_.mass();

  const std::array<Eigen::MatrixXd, 2> d{dphi_dx.transpose() * w.asDiagonal() * phi,
                                         dphi_dy.transpose() * w.asDiagonal() * phi};
  const Eigen::Map<const Eigen::VectorXd> lw(line_.weights.data(), nq1_);

  std::array<Eigen::MatrixXd, 2> e;   // nb x 4q, sigma component c tested on trace
  std::array<Eigen::MatrixXd, 2> nf;  // nb x nb, face term of -(sigma, grad w) + <sigma.n, w>
  for (int c = 0; c < 2; ++c) {
    e[c] = Eigen::MatrixXd::Zero(nb_, 4 * q);
    nf[c] = Eigen::MatrixXd::Zero(nb_, nb_);
  }
  for (int f = 0; f < 4; ++f) {
    const Eigen::VectorXd wf = lw * face_jacobian(f);
    const auto n = normal(f);
    const Eigen::MatrixXd ef = phi_face[f].transpose() * wf.asDiagonal() * psi;
    const Eigen::MatrixXd mf = phi_face[f].transpose() * wf.asDiagonal() * phi_face[f];
    for (int c = 0; c < 2; ++c) {
      if (n[c] == 0.0) continue;
      e[c].middleCols(f * q, q) += n[c] * ef;
      nf[c] += n[c] * mf;
    }
  }
  std::array<Eigen::MatrixXd, 2> bsig{nf[0] - d[0], nf[1] - d[1]};
  for (int c = 0; c < 2; ++c) {
    m_d[c] = mass_inv * d[c];
    m_e[c] = mass_inv * e[c];
  }
  for (int c = 0; c < 2; ++c)
    for (int dd = 0; dd < 2; ++dd) {
      b_m_d[c][dd] = bsig[c] * m_d[dd];
      b_m_e[c][dd] = bsig[c] * m_e[dd];
      e_m_d[c][dd] = e[c].transpose() * m_d[dd];
      e_m_e[c][dd] = e[c].transpose() * m_e[dd];
    }
}

namespace {

bool is_diffusive(const ProblemCoefficients& c) { return c.mode == TransportMode::diffusive; }

double beta_dot_normal(const ProblemCoefficients& c, double x, double y, const std::array<double, 2>& n) {
  if (!c.beta) return 0.0;
  const auto b = c.beta(x, y);
  return b[0] * n[0] + b[1] * n[1];
}

/// Everything in the local solver that does not depend on f.
struct LocalOperator {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  Eigen::Matrix2d K = Eigen::Matrix2d::Zero();
  Eigen::MatrixXd u_lambda;      // nb x 4q
  Eigen::MatrixXd trace_matrix;  // 4q x 4q
  Eigen::MatrixXd rhs_map;       // 4q x nb: Wup Lu^-1
};

LocalOperator build_local_operator(const ReferenceElement& ref, const StructuredMesh& mesh, int element,
                                   const ProblemCoefficients& coeffs, const std::array<bool, 4>& outflow) {
  const int q = ref.trace_size();
  const int nb = ref.volume_size();
  const int nq = ref.volume_points();
  const int nqf = ref.line_rule().size();
  const auto origin = mesh.element_origin(element);
  const double hx = ref.hx();
  const double hy = ref.hy();
  const double jac = hx * hy / 4.0;
  const bool diffusive = is_diffusive(coeffs);

  LocalOperator op;
  if (diffusive) {
    op.K = coeffs.K(origin[0] + hx / 2, origin[1] + hy / 2);
    const double det = op.K.determinant();
    if (!(op.K(0, 0) > 0.0) || !(det > 0.0) || std::abs(op.K(0, 1) - op.K(1, 0)) > 1e-12 * op.K.norm())
      throw SingularLocalSolver(element, "condense_element: K is not SPD on element " + std::to_string(element));
  }

  // -(beta u, grad w)
  Eigen::MatrixXd lu_mat = Eigen::MatrixXd::Zero(nb, nb);
  if (coeffs.beta) {
    Eigen::VectorXd wbx(nq), wby(nq);
    for (int r = 0; r < nq; ++r) {
      const double x = origin[0] + (ref.xi(r) + 1.0) * hx / 2;
      const double y = origin[1] + (ref.eta(r) + 1.0) * hy / 2;
      const auto b = coeffs.beta(x, y);
      const double w = ref.volume_weight(r) * jac;
      wbx(r) = w * b[0];
      wby(r) = w * b[1];
    }
    lu_mat.noalias() -= (ref.dphi_dx.transpose() * wbx.asDiagonal() + ref.dphi_dy.transpose() * wby.asDiagonal()) * ref.phi;
  }

  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(nb, 4 * q);
  Eigen::MatrixXd hu = Eigen::MatrixXd::Zero(4 * q, nb);
  Eigen::MatrixXd tll = Eigen::MatrixXd::Zero(4 * q, 4 * q);
  const auto& line = ref.line_rule();
  for (int f = 0; f < 4; ++f) {
    const auto n = ReferenceElement::normal(f);
    const double fj = ref.face_jacobian(f);
    Eigen::VectorXd w_flux(nqf), w_tau(nqf), w_trace(nqf);
    for (int r = 0; r < nqf; ++r) {
      const auto ref_xy = ref.face_point(f, line.points[r]);
      const double x = origin[0] + (ref_xy[0] + 1.0) * hx / 2;
      const double y = origin[1] + (ref_xy[1] + 1.0) * hy / 2;
      const double bn = beta_dot_normal(coeffs, x, y, n);
      const double tau = stabilization_tau(bn);
      const double w = line.weights[r] * fj;
      w_flux(r) = w * (bn + tau);
      w_tau(r) = w * tau;
      // outflow boundary: <flux - (beta.n) lambda, mu> = 0
      w_trace(r) = w * (outflow[f] ? tau + bn : tau);
    }
    const auto& pf = ref.phi_face[f];
    lu_mat.noalias() += pf.transpose() * w_flux.asDiagonal() * pf;
    g.middleCols(f * q, q).noalias() = pf.transpose() * w_tau.asDiagonal() * ref.psi;
    hu.middleRows(f * q, q).noalias() = ref.psi.transpose() * w_flux.asDiagonal() * pf;
    tll.block(f * q, f * q, q, q).noalias() = ref.psi.transpose() * w_trace.asDiagonal() * ref.psi;
  }

  Eigen::MatrixXd gp = g;
  Eigen::MatrixXd wup = hu;
  Eigen::MatrixXd sll = tll;
  if (diffusive) {
    for (int c = 0; c < 2; ++c)
      for (int d = 0; d < 2; ++d) {
        const double k = op.K(c, d);
        if (k == 0.0) continue;
        lu_mat.noalias() += k * ref.b_m_d[c][d];
        gp.noalias() += k * ref.b_m_e[c][d];
        wup.noalias() += k * ref.e_m_d[c][d];
        sll.noalias() += k * ref.e_m_e[c][d];
      }
  }

  op.lu.compute(lu_mat);
  const double rc = op.lu.rcond();
  if (!(rc > 1e-14))
    throw SingularLocalSolver(element, "condense_element: singular local solver on element " +
                                           std::to_string(element) + " (rcond " + std::to_string(rc) + ")");
  op.u_lambda = op.lu.solve(gp);
  op.trace_matrix = wup * op.u_lambda - sll;
  op.rhs_map = wup * op.lu.inverse();
  return op;
}

Eigen::VectorXd element_forcing(const ReferenceElement& ref, const StructuredMesh& mesh, int element,
                                const ProblemCoefficients& coeffs) {
  const int nq = ref.volume_points();
  const auto origin = mesh.element_origin(element);
  const double jac = ref.hx() * ref.hy() / 4.0;
  Eigen::VectorXd wf(nq);
  for (int r = 0; r < nq; ++r) {
    const double x = origin[0] + (ref.xi(r) + 1.0) * ref.hx() / 2;
    const double y = origin[1] + (ref.eta(r) + 1.0) * ref.hy() / 2;
    wf(r) = coeffs.f ? ref.volume_weight(r) * jac * coeffs.f(x, y) : 0.0;
  }
  return ref.phi.transpose() * wf;
}

LocalElement finish_local(const ReferenceElement& ref, const LocalOperator& op, int element,
                          const Eigen::VectorXd& forcing, bool diffusive, bool with_maps) {
  LocalElement le;
  le.element = element;
  le.trace_matrix = op.trace_matrix;
  le.trace_rhs = op.rhs_map * forcing;
  if (with_maps) {
    const int nb = ref.volume_size();
    le.u_lambda = op.u_lambda;
    le.u_f = op.lu.solve(forcing);
    if (diffusive) {
      le.sigma_lambda = Eigen::MatrixXd::Zero(2 * nb, op.u_lambda.cols());
      le.sigma_f = Eigen::VectorXd::Zero(2 * nb);
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) {
          const double k = op.K(c, d);
          if (k == 0.0) continue;
          le.sigma_lambda.middleRows(c * nb, nb) += k * (ref.m_d[d] * le.u_lambda - ref.m_e[d]);
          le.sigma_f.segment(c * nb, nb) += k * (ref.m_d[d] * le.u_f);
        }
    }
  }
  return le;
}

std::array<bool, 4> outflow_faces_of(const StructuredMesh& mesh, const TraceLayout& layout, int e) {
  std::array<bool, 4> out{};
  for (int f = 0; f < 4; ++f) out[f] = layout.outflow[mesh.face_edge(e, f)] != 0;
  return out;
}

int outflow_mask(const std::array<bool, 4>& o) {
  return (o[0] ? 1 : 0) | (o[1] ? 2 : 0) | (o[2] ? 4 : 0) | (o[3] ? 8 : 0);
}

/// Caches one local operator per outflow-face pattern when coefficients are uniform.
class OperatorSource {
 public:
  OperatorSource(const ReferenceElement& ref, const StructuredMesh& mesh, const ProblemCoefficients& coeffs,
                 const TraceLayout& layout)
      : ref_(ref), mesh_(mesh), coeffs_(coeffs), layout_(layout) {
    if (coeffs_.uniform) {
      for (int e = 0; e < mesh_.element_count(); ++e) {
        const auto of = outflow_faces_of(mesh_, layout_, e);
        const int m = outflow_mask(of);
        if (!cache_.count(m)) cache_.emplace(m, std::make_shared<LocalOperator>(build_local_operator(ref_, mesh_, e, coeffs_, of)));
      }
    }
  }

  LocalElement local(int e, bool with_maps) const {
    const auto of = outflow_faces_of(mesh_, layout_, e);
    const Eigen::VectorXd forcing = element_forcing(ref_, mesh_, e, coeffs_);
    const bool diffusive = is_diffusive(coeffs_);
    if (coeffs_.uniform) return finish_local(ref_, *cache_.at(outflow_mask(of)), e, forcing, diffusive, with_maps);
    const LocalOperator op = build_local_operator(ref_, mesh_, e, coeffs_, of);
    return finish_local(ref_, op, e, forcing, diffusive, with_maps);
  }

 private:
  const ReferenceElement& ref_;
  const StructuredMesh& mesh_;
  const ProblemCoefficients& coeffs_;
  const TraceLayout& layout_;
  std::map<int, std::shared_ptr<LocalOperator>> cache_;
};

}  // namespace

LocalElement condense_element(const ReferenceElement& ref, const StructuredMesh& mesh, int element,
                              const ProblemCoefficients& coeffs, std::array<bool, 4> outflow_faces) {
  const LocalOperator op = build_local_operator(ref, mesh, element, coeffs, outflow_faces);
  return finish_local(ref, op, element, element_forcing(ref, mesh, element, coeffs), is_diffusive(coeffs), true);
}

Eigen::VectorXd project_edge_data(const StructuredMesh& mesh, int edge,
                                  const std::function<double(double, double)>& g, int p) {
  const LagrangeBasis basis(p);
  const auto rule = gauss_legendre(p + 4);
  const auto ends = mesh.edge_endpoints(edge);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p + 1);
  for (int r = 0; r < rule.size(); ++r) {
    const double s = (rule.points[r] + 1.0) / 2.0;
    const double x = ends[0] + s * (ends[2] - ends[0]);
    const double y = ends[1] + s * (ends[3] - ends[1]);
    const double gv = g ? g(x, y) : 0.0;
    for (int m = 0; m <= p; ++m) b(m) += rule.weights[r] * gv * basis.value(m, rule.points[r]);
  }
  return basis.mass().ldlt().solve(b);
}

TraceLayout build_trace_layout(const StructuredMesh& mesh, const ProblemCoefficients& coeffs,
                               const SkeletonHierarchy* hierarchy) {
  TraceLayout layout;
  const int ne = mesh.edge_count();
  layout.edge_to_unknown.assign(ne, -1);
  layout.outflow.assign(ne, 0);

  if (coeffs.mode == TransportMode::pure_transport) {
    const auto rule = gauss_legendre(4);
    for (int e = 0; e < ne; ++e) {
      if (!mesh.is_boundary(e)) continue;
      const auto ends = mesh.edge_endpoints(e);
      const auto n = mesh.boundary_normal(e);
      double flux = 0.0;
      for (int r = 0; r < rule.size(); ++r) {
        const double s = (rule.points[r] + 1.0) / 2.0;
        flux += rule.weights[r] *
                beta_dot_normal(coeffs, ends[0] + s * (ends[2] - ends[0]), ends[1] + s * (ends[3] - ends[1]), n);
      }
      if (flux > 0.0) layout.outflow[e] = 1;
    }
  }

  auto push = [&](int e) {
    layout.edge_to_unknown[e] = static_cast<int>(layout.unknown_edges.size());
    layout.unknown_edges.push_back(e);
  };

  if (hierarchy) {
    if (hierarchy->mesh().n() != mesh.n())
      throw std::invalid_argument("build_trace_layout: hierarchy does not match mesh");
    const int n = mesh.n();
    const auto& level1 = hierarchy->fronts()[0];
    layout.level1_extras.assign(level1.size(), {});
    for (int e = 0; e < ne; ++e) {
      if (!layout.outflow[e]) continue;
      const int elem = mesh.edge_elements(e)[0];
      layout.level1_extras[hierarchy->level1_front_of_element(elem)].push_back(e);
    }
    for (int k = 1; k <= hierarchy->levels(); ++k)
      for (const auto& front : hierarchy->fronts()[k - 1]) {
        for (const auto& arm : front.arms)
          for (int e : arm) push(e);
        if (k == 1)
          for (int e : layout.level1_extras[front.index]) push(e);
      }
    (void)n;
  } else {
    for (int e = 0; e < ne; ++e)
      if (!mesh.is_boundary(e) || layout.outflow[e]) push(e);
  }
  return layout;
}

Eigen::VectorXd element_trace(const TraceSystem& system, const Eigen::VectorXd& lambda, int element) {
  const int q = system.dofs_per_edge();
  Eigen::VectorXd out(4 * q);
  for (int f = 0; f < 4; ++f) {
    const int edge = system.mesh.face_edge(element, f);
    const int u = system.layout.edge_to_unknown[edge];
    out.segment(f * q, q) = u >= 0 ? Eigen::VectorXd(lambda.segment(static_cast<Eigen::Index>(u) * q, q))
                                   : system.boundary_values[edge];
  }
  return out;
}

TraceSystem assemble_trace_system(const StructuredMesh& mesh, const ProblemCoefficients& coeffs, int order,
                                  const SkeletonHierarchy* hierarchy, Exec exec) {
  if (order < 1) throw std::invalid_argument("assemble_trace_system: order must be >= 1");
  TraceSystem sys{mesh, coeffs, order, build_trace_layout(mesh, coeffs, hierarchy), {}, {}, {}};
  const int q = order + 1;
  const TraceLayout& layout = sys.layout;

  sys.boundary_values.assign(mesh.edge_count(), Eigen::VectorXd());
  for (int e = 0; e < mesh.edge_count(); ++e)
    if (layout.edge_to_unknown[e] < 0) sys.boundary_values[e] = project_edge_data(mesh, e, coeffs.g, order);

  std::vector<std::vector<int>> pattern(layout.size());
  for (int u = 0; u < layout.size(); ++u) {
    auto& cols = pattern[u];
    for (int elem : mesh.edge_elements(layout.unknown_edges[u])) {
      if (elem < 0) continue;
      for (int f = 0; f < 4; ++f) {
        const int v = layout.edge_to_unknown[mesh.face_edge(elem, f)];
        if (v >= 0) cols.push_back(v);
      }
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  }
  sys.matrix = BlockCsr(q, pattern);
  pattern.clear();
  pattern.shrink_to_fit();
  sys.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(layout.size()) * q);

  const ReferenceElement ref(order, mesh.hx(), mesh.hy());
  const OperatorSource source(ref, mesh, coeffs, layout);

  auto scatter = [&](int e) {
    const LocalElement le = source.local(e, false);
    std::array<int, 4> unk;
    Eigen::VectorXd known = Eigen::VectorXd::Zero(4 * q);
    for (int f = 0; f < 4; ++f) {
      const int edge = mesh.face_edge(e, f);
      unk[f] = layout.edge_to_unknown[edge];
      if (unk[f] < 0) known.segment(f * q, q) = sys.boundary_values[edge];
    }
    const Eigen::VectorXd lifted = le.trace_rhs + le.trace_matrix * known;
    for (int a = 0; a < 4; ++a) {
      if (unk[a] < 0) continue;
      sys.rhs.segment(static_cast<Eigen::Index>(unk[a]) * q, q) -= lifted.segment(a * q, q);
      for (int b = 0; b < 4; ++b) {
        if (unk[b] < 0) continue;
        sys.matrix.block(sys.matrix.find(unk[a], unk[b])) += le.trace_matrix.block(a * q, b * q, q, q);
      }
    }
  };

  const int n = mesh.n();
  if (exec == Exec::serial) {
    for (int e = 0; e < mesh.element_count(); ++e) scatter(e);
  } else {
    // Four-colouring by (i mod 2, j mod 2): same-colour elements share no edge.
    for (int color = 0; color < 4; ++color) {
      const int ci = color % 2;
      const int cj = color / 2;
      const int ni = (n - ci + 1) / 2;
      const int nj = (n - cj + 1) / 2;
#pragma omp parallel for schedule(dynamic, 16)
      for (int t = 0; t < ni * nj; ++t) scatter(mesh.element_id(ci + 2 * (t % ni), cj + 2 * (t / ni)));
    }
  }
  return sys;
}

VolumeSolution recover_volume(const TraceSystem& system, const Eigen::VectorXd& lambda) {
  if (lambda.size() != system.size())
    throw std::invalid_argument("recover_volume: trace vector has size " + std::to_string(lambda.size()) +
                                ", expected " + std::to_string(system.size()));
  const StructuredMesh& mesh = system.mesh;
  const ReferenceElement ref(system.order, mesh.hx(), mesh.hy());
  const OperatorSource source(ref, mesh, system.coeffs, system.layout);
  VolumeSolution out;
  out.u.resize(mesh.element_count());
  out.sigma.resize(mesh.element_count());
  const bool diffusive = is_diffusive(system.coeffs);
#pragma omp parallel for schedule(dynamic, 16)
  for (int e = 0; e < mesh.element_count(); ++e) {
    const LocalElement le = source.local(e, true);
    const Eigen::VectorXd lt = element_trace(system, lambda, e);
    out.u[e] = le.u_lambda * lt + le.u_f;
    if (diffusive) out.sigma[e] = le.sigma_lambda * lt + le.sigma_f;
  }
  return out;
}

std::vector<double> conservation_defect(const TraceSystem& system, const Eigen::VectorXd& lambda) {
  const StructuredMesh& mesh = system.mesh;
  const int q = system.dofs_per_edge();
  const ReferenceElement ref(system.order, mesh.hx(), mesh.hy());
  const VolumeSolution vol = recover_volume(system, lambda);
  const bool diffusive = is_diffusive(system.coeffs);
  const int nb = ref.volume_size();
  const auto& line = ref.line_rule();
  Eigen::VectorXd jump = Eigen::VectorXd::Zero(lambda.size());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto origin = mesh.element_origin(e);
    const Eigen::VectorXd lt = element_trace(system, lambda, e);
    for (int f = 0; f < 4; ++f) {
      const int edge = mesh.face_edge(e, f);
      const int u = system.layout.edge_to_unknown[edge];
      if (u < 0) continue;
      const auto n = ReferenceElement::normal(f);
      const Eigen::VectorXd uf = ref.phi_face[f] * vol.u[e];
      const Eigen::VectorXd lf = ref.psi * lt.segment(f * q, q);
      Eigen::VectorXd sn = Eigen::VectorXd::Zero(line.size());
      if (diffusive)
        sn = ref.phi_face[f] * (n[0] * vol.sigma[e].head(nb) + n[1] * vol.sigma[e].tail(nb));
      Eigen::VectorXd integrand(line.size());
      for (int r = 0; r < line.size(); ++r) {
        const auto ref_xy = ref.face_point(f, line.points[r]);
        const double x = origin[0] + (ref_xy[0] + 1.0) * ref.hx() / 2;
        const double y = origin[1] + (ref_xy[1] + 1.0) * ref.hy() / 2;
        const double bn = beta_dot_normal(system.coeffs, x, y, n);
        double flux = sn(r) + bn * uf(r) + stabilization_tau(bn) * (uf(r) - lf(r));
        if (system.layout.outflow[edge]) flux -= bn * lf(r);
        integrand(r) = line.weights[r] * ref.face_jacobian(f) * flux;
      }
      jump.segment(static_cast<Eigen::Index>(u) * q, q) += ref.psi.transpose() * integrand;
    }
  }
  std::vector<double> out(system.layout.size());
  for (int u = 0; u < system.layout.size(); ++u)
    out[u] = jump.segment(static_cast<Eigen::Index>(u) * q, q).cwiseAbs().maxCoeff();
  return out;
}

Eigen::VectorXd solve_direct(const TraceSystem& system) {
  if (system.size() == 0) return {};
  Eigen::SparseMatrix<double> a = system.matrix.to_sparse();
  a.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw std::runtime_error("solve_direct: factorization failed");
  return lu.solve(system.rhs);
}

}  // namespace hdgml
