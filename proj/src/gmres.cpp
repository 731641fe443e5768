#include "hdgml/gmres.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace hdgml {

void GmresConfig::validate() const {
  if (!(tol > 0.0)) throw std::invalid_argument("GmresConfig: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("GmresConfig: max_iter must be >= 1");
}

void to_json(nlohmann::json& j, const SolveReport& r) {
  j = nlohmann::json{{"solver", r.solver},
                     {"iterations", r.iterations},
                     {"converged", r.converged},
                     {"breakdown", r.breakdown},
                     {"final_residual", r.final_residual},
                     {"residual_history", r.residual_history},
                     {"preconditioned_history", r.preconditioned_history},
                     {"setup_seconds", r.setup_seconds},
                     {"factor_seconds", r.factor_seconds},
                     {"solve_seconds", r.solve_seconds},
                     {"direct_seconds", r.direct_seconds},
                     {"fine_unknowns", r.fine_unknowns},
                     {"fine_nonzeros", r.fine_nonzeros},
                     {"coarse_unknowns", r.coarse_unknowns},
                     {"factor_flops", r.factor_flops},
                     {"factor_memory", r.factor_memory},
                     {"stored_entries", r.stored_entries}};
  if (r.error_vs_direct >= 0.0)
    j["error_vs_direct"] = r.error_vs_direct;
  else
    j["error_vs_direct"] = nullptr;
}

SolveReport gmres_solve(const LinearOperator& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                        const GmresConfig& config, const LinearOperator* preconditioner) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Eigen::Index n = b.size();
  if (x.size() != n) x = Eigen::VectorXd::Zero(n);

  SolveReport rep;
  auto finish = [&] {
    rep.final_residual = rep.residual_history.back();
    rep.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
  };

  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    x.setZero();
    rep.converged = true;
    rep.residual_history.push_back(0.0);
    rep.preconditioned_history.push_back(0.0);
    return finish();
  }

  Eigen::VectorXd ax(n), r(n), w(n), tmp(n);
  auto true_residual = [&](const Eigen::VectorXd& v) {
    a(v, ax);
    return (b - ax).norm() / bnorm;
  };
  auto precondition = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
    if (preconditioner)
      (*preconditioner)(in, out);
    else
      out = in;
  };

  a(x, ax);
  tmp = b - ax;
  const double rel0 = tmp.norm() / bnorm;
  rep.residual_history.push_back(rel0);
  if (rel0 <= config.tol) {
    rep.converged = true;
    rep.preconditioned_history.push_back(0.0);
    return finish();
  }
  precondition(tmp, r);
  Eigen::VectorXd mb(n);
  precondition(b, mb);
  const double pb = mb.norm() > 0.0 ? mb.norm() : 1.0;
  const double beta = r.norm();
  rep.preconditioned_history.push_back(beta / pb);

  const int m = config.max_iter;
  std::vector<Eigen::VectorXd> v;
  v.reserve(m + 1);
  v.push_back(r / beta);
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::VectorXd cs = Eigen::VectorXd::Zero(m), sn = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
  g(0) = beta;
  const Eigen::VectorXd x0 = x;

  auto iterate_at = [&](int k) {
    Eigen::VectorXd y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    Eigen::VectorXd xk = x0;
    for (int i = 0; i < k; ++i) xk.noalias() += y(i) * v[i];
    return xk;
  };

  for (int k = 0; k < m; ++k) {
    a(v[k], tmp);
    precondition(tmp, w);
    for (int i = 0; i <= k; ++i) {
      h(i, k) = v[i].dot(w);
      w.noalias() -= h(i, k) * v[i];
    }
    const double hn = w.norm();
    h(k + 1, k) = hn;
    for (int i = 0; i < k; ++i) {
      const double t = cs(i) * h(i, k) + sn(i) * h(i + 1, k);
      h(i + 1, k) = -sn(i) * h(i, k) + cs(i) * h(i + 1, k);
      h(i, k) = t;
    }
    const double d = std::hypot(h(k, k), h(k + 1, k));
    if (d == 0.0) {
      rep.breakdown = true;
      rep.iterations = k;
      break;
    }
    cs(k) = h(k, k) / d;
    sn(k) = h(k + 1, k) / d;
    h(k, k) = d;
    h(k + 1, k) = 0.0;
    g(k + 1) = -sn(k) * g(k);
    g(k) = cs(k) * g(k);
    rep.preconditioned_history.push_back(std::abs(g(k + 1)) / pb);

    x = iterate_at(k + 1);
    const double rel = true_residual(x);
    rep.residual_history.push_back(rel);
    rep.iterations = k + 1;
    if (rel <= config.tol) {
      rep.converged = true;
      return finish();
    }
    if (hn <= 1e-14 * beta) {
      // invariant subspace reached without meeting the true-residual target
      rep.breakdown = true;
      break;
    }
    v.push_back(w / hn);
  }
  return finish();
}

}  // namespace hdgml
