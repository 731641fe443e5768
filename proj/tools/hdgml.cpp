#include "hdgml/experiment.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace hdgml;

namespace {

struct Flags {
  std::string manifest_file;
  std::string example;
  double param = NAN;
  std::vector<int> levels;
  std::vector<int> orders;
  std::vector<std::string> solvers;
  double tol = NAN;
  int max_iter = -1;
  int smooth_steps = -1;
  int enrich_cap = -1;
  long long seed = -1;
  std::string out;
  bool direct = false;
};

void add_common(CLI::App* cmd, Flags& f, bool sweep) {
  cmd->add_option("--manifest", f.manifest_file, "JSON run manifest; flags override its fields")->check(CLI::ExistingFile);
  cmd->add_option("--example", f.example, "I, II, III-shock, III-smooth, IV, V, VI");
  cmd->add_option("--param", f.param, "alpha (IV, VI) or kappa (V)");
  if (sweep) {
    cmd->add_option("--levels", f.levels, "level counts N")->delimiter(',');
    cmd->add_option("--orders", f.orders, "polynomial orders p")->delimiter(',');
    cmd->add_option("--solver", f.solvers, "direct-ND, ML-GMRES, EML-GMRES, blockJacobi-GMRES")->delimiter(',');
  }
  cmd->add_option("--tol", f.tol, "relative residual tolerance (default 1e-9)");
  cmd->add_option("--max-iter", f.max_iter, "GMRES iteration limit (default 200)");
  cmd->add_option("--smooth-steps", f.smooth_steps, "block-Jacobi sweeps before and after the coarse solve (default 2)");
  cmd->add_option("--enrich-cap", f.enrich_cap, "maximum enriched order (default 10)");
  cmd->add_option("--seed", f.seed, "seed of the synthetic permeability field");
  cmd->add_option("--out", f.out, "output path prefix");
  cmd->add_flag("--direct", f.direct, "also solve directly and report max|lambda - lambda_direct|");
}

RunManifest resolve(const Flags& f) {
  RunManifest m;
  if (!f.manifest_file.empty()) {
    std::ifstream in(f.manifest_file);
    m = nlohmann::json::parse(in).get<RunManifest>();
  }
  if (!f.example.empty()) m.example = f.example;
  if (!std::isnan(f.param)) m.parameter = f.param;
  if (!f.levels.empty()) m.levels = f.levels;
  if (!f.orders.empty()) m.orders = f.orders;
  if (!f.solvers.empty()) m.solvers = f.solvers;
  if (!std::isnan(f.tol)) m.tol = f.tol;
  if (f.max_iter >= 0) m.max_iter = f.max_iter;
  if (f.smooth_steps >= 0) m.smooth_steps = f.smooth_steps;
  if (f.enrich_cap >= 0) m.enrich_cap = f.enrich_cap;
  if (f.seed >= 0) m.seed = static_cast<unsigned>(f.seed);
  if (!f.out.empty()) m.out = f.out;
  if (f.direct) m.compute_direct = true;
  m.validate();
  return m;
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << text;
  std::cerr << "wrote " << path << '\n';
}

int selftest() {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "PASS " : "FAIL ") << what << '\n';
    if (!ok) ++failures;
  };
  check(std::abs(stabilization_tau(0.0) - 1.0) < 1e-15 && std::abs(stabilization_tau(1.5) - 0.5) < 1e-15 &&
            std::abs(stabilization_tau(-1.5) - 2.0) < 1e-15,
        "upwind stabilization values");

  SolveSetup s;
  s.levels = 3;
  s.order = 2;
  s.solver = SolverKind::direct_nd;
  s.compute_direct = true;
  const SolveOutcome nd = run_solve(s);
  check(nd.report.final_residual < 1e-12 && nd.report.error_vs_direct < 1e-10,
        "nested dissection matches sparse LU (N=3, p=2)");

  s.solver = SolverKind::ml_gmres;
  s.levels = 2;
  s.order = 1;
  const SolveOutcome ml = run_solve(s);
  check(ml.report.converged && ml.report.error_vs_direct < 1e-8, "ML-GMRES converges to the direct solution (N=2, p=1)");

  s.solver = SolverKind::eml_gmres;
  s.levels = 3;
  const SolveOutcome eml = run_solve(s);
  check(eml.report.converged && eml.report.error_vs_direct < 1e-8, "EML-GMRES converges to the direct solution (N=3, p=1)");

  s.example = CaseId::III_shock;
  s.solver = SolverKind::ml_gmres;
  const SolveOutcome tr = run_solve(s);
  check(tr.report.converged && tr.report.error_vs_direct < 1e-8, "ML-GMRES on pure transport (N=3, p=1)");

  std::cout << (failures ? "selftest FAILED" : "selftest passed") << '\n';
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Upwind HDG trace solvers with multilevel preconditioning"};
  app.require_subcommand(1);

  Flags solve_flags, table_flags, cx_flags;
  int solve_levels = 3, solve_order = 1;
  std::string solve_solver = "ML-GMRES";

  auto* solve = app.add_subcommand("solve", "single solve; prints a JSON report");
  add_common(solve, solve_flags, false);
  solve->add_option("--levels", solve_levels, "level count N");
  solve->add_option("--orders", solve_order, "polynomial order p");
  solve->add_option("--solver", solve_solver, "direct-ND, ML-GMRES, EML-GMRES, blockJacobi-GMRES");

  auto* table = app.add_subcommand("table", "iteration-count table over (N, p)");
  add_common(table, table_flags, true);

  auto* complexity = app.add_subcommand("complexity", "factorization counters against the cost model");
  add_common(complexity, cx_flags, true);

  app.add_subcommand("selftest", "quick end-to-end consistency checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*solve) {
      Flags f = solve_flags;
      f.levels = {solve_levels};
      f.orders = {solve_order};
      f.solvers = {solve_solver};
      const RunManifest m = resolve(f);
      const SolveOutcome res = run_solve(m.setup_for(m.levels.front(), m.orders.front(), m.solvers.front()));
      nlohmann::json j = res.report;
      j["example"] = m.example;
      j["N"] = m.levels.front();
      j["p"] = m.orders.front();
      if (res.l2_error >= 0) j["l2_error"] = res.l2_error;
      const std::string text = j.dump(2) + "\n";
      if (!f.out.empty())
        write_file(m.out + ".json", text);
      else
        std::cout << text;
      return res.report.converged ? 0 : 2;
    }
    if (*table) {
      const RunManifest m = resolve(table_flags);
      const TableResult res = run_table(m);
      write_file(m.out + ".csv", res.csv);
      write_file(m.out + ".md", res.markdown);
      std::cout << res.markdown;
      return 0;
    }
    if (*complexity) {
      Flags f = cx_flags;
      if (f.solvers.empty() && f.manifest_file.empty()) f.solvers = {"ND", "ML", "EML"};
      const RunManifest m = resolve(f);
      const ComplexityResult res = run_complexity(m);
      write_file(m.out + ".csv", res.csv);
      write_file(m.out + "_slopes.csv", res.summary);
      std::cout << res.csv << '\n' << res.summary;
      return 0;
    }
    return selftest();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
