#include <doctest.h>

#include "hdgml/experiment.hpp"

#include <algorithm>
#include <sstream>

using namespace hdgml;

namespace {
std::string strip_timing(const std::string& csv) {
  // drop setup_seconds and solve_seconds
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string x;
    while (std::getline(ss, x, ',')) f.push_back(x);
    for (size_t i = 0; i < f.size(); ++i)
      if (i != 10 && i != 11) out += f[i] + ',';
    out += '\n';
  }
  return out;
}
}  // namespace

TEST_CASE("solver names") {
  CHECK(parse_solver("ML-GMRES") == SolverKind::ml_gmres);
  CHECK(parse_solver("EML-GMRES") == SolverKind::eml_gmres);
  CHECK(parse_solver("blockJacobi-GMRES") == SolverKind::block_jacobi_gmres);
  CHECK(parse_solver("direct-ND") == SolverKind::direct_nd);
  CHECK_THROWS_AS(parse_solver("AMG"), std::invalid_argument);
  for (SolverKind k : {SolverKind::direct_nd, SolverKind::ml_gmres, SolverKind::eml_gmres,
                       SolverKind::block_jacobi_gmres})
    CHECK(parse_solver(solver_name(k)) == k);
}

TEST_CASE("manifest round trip") {
  RunManifest m;
  m.example = "IV";
  m.parameter = 100.0;
  m.levels = {3, 4};
  m.orders = {2};
  m.solvers = {"EML-GMRES", "blockJacobi-GMRES"};
  m.tol = 1e-8;
  m.seed = 5;
  m.compute_direct = true;
  const nlohmann::json j = m;
  const RunManifest back = j.get<RunManifest>();
  CHECK(nlohmann::json(back) == j);
  CHECK(*back.parameter == 100.0);

  const RunManifest partial = nlohmann::json::parse(R"({"example":"II","levels":[2]})").get<RunManifest>();
  CHECK(partial.example == "II");
  CHECK(partial.orders == RunManifest{}.orders);
  CHECK_FALSE(partial.parameter.has_value());

  RunManifest bad;
  bad.levels = {1};
  CHECK_THROWS(bad.validate());
  bad = RunManifest{};
  bad.solvers = {"nope"};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("table sweep") {
  RunManifest m;
  m.levels = {2, 3};
  m.orders = {1, 2};
  m.solvers = {"ML-GMRES", "direct-ND"};
  const TableResult a = run_table(m);
  REQUIRE(a.cells.size() == 8);
  for (const auto& c : a.cells) CHECK(c.ok);
  CHECK(format_cell(a.cells[0]) == "3");
  CHECK(a.markdown.find("| 2 | 3 | 3 |") != std::string::npos);
  const TableResult b = run_table(m);
  CHECK(strip_timing(a.csv) == strip_timing(b.csv));

  m.levels.clear();
  const TableResult empty = run_table(m);
  CHECK(empty.cells.empty());
  CHECK(std::count(empty.csv.begin(), empty.csv.end(), '\n') == 1);
}

TEST_CASE("non-converged cells are starred") {
  TableCell c;
  c.ok = true;
  c.outcome.report.converged = false;
  c.outcome.report.iterations = 200;
  c.outcome.report.final_residual = 2.5e-4;
  CHECK(format_cell(c).rfind("*(", 0) == 0);
  c.outcome.report.error_vs_direct = 1e-3;
  CHECK(format_cell(c).find("1") != std::string::npos);
  c.ok = false;
  CHECK(format_cell(c) == "error");

  RunManifest m;
  m.levels = {3};
  m.orders = {1};
  m.max_iter = 2;
  const TableResult r = run_table(m);
  CHECK(format_cell(r.cells[0]).rfind("*(", 0) == 0);
}

TEST_CASE("complexity sweep") {
  RunManifest m;
  m.levels = {3, 4, 5};
  m.orders = {1};
  m.solvers = {"ND", "ML", "EML"};
  const ComplexityResult r = run_complexity(m);
  REQUIRE(r.rows.size() == 9);
  for (const auto& row : r.rows) {
    CHECK(row.sample.measured_flops == row.model_flops);
    CHECK(row.sample.measured_memory == row.model_memory);
  }
  CHECK(r.summary.rfind("scheme,p,flops_slope,memory_slope\n", 0) == 0);
  CHECK(std::count(r.summary.begin(), r.summary.end(), '\n') == 4);
}

TEST_CASE("direct solve matches the iterative one and reports an L2 error") {
  SolveSetup s;
  s.levels = 3;
  s.order = 2;
  s.solver = SolverKind::eml_gmres;
  s.compute_direct = true;
  const SolveOutcome o = run_solve(s);
  CHECK(o.report.converged);
  CHECK(o.report.error_vs_direct < 1e-8);
  CHECK(o.l2_error > 0.0);
  CHECK(o.l2_error < 1e-3);
  s.example = CaseId::II;
  s.compute_l2 = true;
  CHECK(run_solve(s).l2_error < 0.0);
}
