#pragma once

// End-to-end solves and table/complexity sweeps.

#include "hdgml/cases.hpp"
#include "hdgml/complexity.hpp"
#include "hdgml/gmres.hpp"
#include "hdgml/hdg.hpp"
#include "hdgml/multilevel.hpp"
#include "hdgml/projection.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hdgml {

enum class SolverKind { direct_nd, ml_gmres, eml_gmres, block_jacobi_gmres };

SolverKind parse_solver(const std::string& s);
std::string solver_name(SolverKind s);

struct SolveSetup {
  CaseId example = CaseId::I;
  std::optional<double> parameter;
  int levels = 3;
  int order = 1;
  SolverKind solver = SolverKind::ml_gmres;
  double tol = 1e-9;
  int max_iter = 200;
  int smooth_steps = 2;
  int enrich_cap = 10;
  unsigned seed = 2017;
  bool compute_direct = false;
  bool compute_l2 = true;
  Exec exec = Exec::parallel;
};

/// Everything built for one (case, N, p): hierarchy, trace system and, when
/// requested, the two-level machinery.
class Pipeline {
 public:
  explicit Pipeline(const SolveSetup& setup);

  const SolveSetup& setup() const { return setup_; }
  const BenchmarkCase& problem() const { return case_; }
  const SkeletonHierarchy& hierarchy() const { return hierarchy_; }
  const TraceSystem& system() const { return system_; }

  /// Builds the coarse space, A1 and its factorization for `kind`. A1 itself is
  /// consumed by the factorization unless `keep_matrix` is set.
  void build_coarse(CoarseKind kind, const FactorOptions& options = {}, bool keep_matrix = false);
  const ProjectionPair& projection() const { return *pair_; }
  const SegmentMatrix& coarse_matrix() const;
  const MultilevelFactorization& factorization() const { return *factor_; }
  const BlockJacobiSmoother& smoother();
  VCyclePreconditioner vcycle();

  /// Coarse solve of the fine system: I0 A1^-1 I0^T r.
  Eigen::VectorXd coarse_solve(const Eigen::VectorXd& r) const;

  double assembly_seconds() const { return assembly_seconds_; }
  double coarse_seconds() const { return coarse_seconds_; }

 private:
  SolveSetup setup_;
  double assembly_seconds_ = 0.0;  // set while system_ is constructed
  double coarse_seconds_ = 0.0;
  BenchmarkCase case_;
  SkeletonHierarchy hierarchy_;
  TraceSystem system_;
  std::unique_ptr<ProjectionPair> pair_;
  std::unique_ptr<SegmentMatrix> a1_;
  std::unique_ptr<MultilevelFactorization> factor_;
  std::unique_ptr<BlockJacobiSmoother> smoother_;
};

struct SolveOutcome {
  Eigen::VectorXd lambda;
  SolveReport report;
  double l2_error = -1.0;  // negative when no exact solution
};

SolveOutcome run_solve(const SolveSetup& setup);
SolveOutcome run_solve(Pipeline& pipeline);

struct RunManifest {
  std::string example = "I";
  std::optional<double> parameter;
  std::vector<int> levels{2, 3};
  std::vector<int> orders{1, 2};
  std::vector<std::string> solvers{"ML-GMRES"};
  double tol = 1e-9;
  int max_iter = 200;
  int smooth_steps = 2;
  int enrich_cap = 10;
  unsigned seed = 2017;
  bool compute_direct = false;
  std::string out = "hdgml_out";

  void validate() const;
  SolveSetup setup_for(int levels, int order, const std::string& solver) const;
};

void to_json(nlohmann::json& j, const RunManifest& m);
/// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, RunManifest& m);

struct TableCell {
  std::string solver;
  int levels = 0;
  int order = 0;
  bool ok = false;  // false: setup or solve threw
  std::string error;
  SolveOutcome outcome;
};

struct TableResult {
  std::vector<TableCell> cells;
  std::string csv;
  std::string markdown;
};

/// One cell per (solver, N, p). Failures become error cells; the sweep continues.
TableResult run_table(const RunManifest& manifest);
std::string format_cell(const TableCell& cell);

struct ComplexityResult {
  std::vector<CostComparison> rows;
  std::string csv;
  std::string summary;
};

/// Example I factorization counters for each scheme in `manifest.solvers`
/// (ND, ML, EML) across the level/order sweeps.
ComplexityResult run_complexity(const RunManifest& manifest);

}  // namespace hdgml
