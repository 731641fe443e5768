#include "hdgml/experiment.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hdgml {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_sci(double v, int digits = 1) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(digits) << v;
  return os.str();
}

}  // namespace

SolverKind parse_solver(const std::string& s) {
  if (s == "direct-ND" || s == "ND" || s == "direct") return SolverKind::direct_nd;
  if (s == "ML-GMRES" || s == "ML") return SolverKind::ml_gmres;
  if (s == "EML-GMRES" || s == "EML") return SolverKind::eml_gmres;
  if (s == "blockJacobi-GMRES" || s == "BJ" || s == "blockJacobi") return SolverKind::block_jacobi_gmres;
  throw std::invalid_argument("unknown solver '" + s + "'");
}

std::string solver_name(SolverKind s) {
  switch (s) {
    case SolverKind::direct_nd: return "direct-ND";
    case SolverKind::ml_gmres: return "ML-GMRES";
    case SolverKind::eml_gmres: return "EML-GMRES";
    case SolverKind::block_jacobi_gmres: return "blockJacobi-GMRES";
  }
  return "?";
}

Pipeline::Pipeline(const SolveSetup& setup)
    : setup_(setup),
      case_(make_case(setup.example, setup.parameter, setup.seed)),
      hierarchy_(build_hierarchy(setup.levels, case_.domain)),
      system_([&] {
        const auto t0 = std::chrono::steady_clock::now();
        TraceSystem s = assemble_trace_system(hierarchy_.mesh(), case_.coeffs, setup.order, &hierarchy_, setup.exec);
        assembly_seconds_ = seconds_since(t0);
        return s;
      }()) {}

void Pipeline::build_coarse(CoarseKind kind, const FactorOptions& options, bool keep_matrix) {
  const auto t0 = std::chrono::steady_clock::now();
  EnrichmentSchedule schedule{kind, setup_.order, setup_.enrich_cap};
  factor_.reset();
  a1_.reset();
  pair_ = std::make_unique<ProjectionPair>(build_coarse_space(hierarchy_, system_.layout, schedule),
                                           hierarchy_.mesh());
  SegmentMatrix a1 = galerkin_coarse_matrix(system_.matrix, *pair_, setup_.exec);
  FactorOptions opts = options;
  opts.exec = setup_.exec;
  if (keep_matrix) {
    a1_ = std::make_unique<SegmentMatrix>(a1);
    factor_ = std::make_unique<MultilevelFactorization>(std::move(a1), pair_->space().fronts, opts);
  } else {
    factor_ = std::make_unique<MultilevelFactorization>(std::move(a1), pair_->space().fronts, opts);
  }
  coarse_seconds_ = seconds_since(t0);
}

const SegmentMatrix& Pipeline::coarse_matrix() const {
  if (!a1_) throw std::logic_error("Pipeline::coarse_matrix: build_coarse was called without keep_matrix");
  return *a1_;
}

const BlockJacobiSmoother& Pipeline::smoother() {
  if (!smoother_) smoother_ = std::make_unique<BlockJacobiSmoother>(system_.matrix);
  return *smoother_;
}

VCyclePreconditioner Pipeline::vcycle() {
  if (!factor_) throw std::logic_error("Pipeline::vcycle: coarse solver not built");
  VCycleConfig cfg{setup_.smooth_steps, setup_.smooth_steps, setup_.exec};
  return VCyclePreconditioner(system_.matrix, *pair_, *factor_, smoother(), cfg);
}

Eigen::VectorXd Pipeline::coarse_solve(const Eigen::VectorXd& r) const {
  if (!factor_) throw std::logic_error("Pipeline::coarse_solve: coarse solver not built");
  return pair_->prolong(factor_->solve(pair_->prolong_transpose(r)));
}

SolveOutcome run_solve(const SolveSetup& setup) {
  Pipeline pipeline(setup);
  return run_solve(pipeline);
}

SolveOutcome run_solve(Pipeline& pipeline) {
  const SolveSetup& setup = pipeline.setup();
  const TraceSystem& sys = pipeline.system();
  const BlockCsr& a0 = sys.matrix;
  const Exec exec = setup.exec;
  SolveOutcome out;
  SolveReport& rep = out.report;

  GmresConfig cfg;
  cfg.tol = setup.tol;
  cfg.max_iter = setup.max_iter;
  const LinearOperator apply_a = [&](const Eigen::VectorXd& x, Eigen::VectorXd& y) { a0.multiply(x, y, exec); };
  Eigen::VectorXd x;

  switch (setup.solver) {
    case SolverKind::direct_nd: {
      pipeline.build_coarse(CoarseKind::identity);
      const auto t0 = std::chrono::steady_clock::now();
      x = pipeline.coarse_solve(sys.rhs);
      const double bn = sys.rhs.norm();
      const double rel = bn > 0 ? (sys.rhs - a0.multiply(x, exec)).norm() / bn : 0.0;
      rep.residual_history = {rel};
      rep.preconditioned_history = {rel};
      rep.iterations = 0;
      rep.converged = rel <= setup.tol;
      rep.final_residual = rel;
      rep.solve_seconds = seconds_since(t0);
      break;
    }
    case SolverKind::ml_gmres:
    case SolverKind::eml_gmres: {
      const bool eml = setup.solver == SolverKind::eml_gmres;
      pipeline.build_coarse(eml ? CoarseKind::eml : CoarseKind::ml);
      const VCyclePreconditioner vc = pipeline.vcycle();
      const LinearOperator pre = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) { z = vc.apply(r); };
      cfg.preconditioner = eml ? PreconditionerKind::eml : PreconditionerKind::ml;
      cfg.initial_guess = InitialGuess::coarse_solve;
      x = pipeline.coarse_solve(sys.rhs);
      rep = gmres_solve(apply_a, sys.rhs, x, cfg, &pre);
      break;
    }
    case SolverKind::block_jacobi_gmres: {
      const BlockJacobiSmoother& bj = pipeline.smoother();
      const LinearOperator pre = [&](const Eigen::VectorXd& r, Eigen::VectorXd& z) { z = bj.apply_inverse(r, exec); };
      cfg.preconditioner = PreconditionerKind::block_jacobi;
      x = Eigen::VectorXd::Zero(sys.size());
      rep = gmres_solve(apply_a, sys.rhs, x, cfg, &pre);
      break;
    }
  }

  rep.solver = solver_name(setup.solver);
  rep.setup_seconds = pipeline.assembly_seconds() + pipeline.coarse_seconds();
  rep.fine_unknowns = sys.size();
  rep.fine_nonzeros = a0.nonzeros();
  if (setup.solver != SolverKind::block_jacobi_gmres) {
    const auto& c = pipeline.factorization().counters();
    rep.coarse_unknowns = pipeline.factorization().size();
    rep.factor_flops = c.factor_flops;
    rep.factor_memory = c.memory;
    rep.stored_entries = c.stored_entries;
    rep.factor_seconds = c.factor_seconds;
  }
  if (setup.compute_direct) {
    const auto t0 = std::chrono::steady_clock::now();
    const Eigen::VectorXd direct = solve_direct(sys);
    rep.direct_seconds = seconds_since(t0);
    rep.error_vs_direct = x.size() ? (x - direct).cwiseAbs().maxCoeff() : 0.0;
  }
  if (setup.compute_l2 && pipeline.problem().exact)
    out.l2_error = l2_error(sys, recover_volume(sys, x), pipeline.problem().exact);
  out.lambda = std::move(x);
  return out;
}

void RunManifest::validate() const {
  const CaseId id = parse_case_id(example);
  (void)id;
  for (int n : levels)
    if (n < 2 || n > 12) throw std::invalid_argument("manifest: levels must lie in [2, 12]");
  for (int p : orders)
    if (p < 1 || p > 10) throw std::invalid_argument("manifest: orders must lie in [1, 10]");
  for (const auto& s : solvers) (void)parse_solver(s);
  if (!(tol > 0)) throw std::invalid_argument("manifest: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("manifest: max_iter must be >= 1");
  if (smooth_steps < 0) throw std::invalid_argument("manifest: smooth_steps must be >= 0");
  if (enrich_cap < 1) throw std::invalid_argument("manifest: enrich_cap must be >= 1");
}

SolveSetup RunManifest::setup_for(int n, int p, const std::string& solver) const {
  SolveSetup s;
  s.example = parse_case_id(example);
  s.parameter = parameter;
  s.levels = n;
  s.order = p;
  s.solver = parse_solver(solver);
  s.tol = tol;
  s.max_iter = max_iter;
  s.smooth_steps = smooth_steps;
  s.enrich_cap = enrich_cap;
  s.seed = seed;
  s.compute_direct = compute_direct;
  return s;
}

void to_json(nlohmann::json& j, const RunManifest& m) {
  j = nlohmann::json{{"example", m.example},     {"levels", m.levels},
                     {"orders", m.orders},       {"solvers", m.solvers},
                     {"tol", m.tol},             {"max_iter", m.max_iter},
                     {"smooth_steps", m.smooth_steps}, {"enrich_cap", m.enrich_cap},
                     {"seed", m.seed},           {"direct", m.compute_direct},
                     {"out", m.out}};
  if (m.parameter)
    j["param"] = *m.parameter;
  else
    j["param"] = nullptr;
}

void from_json(const nlohmann::json& j, RunManifest& m) {
  if (j.contains("example")) m.example = j.at("example").get<std::string>();
  if (j.contains("param") && !j.at("param").is_null()) m.parameter = j.at("param").get<double>();
  if (j.contains("levels")) m.levels = j.at("levels").get<std::vector<int>>();
  if (j.contains("orders")) m.orders = j.at("orders").get<std::vector<int>>();
  if (j.contains("solvers")) m.solvers = j.at("solvers").get<std::vector<std::string>>();
  if (j.contains("solver")) m.solvers = {j.at("solver").get<std::string>()};
  if (j.contains("tol")) m.tol = j.at("tol").get<double>();
  if (j.contains("max_iter")) m.max_iter = j.at("max_iter").get<int>();
  if (j.contains("smooth_steps")) m.smooth_steps = j.at("smooth_steps").get<int>();
  if (j.contains("enrich_cap")) m.enrich_cap = j.at("enrich_cap").get<int>();
  if (j.contains("seed")) m.seed = j.at("seed").get<unsigned>();
  if (j.contains("direct")) m.compute_direct = j.at("direct").get<bool>();
  if (j.contains("out")) m.out = j.at("out").get<std::string>();
}

std::string format_cell(const TableCell& cell) {
  if (!cell.ok) return "error";
  const SolveReport& r = cell.outcome.report;
  if (r.converged) return std::to_string(r.iterations);
  const double err = r.error_vs_direct >= 0 ? r.error_vs_direct : r.final_residual;
  return "*(" + fmt_sci(err) + ")";
}

TableResult run_table(const RunManifest& manifest) {
  manifest.validate();
  TableResult res;
  std::ostringstream csv;
  csv << "example,param,solver,N,p,iterations,converged,final_residual,error_vs_direct,l2_error,setup_seconds,"
         "solve_seconds,status\n";
  const CaseId id = parse_case_id(manifest.example);
  const double param = manifest.parameter.value_or(default_parameter(id));
  for (const auto& solver : manifest.solvers)
    for (int n : manifest.levels)
      for (int p : manifest.orders) {
        TableCell cell;
        cell.solver = solver_name(parse_solver(solver));
        cell.levels = n;
        cell.order = p;
        try {
          cell.outcome = run_solve(manifest.setup_for(n, p, solver));
          cell.ok = true;
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
        const SolveReport& r = cell.outcome.report;
        csv << case_name(id) << ',' << param << ',' << cell.solver << ',' << n << ',' << p << ',';
        if (cell.ok) {
          csv << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << fmt_sci(r.final_residual, 6) << ','
              << (r.error_vs_direct >= 0 ? fmt_sci(r.error_vs_direct, 6) : "") << ','
              << (cell.outcome.l2_error >= 0 ? fmt_sci(cell.outcome.l2_error, 6) : "") << ','
              << std::fixed << std::setprecision(3) << r.setup_seconds << ',' << r.solve_seconds << ','
              << std::defaultfloat << format_cell(cell) << '\n';
        } else {
          std::string msg = cell.error;
          for (char& c : msg)
            if (c == ',' || c == '\n') c = ';';
          csv << ",,,,,,,error: " << msg << '\n';
        }
        res.cells.push_back(std::move(cell));
      }
  res.csv = csv.str();

  std::ostringstream md;
  md << "# Example " << case_name(id);
  if (id == CaseId::IV || id == CaseId::V || id == CaseId::VI) md << " (parameter " << param << ")";
  md << "\n\n";
  for (const auto& solver : manifest.solvers) {
    const std::string name = solver_name(parse_solver(solver));
    md << "## " << name << "\n\n| N |";
    for (int p : manifest.orders) md << " p=" << p << " |";
    md << "\n|---|";
    for (std::size_t i = 0; i < manifest.orders.size(); ++i) md << "---|";
    md << '\n';
    for (int n : manifest.levels) {
      md << "| " << n << " |";
      for (int p : manifest.orders)
        for (const auto& c : res.cells)
          if (c.solver == name && c.levels == n && c.order == p) md << ' ' << format_cell(c) << " |";
      md << '\n';
    }
    md << '\n';
  }
  md << "`*` marks runs that reached the iteration limit; the parenthesised value is max|lambda - lambda_direct| "
        "when a direct solve was requested, otherwise the final relative residual.\n";
  res.markdown = md.str();
  return res;
}

ComplexityResult run_complexity(const RunManifest& manifest) {
  manifest.validate();
  ComplexityResult res;
  std::vector<CostSample> samples;
  for (const auto& s : manifest.solvers) {
    const Scheme scheme = parse_scheme(s == "direct-ND" ? "ND" : s.substr(0, s.find('-')));
    const CoarseKind kind =
        scheme == Scheme::nd ? CoarseKind::identity : (scheme == Scheme::eml ? CoarseKind::eml : CoarseKind::ml);
    for (int p : manifest.orders)
      for (int n : manifest.levels) {
        SolveSetup setup;
        setup.example = CaseId::I;
        setup.levels = n;
        setup.order = p;
        setup.enrich_cap = manifest.enrich_cap;
        setup.compute_l2 = false;
        Pipeline pipe(setup);
        pipe.build_coarse(kind);
        const auto& c = pipe.factorization().counters();
        CostSample cs;
        cs.scheme = scheme;
        cs.order = p;
        cs.levels = n;
        cs.measured_flops = c.factor_flops;
        cs.measured_memory = c.memory;
        cs.factor_seconds = c.factor_seconds;
        samples.push_back(cs);
      }
  }
  res.rows = measured_vs_model(samples, manifest.enrich_cap);
  std::ostringstream csv;
  write_cost_csv(csv, res.rows);
  res.csv = csv.str();

  std::ostringstream sum;
  sum << "scheme,p,flops_slope,memory_slope\n";
  std::map<std::pair<int, int>, std::vector<const CostComparison*>> groups;
  for (const auto& r : res.rows) groups[{static_cast<int>(r.sample.scheme), r.sample.order}].push_back(&r);
  for (const auto& [key, rows] : groups) {
    if (rows.size() < 3) continue;
    std::vector<double> nt, fl, mem;
    for (const auto* r : rows) {
      nt.push_back(r->sample.elements);
      fl.push_back(r->sample.measured_flops);
      mem.push_back(r->sample.measured_memory);
    }
    sum << scheme_name(static_cast<Scheme>(key.first)) << ',' << key.second << ',' << std::setprecision(4)
        << loglog_slope(nt, fl) << ',' << loglog_slope(nt, mem) << '\n';
  }
  res.summary = sum.str();
  return res;
}

}  // namespace hdgml
