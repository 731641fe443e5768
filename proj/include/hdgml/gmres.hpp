#pragma once

// Full (unrestarted) GMRES with modified Gram-Schmidt, Givens rotations and an
// optional left preconditioner. Convergence is declared on the true relative
// residual ||b - A x|| / ||b||.

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hdgml {

using LinearOperator = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;

enum class PreconditionerKind { none, block_jacobi, ml, eml };
enum class InitialGuess { zero, coarse_solve };

struct GmresConfig {
  double tol = 1e-9;
  int max_iter = 200;
  PreconditionerKind preconditioner = PreconditionerKind::none;
  InitialGuess initial_guess = InitialGuess::zero;

  void validate() const;
};

struct SolveReport {
  std::string solver;
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
  std::vector<double> residual_history;         // true relative residual, entry 0 = initial
  std::vector<double> preconditioned_history;   // ||M^-1 r_k|| / ||M^-1 b||
  double final_residual = 0.0;
  double error_vs_direct = -1.0;  // negative when not computed
  double setup_seconds = 0.0;
  double factor_seconds = 0.0;
  double solve_seconds = 0.0;
  double direct_seconds = 0.0;
  long long fine_unknowns = 0;
  long long fine_nonzeros = 0;
  long long coarse_unknowns = 0;
  double factor_flops = 0.0;
  double factor_memory = 0.0;
  long long stored_entries = 0;
};

void to_json(nlohmann::json& j, const SolveReport& r);

/// `x` holds the initial guess on entry and the iterate on exit.
SolveReport gmres_solve(const LinearOperator& a, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                        const GmresConfig& config, const LinearOperator* preconditioner = nullptr);

}  // namespace hdgml
