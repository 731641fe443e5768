#pragma once

// Benchmark problems: coefficient closures, domains and manufactured solutions.

#include "hdgml/hdg.hpp"
#include "hdgml/mesh.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hdgml {

enum class CaseId { I, II, III_shock, III_smooth, IV, V, VI };

struct BenchmarkCase {
  CaseId id = CaseId::I;
  std::string name;
  Rectangle domain;
  ProblemCoefficients coeffs;
  double parameter = 0.0;  // alpha (IV, VI) or kappa (V); unused otherwise
  std::function<double(double, double)> exact;  // empty when unknown
};

CaseId parse_case_id(const std::string& name);
std::string case_name(CaseId id);
/// Default parameter when none is given (alpha = 10, kappa = 1e-1).
double default_parameter(CaseId id);

/// Throws std::invalid_argument for parameters outside the tested ranges.
BenchmarkCase make_case(CaseId id, std::optional<double> parameter = std::nullopt, unsigned seed = 2017);

/// Piecewise-constant permeability on a 16 x 16 tiling of the unit square,
/// kappa = 10^(4 b) with b drawn from {0, 1/4, 1/2, 3/4, 1}.
class PermeabilityField {
 public:
  explicit PermeabilityField(unsigned seed);
  double operator()(double x, double y) const;
  static constexpr int tiles = 16;

 private:
  std::vector<double> kappa_;
};

struct ErrorNorms {
  double l2_u = 0.0;       // NaN when no exact solution is known
  double error_vs_direct = 0.0;  // NaN when no direct solution is supplied
};

/// L2 error of the recovered u against case.exact (Gauss rule with p+4 points).
double l2_error(const TraceSystem& system, const VolumeSolution& volume,
                const std::function<double(double, double)>& exact);

ErrorNorms error_norms(const BenchmarkCase& bc, const TraceSystem& system, const Eigen::VectorXd& lambda,
                       const Eigen::VectorXd* direct = nullptr);

}  // namespace hdgml
