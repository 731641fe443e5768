#pragma once

// Serial cost model of the nested-dissection and multilevel coarse solvers:
// exact level sums, their closed forms, and comparison with measured counters.

#include <iosfwd>
#include <string>
#include <vector>

namespace hdgml {

enum class Scheme { nd, ml, eml };

Scheme parse_scheme(const std::string& s);
std::string scheme_name(Scheme s);

struct CostModel {
  int dimension = 2;  // 2 or 3
  int levels = 1;     // N
  int order = 1;      // p
  Scheme scheme = Scheme::ml;
  int cap = 10;

  void validate() const;
  double q0() const;                // (p+1)^(d-1)
  int order_at(int level) const;    // p_k
  double q(int level) const;        // (p_k+1)^(d-1)
  double alpha(int level) const { return q(level) / q0(); }
  double elements() const;          // N_T = 2^(d N)
  /// Dense front size at level k.
  double front_size(int level) const;
  /// Number of fronts at level k.
  double fronts(int level) const;
};

/// Sum over levels of (#fronts) * m^3 and (#fronts) * m^2.
double model_factor_cost(const CostModel& m);
double model_memory_cost(const CostModel& m);

/// Leading-order closed forms. For EML these take alpha_k = alpha_N on every
/// level above the first and therefore bound the sums from above.
double closed_form_factor(const CostModel& m);
double closed_form_memory(const CostModel& m);

struct CostSample {
  Scheme scheme = Scheme::ml;
  int order = 1;
  int levels = 0;
  double elements = 0.0;
  double measured_flops = 0.0;
  double measured_memory = 0.0;
  double factor_seconds = 0.0;
};

struct CostComparison {
  CostSample sample;
  double model_flops = 0.0;
  double model_memory = 0.0;
  double closed_flops = 0.0;
  double closed_memory = 0.0;
};

std::vector<CostComparison> measured_vs_model(const std::vector<CostSample>& samples, int cap = 10);

/// Least-squares slope of log(y) against log(x); needs at least 3 points.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

void write_cost_csv(std::ostream& os, const std::vector<CostComparison>& rows);

}  // namespace hdgml
