#include "hdgml/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace hdgml {

Scheme parse_scheme(const std::string& s) {
  if (s == "ND" || s == "nd") return Scheme::nd;
  if (s == "ML" || s == "ml") return Scheme::ml;
  if (s == "EML" || s == "eml") return Scheme::eml;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::nd: return "ND";
    case Scheme::ml: return "ML";
    case Scheme::eml: return "EML";
  }
  return "?";
}

void CostModel::validate() const {
  if (dimension != 2 && dimension != 3) throw std::invalid_argument("CostModel: dimension must be 2 or 3");
  if (levels < 1) throw std::invalid_argument("CostModel: levels must be >= 1");
  if (order < 0) throw std::invalid_argument("CostModel: negative order");
}

double CostModel::q0() const { return std::pow(order + 1.0, dimension - 1); }

int CostModel::order_at(int level) const {
  return scheme == Scheme::eml ? std::min(order + level - 1, cap) : order;
}

double CostModel::q(int level) const { return std::pow(order_at(level) + 1.0, dimension - 1); }

double CostModel::elements() const { return std::pow(2.0, dimension * levels); }

double CostModel::fronts(int level) const { return std::pow(2.0, dimension * (levels - level)); }

double CostModel::front_size(int level) const {
  // 2D: 4 arms; 3D: 12 faces
  const double pieces = dimension == 2 ? 4.0 : 12.0;
  if (scheme == Scheme::nd) {
    const double arm = std::pow(2.0, level - 1);  // n / 2^(N+1-k)
    return pieces * std::pow(arm, dimension - 1) * q0();
  }
  return pieces * q(level);
}

double model_factor_cost(const CostModel& m) {
  m.validate();
  double sum = 0.0;
  for (int k = 1; k <= m.levels; ++k) sum += m.fronts(k) * std::pow(m.front_size(k), 3);
  return sum;
}

double model_memory_cost(const CostModel& m) {
  m.validate();
  double sum = 0.0;
  for (int k = 1; k <= m.levels; ++k) sum += m.fronts(k) * std::pow(m.front_size(k), 2);
  return sum;
}

double closed_form_factor(const CostModel& m) {
  m.validate();
  const double nt = m.elements();
  const double q0 = m.q0();
  const double q03 = q0 * q0 * q0;
  if (m.scheme == Scheme::nd) {
    if (m.dimension == 2) return 16 * q03 * std::pow(nt, 1.5) * (1 - 1 / std::sqrt(nt));
    return 31 * q03 * nt * nt * (1 - 1 / nt);
  }
  const double a3 = std::pow(m.alpha(m.levels), 3);
  if (m.dimension == 2) return 64 * q03 * (0.25 * (1 + a3 / 3) * nt - a3 / 3);
  return 1728 * q03 * (0.125 * (1 + a3 / 7) * nt - a3 / 7);
}

double closed_form_memory(const CostModel& m) {
  m.validate();
  const double nt = m.elements();
  const double q02 = m.q0() * m.q0();
  if (m.scheme == Scheme::nd) {
    // sum of 4 N_T q0^2 per level over log2(n) = log2(N_T)/2 levels
    if (m.dimension == 2) return 2 * q02 * nt * std::log2(nt);
    return 18 * q02 * std::pow(nt, 4.0 / 3.0) * (1 - 1 / std::cbrt(nt));
  }
  const double a2 = std::pow(m.alpha(m.levels), 2);
  if (m.dimension == 2) return 16 * q02 * (0.25 * (1 + a2 / 3) * nt - a2 / 3);
  return 144 * q02 * (0.125 * (1 + a2 / 7) * nt - a2 / 7);
}

std::vector<CostComparison> measured_vs_model(const std::vector<CostSample>& samples, int cap) {
  std::vector<CostComparison> out;
  for (const auto& s : samples) {
    CostModel m{2, s.levels, s.order, s.scheme, cap};
    CostComparison c;
    c.sample = s;
    c.sample.elements = m.elements();
    c.model_flops = model_factor_cost(m);
    c.model_memory = model_memory_cost(m);
    c.closed_flops = closed_form_factor(m);
    c.closed_memory = closed_form_memory(m);
    out.push_back(c);
  }
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("loglog_slope: size mismatch");
  if (x.size() < 3) throw std::invalid_argument("loglog_slope: need at least 3 points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw std::invalid_argument("loglog_slope: non-positive data");
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void write_cost_csv(std::ostream& os, const std::vector<CostComparison>& rows) {
  os << "scheme,p,N,N_T,measured_flops,model_flops,closed_flops,measured_memory,model_memory,closed_memory,"
        "factor_seconds\n";
  os.precision(10);
  for (const auto& r : rows)
    os << scheme_name(r.sample.scheme) << ',' << r.sample.order << ',' << r.sample.levels << ','
       << r.sample.elements << ',' << r.sample.measured_flops << ',' << r.model_flops << ',' << r.closed_flops
       << ',' << r.sample.measured_memory << ',' << r.model_memory << ',' << r.closed_memory << ','
       << r.sample.factor_seconds << '\n';
}

}  // namespace hdgml
