#include "hdgml/cases.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>

namespace hdgml {

namespace {
constexpr double pi = 3.14159265358979323846;

double boundary_mix(double x, double y) {
  return std::sin(pi * x) + std::sin(13 * pi * x) + std::sin(pi * y) + std::sin(13 * pi * y);
}

void check_range(double v, double lo, double hi, const char* what) {
  if (!(v >= lo && v <= hi))
    throw std::invalid_argument(std::string("make_case: ") + what + " = " + std::to_string(v) + " outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + "]");
}
}  // namespace

CaseId parse_case_id(const std::string& name) {
  if (name == "I" || name == "1") return CaseId::I;
  if (name == "II" || name == "2") return CaseId::II;
  if (name == "III" || name == "III-shock" || name == "3") return CaseId::III_shock;
  if (name == "III-smooth") return CaseId::III_smooth;
  if (name == "IV" || name == "4") return CaseId::IV;
  if (name == "V" || name == "5") return CaseId::V;
  if (name == "VI" || name == "6") return CaseId::VI;
  throw std::invalid_argument("unknown case id '" + name + "'");
}

std::string case_name(CaseId id) {
  switch (id) {
    case CaseId::I: return "I";
    case CaseId::II: return "II";
    case CaseId::III_shock: return "III-shock";
    case CaseId::III_smooth: return "III-smooth";
    case CaseId::IV: return "IV";
    case CaseId::V: return "V";
    case CaseId::VI: return "VI";
  }
  return "?";
}

double default_parameter(CaseId id) {
  switch (id) {
    case CaseId::IV:
    case CaseId::VI: return 10.0;
    case CaseId::V: return 1e-1;
    default: return 0.0;
  }
}

PermeabilityField::PermeabilityField(unsigned seed) {
  std::mt19937 gen(seed);
  kappa_.resize(tiles * tiles);
  for (double& k : kappa_) k = std::pow(10.0, static_cast<double>(gen() % 5));
}

double PermeabilityField::operator()(double x, double y) const {
  const int i = std::clamp(static_cast<int>(std::floor(x * tiles)), 0, tiles - 1);
  const int j = std::clamp(static_cast<int>(std::floor(y * tiles)), 0, tiles - 1);
  return kappa_[j * tiles + i];
}

BenchmarkCase make_case(CaseId id, std::optional<double> parameter, unsigned seed) {
  BenchmarkCase bc;
  bc.id = id;
  bc.name = case_name(id);
  bc.parameter = parameter.value_or(default_parameter(id));
  ProblemCoefficients& c = bc.coeffs;
  const auto identity = [](double, double) { return Eigen::Matrix2d::Identity().eval(); };
  const auto zero_beta = [](double, double) { return std::array<double, 2>{0.0, 0.0}; };
  const auto zero = [](double, double) { return 0.0; };

  switch (id) {
    case CaseId::I: {
      bc.exact = [](double x, double y) { return std::sin(pi * x) * std::cos(pi * y) / (pi * pi); };
      c.K = identity;
      c.beta = zero_beta;
      c.f = [](double x, double y) { return 2.0 * std::sin(pi * x) * std::cos(pi * y); };
      c.g = bc.exact;
      c.uniform = true;
      break;
    }
    case CaseId::II: {
      auto field = std::make_shared<PermeabilityField>(seed);
      c.K = [field](double x, double y) { return ((*field)(x, y) * Eigen::Matrix2d::Identity()).eval(); };
      c.beta = zero_beta;
      c.f = [](double, double) { return 1.0; };
      c.g = zero;
      break;
    }
    case CaseId::III_shock:
    case CaseId::III_smooth: {
      bc.domain = {0.0, 2.0, 0.0, 2.0};
      c.mode = TransportMode::pure_transport;
      c.beta = [](double, double y) { return std::array<double, 2>{1.0 + std::sin(pi * y / 2), 2.0}; };
      if (id == CaseId::III_shock) {
        c.f = zero;
        c.g = [](double x, double y) {
          if (x <= 0.0) return 1.0;
          if (y <= 0.0 && x <= 1.0) return std::pow(std::sin(pi * x), 6);
          return 0.0;
        };
      } else {
        bc.exact = [](double x, double y) { return std::sin(pi * x) * std::cos(pi * y) / pi; };
        c.f = [](double x, double y) {
          const double ux = std::cos(pi * x) * std::cos(pi * y);
          const double uy = -std::sin(pi * x) * std::sin(pi * y);
          return (1.0 + std::sin(pi * y / 2)) * ux + 2.0 * uy;
        };
        c.g = bc.exact;
      }
      break;
    }
    case CaseId::IV: {
      check_range(bc.parameter, 10.0, 1e4, "alpha");
      const double a = bc.parameter;
      c.K = identity;
      c.beta = [a](double x, double y) {
        return std::array<double, 2>{-a * std::cos(4 * pi * y), -a * std::cos(4 * pi * x)};
      };
      c.f = zero;
      c.g = [](double, double y) { return std::cos(2 * y) * (1 - 2 * y); };
      break;
    }
    case CaseId::V: {
      check_range(bc.parameter, 1e-4, 1e-1, "kappa");
      const double k = bc.parameter;
      c.K = [k](double, double) { return (k * Eigen::Matrix2d::Identity()).eval(); };
      c.beta = [](double x, double y) {
        return std::array<double, 2>{(2 * y - 1) * (1 - x * x), 2 * x * y * (y - 1)};
      };
      c.f = zero;
      c.g = boundary_mix;
      break;
    }
    case CaseId::VI: {
      check_range(bc.parameter, 10.0, 1e4, "alpha");
      const double a = bc.parameter;
      c.K = identity;
      c.beta = [a](double x, double y) {
        return std::array<double, 2>{4 * a * x * (x - 1) * (1 - 2 * y), -4 * a * y * (y - 1) * (1 - 2 * x)};
      };
      c.f = zero;
      c.g = boundary_mix;
      break;
    }
  }
  return bc;
}

double l2_error(const TraceSystem& system, const VolumeSolution& volume,
                const std::function<double(double, double)>& exact) {
  const StructuredMesh& mesh = system.mesh;
  const int p = system.order;
  const LagrangeBasis basis(p);
  const auto rule = gauss_legendre(p + 4);
  const int nq = rule.size();
  const Eigen::MatrixXd l = basis.values(rule.points);
  const double jac = mesh.hx() * mesh.hy() / 4.0;
  double sum = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    const auto o = mesh.element_origin(e);
    const Eigen::VectorXd& u = volume.u[e];
    for (int b = 0; b < nq; ++b)
      for (int a = 0; a < nq; ++a) {
        double uh = 0.0;
        for (int ib = 0; ib <= p; ++ib)
          for (int ia = 0; ia <= p; ++ia) uh += u(ia + (p + 1) * ib) * l(a, ia) * l(b, ib);
        const double x = o[0] + (rule.points[a] + 1) * mesh.hx() / 2;
        const double y = o[1] + (rule.points[b] + 1) * mesh.hy() / 2;
        const double d = uh - exact(x, y);
        sum += rule.weights[a] * rule.weights[b] * jac * d * d;
      }
  }
  return std::sqrt(sum);
}

ErrorNorms error_norms(const BenchmarkCase& bc, const TraceSystem& system, const Eigen::VectorXd& lambda,
                       const Eigen::VectorXd* direct) {
  ErrorNorms out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  out.l2_u = bc.exact ? l2_error(system, recover_volume(system, lambda), bc.exact) : nan;
  if (direct) {
    if (direct->size() != lambda.size()) throw std::invalid_argument("error_norms: dimension mismatch");
    out.error_vs_direct = lambda.size() ? (lambda - *direct).cwiseAbs().maxCoeff() : 0.0;
  } else {
    out.error_vs_direct = nan;
  }
  return out;
}

}  // namespace hdgml
