#include <doctest.h>

#include "hdgml/complexity.hpp"

#include <cmath>
#include <sstream>

using namespace hdgml;

TEST_CASE("model sums") {
  CostModel nd{2, 1, 1, Scheme::nd, 10};
  CHECK(model_factor_cost(nd) == 512.0);
  CHECK(model_memory_cost(nd) == 64.0);

  for (int n = 1; n <= 10; ++n)
    for (int p = 1; p <= 4; ++p) {
      const CostModel ml{2, n, p, Scheme::ml, 10};
      const double q0 = p + 1.0;
      CHECK(model_factor_cost(ml) == doctest::Approx(64 * q0 * q0 * q0 * (std::pow(4.0, n) - 1) / 3));
      CHECK(model_memory_cost(ml) == doctest::Approx(16 * q0 * q0 * (std::pow(4.0, n) - 1) / 3));
      // ML is EML without enrichment
      const CostModel eml0{2, n, p, Scheme::eml, p};
      CHECK(model_factor_cost(eml0) == model_factor_cost(ml));
      CHECK(ml.alpha(n) == 1.0);
    }

  const CostModel eml{2, 3, 2, Scheme::eml, 10};
  CHECK(model_factor_cost(eml) == 16.0 * 12 * 12 * 12 + 4.0 * 16 * 16 * 16 + 20.0 * 20 * 20);
  CHECK(model_memory_cost(eml) == 16.0 * 12 * 12 + 4.0 * 16 * 16 + 20.0 * 20);
  CHECK(eml.alpha(3) == doctest::Approx(5.0 / 3.0));
  const CostModel capped{2, 12, 2, Scheme::eml, 10};
  CHECK(capped.order_at(12) == 10);
}

TEST_CASE("closed forms") {
  for (int p = 1; p <= 3; ++p) {
    double prev_gap = 1e300;
    for (int n = 2; n <= 12; ++n) {
      const CostModel nd{2, n, p, Scheme::nd, 10};
      CHECK(closed_form_factor(nd) == doctest::Approx(model_factor_cost(nd)).epsilon(1e-12));
      CHECK(closed_form_memory(nd) == doctest::Approx(model_memory_cost(nd)).epsilon(1e-12));
      const CostModel ml{2, n, p, Scheme::ml, 10};
      CHECK(closed_form_factor(ml) == doctest::Approx(model_factor_cost(ml)).epsilon(1e-12));
      const CostModel eml{2, n, p, Scheme::eml, 10};
      CHECK(closed_form_factor(eml) >= model_factor_cost(eml) * (1 - 1e-12));
      CHECK(closed_form_memory(eml) >= model_memory_cost(eml) * (1 - 1e-12));
      // 3D ND closed form uses a rounded leading constant
      const CostModel nd3{3, n, p, Scheme::nd, 10};
      const double gap = std::abs(closed_form_factor(nd3) / model_factor_cost(nd3) - 1);
      CHECK(gap <= prev_gap * (1 + 1e-12));
      prev_gap = gap;
    }
    CHECK(prev_gap < 0.01);
  }
  const CostModel ml3{3, 4, 2, Scheme::ml, 10};
  CHECK(closed_form_factor(ml3) == doctest::Approx(model_factor_cost(ml3)).epsilon(1e-12));
  CHECK(closed_form_memory(ml3) == doctest::Approx(model_memory_cost(ml3)).epsilon(1e-12));
}

TEST_CASE("log-log slope") {
  const std::vector<double> x{1, 2, 4, 8};
  std::vector<double> y;
  for (double v : x) y.push_back(3 * std::pow(v, 1.5));
  CHECK(loglog_slope(x, y) == doctest::Approx(1.5));
  CHECK_THROWS_AS(loglog_slope({1, 2}, {1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(loglog_slope({1, 2, 3}, {1, -2, 3}), std::invalid_argument);
}

TEST_CASE("modelled counters compare to themselves") {
  std::vector<CostSample> samples;
  for (int n = 4; n <= 7; ++n) {
    const CostModel m{2, n, 2, Scheme::ml, 10};
    samples.push_back({Scheme::ml, 2, n, 0.0, model_factor_cost(m), model_memory_cost(m), 0.0});
  }
  const auto rows = measured_vs_model(samples);
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.model_flops == r.sample.measured_flops);
    CHECK(r.sample.elements == std::pow(4.0, r.sample.levels));
  }
  std::ostringstream os;
  write_cost_csv(os, rows);
  CHECK(os.str().rfind("scheme,p,N,N_T", 0) == 0);
  CHECK_THROWS(CostModel{4, 2, 1, Scheme::ml, 10}.validate());
}
