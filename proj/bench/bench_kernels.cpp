// Serial vs OpenMP kernels on Example IV (alpha = 100).
// Args: {N, p, parallel}.

#include <benchmark/benchmark.h>

#include "hdgml/experiment.hpp"

#include <map>
#include <memory>

using namespace hdgml;

namespace {

Exec mode(const benchmark::State& st) { return st.range(2) ? Exec::parallel : Exec::serial; }

Pipeline& pipeline(int n, int p) {
  static std::map<std::pair<int, int>, std::unique_ptr<Pipeline>> cache;
  auto& slot = cache[{n, p}];
  if (!slot) {
    SolveSetup s;
    s.example = CaseId::IV;
    s.parameter = 100.0;
    s.levels = n;
    s.order = p;
    slot = std::make_unique<Pipeline>(s);
    slot->build_coarse(CoarseKind::ml, {}, true);
  }
  return *slot;
}

void bm_bsr_multiply(benchmark::State& st) {
  Pipeline& pl = pipeline(st.range(0), st.range(1));
  const BlockCsr& a = pl.system().matrix;
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(a.rows());
  Eigen::VectorXd y(a.rows());
  for (auto _ : st) {
    a.multiply(x, y, mode(st));
    benchmark::DoNotOptimize(y.data());
  }
  st.counters["nnz"] = static_cast<double>(a.nonzeros());
}

void bm_assembly(benchmark::State& st) {
  Pipeline& pl = pipeline(st.range(0), st.range(1));
  for (auto _ : st) {
    TraceSystem s = assemble_trace_system(pl.hierarchy().mesh(), pl.problem().coeffs, st.range(1), &pl.hierarchy(),
                                          mode(st));
    benchmark::DoNotOptimize(s.rhs.data());
  }
}

void bm_block_jacobi(benchmark::State& st) {
  Pipeline& pl = pipeline(st.range(0), st.range(1));
  const BlockJacobiSmoother& bj = pl.smoother();
  const Eigen::VectorXd r = Eigen::VectorXd::Ones(pl.system().matrix.rows());
  for (auto _ : st) {
    Eigen::VectorXd z = bj.apply_inverse(r, mode(st));
    benchmark::DoNotOptimize(z.data());
  }
}

void bm_galerkin(benchmark::State& st) {
  Pipeline& pl = pipeline(st.range(0), st.range(1));
  for (auto _ : st) {
    SegmentMatrix a1 = galerkin_coarse_matrix(pl.system().matrix, pl.projection(), mode(st));
    benchmark::DoNotOptimize(&a1);
  }
}

void bm_factorization(benchmark::State& st) {
  Pipeline& pl = pipeline(st.range(0), st.range(1));
  const SegmentMatrix& a1 = pl.coarse_matrix();
  for (auto _ : st) {
    MultilevelFactorization f(a1, pl.projection().space().fronts, {mode(st)});
    benchmark::DoNotOptimize(&f);
  }
}

void args(benchmark::internal::Benchmark* b) {
  for (int n : {5, 6})
    for (int p : {2, 4})
      for (int par : {0, 1}) b->Args({n, p, par});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(bm_bsr_multiply)->Apply(args);
BENCHMARK(bm_assembly)->Apply(args);
BENCHMARK(bm_block_jacobi)->Apply(args);
BENCHMARK(bm_galerkin)->Apply(args);
BENCHMARK(bm_factorization)->Apply(args);

BENCHMARK_MAIN();
