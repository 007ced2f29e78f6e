#include <benchmark/benchmark.h>

#include "qms/kernels.hpp"
#include "qms/models.hpp"
#include "qms/opsys.hpp"

namespace {

using namespace qms;

// Ergodic seminorm on M_q at level s: q^2 - 1 sandwich terms on a (s q)-dimensional matrix.
struct SandwichCase {
  GroupActionModel model;
  SeminormFamily family;
  AmplifiedElement z;

  SandwichCase(std::size_t q, std::size_t s)
      : model(q, 1), family(ergodic_seminorm(model)), z(random_element(*model.system(), s, 42)) {}
};

void sandwich_args(benchmark::internal::Benchmark* b) {
  for (int q : {3, 5, 7})
    for (int s : {1, 3}) b->Args({q, s});
}

void BM_SandwichSerial(benchmark::State& state) {
  const SandwichCase c(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::sandwich_max(c.family.terms(), c.z.realization));
}
BENCHMARK(BM_SandwichSerial)->Apply(sandwich_args)->Unit(benchmark::kMicrosecond);

void BM_SandwichOmp(benchmark::State& state) {
  const SandwichCase c(state.range(0), state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::sandwich_max(c.family.terms(), c.z.realization));
}
BENCHMARK(BM_SandwichOmp)->Apply(sandwich_args)->Unit(benchmark::kMicrosecond);

// Dirac symbol norm of a random torus polynomial over a g x g grid.
struct GridCase {
  TorusModel model{2, 5};
  TorusPolynomial x = random_torus_polynomial(2, 3, 7);

  ComplexMatrix symbol(double t1, double t2) const { return model.dirac_symbol(x, t1, t2); }
};

void BM_GridSerial(benchmark::State& state) {
  const GridCase c;
  const auto f = [&](double t1, double t2) { return c.symbol(t1, t2); };
  for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::grid_max_norm(state.range(0), f));
}
BENCHMARK(BM_GridSerial)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_GridOmp(benchmark::State& state) {
  const GridCase c;
  const auto f = [&](double t1, double t2) { return c.symbol(t1, t2); };
  for (auto _ : state) benchmark::DoNotOptimize(kernels::omp::grid_max_norm(state.range(0), f));
}
BENCHMARK(BM_GridOmp)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
