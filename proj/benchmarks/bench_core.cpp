#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "speculus/quad.hpp"
#include "speculus/specular.hpp"
#include "speculus/waves.hpp"

using namespace speculus;

static void BM_ACombine(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-10, 10);
  std::vector<double> a(1024), b(1024);
  for (auto& x : a) x = d(rng);
  for (auto& x : b) x = d(rng);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(a_combine(a[i & 1023], b[i & 1023]));
    ++i;
  }
}
BENCHMARK(BM_ACombine);

static void BM_Evaluate(benchmark::State& state) {
  auto u = from_expression("abs(2*x - y) + abs(x - 3) + elu(x + y - 1)*y", {"x", "y"});
  std::vector<double> p{0.7, -1.3};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(u, p));
}
BENCHMARK(BM_Evaluate);

static void BM_SpecularField(benchmark::State& state) {
  auto u = from_expression("abs(2*x - y) + abs(x - 3)", {"x", "y"});
  for (auto _ : state) {
    auto f = specular_field(u, 0);
    benchmark::DoNotOptimize(f.branches.size());
  }
}
BENCHMARK(BM_SpecularField);

static void BM_SolveHalfLine(benchmark::State& state) {
  auto phi = from_expression("(x-1)*abs(x-1)/2 + x^2/2 + 1/2", {"x"});
  auto psi = from_expression("abs(x-1) - 1", {"x"});
  for (auto _ : state) {
    auto s = solve_wave_halfline(phi, psi);
    benchmark::DoNotOptimize(s.u.forms.size());
  }
  state.SetLabel("includes precondition checks");
}
BENCHMARK(BM_SolveHalfLine)->Unit(benchmark::kMillisecond);

static void BM_IntegrateTriangle(benchmark::State& state) {
  auto f = from_expression("abs(x - t - 1) + sgn(x + t)*t", {"x", "t"});
  double t0 = static_cast<double>(state.range(0)) / 4;
  for (auto _ : state) benchmark::DoNotOptimize(integrate_triangle(f, 0.3, t0));
}
BENCHMARK(BM_IntegrateTriangle)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
