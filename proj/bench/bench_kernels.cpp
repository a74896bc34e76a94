#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ks/density.hpp"
#include "ks/hilbert.hpp"
#include "ks/stieltjes.hpp"

using namespace ks;

namespace {

std::vector<double> grid(int count) {
  std::vector<double> g;
  for (int i = 0; i < count; ++i) {
    const double x = 1e-2 * std::pow(1e4, static_cast<double>(i) / (count - 1));
    g.push_back(x);
    g.push_back(-x);
  }
  return g;
}

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

void BM_HilbertGrid(benchmark::State& state) {
  const LogDensityExpr u = *make_odd_normal_power(2).log_expr();
  const std::function<double(double)> fn = [u](double x) { return u(x); };
  HilbertOptions opts;
  opts.parity = InputParity::Even;
  const auto g = grid(64);
  for (auto _ : state) benchmark::DoNotOptimize(hilbert_grid(fn, g, opts, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * g.size());
}

void BM_CrossValidate(benchmark::State& state) {
  const LogDensityExpr u = *make_odd_normal_power(1).log_expr();
  const auto g = grid(32);
  for (auto _ : state) benchmark::DoNotOptimize(cross_validate(u, g, 1e-6, Transform::H, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * g.size());
}

void BM_VerifyMoments(benchmark::State& state) {
  const auto cls = build_class_halfline(make_abs_normal_power(6.0));
  VerifyOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(verify_moments(cls, 8, opts));
}

}  // namespace

// Argument 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_HilbertGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_CrossValidate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_VerifyMoments)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
