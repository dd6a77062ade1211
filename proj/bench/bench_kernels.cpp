// Serial reference kernels against their OpenMP counterparts. The second
// benchmark argument is the worker count; 0 selects the serial version.

#include <benchmark/benchmark.h>

#include <map>
#include <numeric>
#include <random>

#include "oocl/oracle.hpp"
#include "oocl/screen.hpp"
#include "oocl/solver.hpp"

namespace {

using namespace oocl;

constexpr std::size_t kRows = 1000;

struct Fixture {
  SynthData data;
  MatrixView view;
  ColumnStats stats;
  BedppCache cache;
  ResidualState residual;
  std::vector<std::size_t> all_cols;
  std::vector<double> weights;

  explicit Fixture(std::size_t p) : data(make(p)), view(data.x) {
    stats = compute_column_stats(view);
    const double lmax = lambda_max(view, data.y, stats, 1.0);
    fill_xtx_star(view, stats, stats.star);
    const double ybar =
        std::accumulate(data.y.begin(), data.y.end(), 0.0) / static_cast<double>(kRows);
    double ss = 0;
    for (double t : data.y) ss += (t - ybar) * (t - ybar);
    cache = make_bedpp_cache(stats, ss, lmax, Family::gaussian, 1.0);
    residual.assign(data.y);
    all_cols.resize(p);
    std::iota(all_cols.begin(), all_cols.end(), std::size_t{0});
    weights.assign(kRows, 0.25);
  }

  static SynthData make(std::size_t p) {
    SynthSpec spec;
    spec.n = kRows;
    spec.p = p;
    return gen_synth_memory(spec);
  }
};

const Fixture& fixture(std::size_t p) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(p);
  if (it == cache.end()) it = cache.try_emplace(p, p).first;
  return it->second;
}

void BM_ColumnStats(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    ColumnStats st = workers == 0 ? serial::compute_column_stats(f.view)
                                  : compute_column_stats(f.view, workers);
    benchmark::DoNotOptimize(st.scale.data());
  }
}

void BM_ScanXr(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  std::vector<double> out(f.all_cols.size());
  for (auto _ : state) {
    if (workers == 0)
      serial::scan_xr(f.view, f.stats, f.all_cols, f.residual, out);
    else
      scan_xr(f.view, f.stats, f.all_cols, f.residual, out, workers);
    benchmark::DoNotOptimize(out.data());
  }
}

void BM_WeightedMoments(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  std::vector<double> xw(f.all_cols.size()), xxw(f.all_cols.size());
  for (auto _ : state) {
    if (workers == 0)
      serial::weighted_moments(f.view, f.stats, f.all_cols, f.weights, xw, xxw);
    else
      weighted_moments(f.view, f.stats, f.all_cols, f.weights, xw, xxw, workers);
    benchmark::DoNotOptimize(xxw.data());
  }
}

void BM_Bedpp(benchmark::State& state) {
  const Fixture& f = fixture(static_cast<std::size_t>(state.range(0)));
  const int workers = static_cast<int>(state.range(1));
  const double lam = 0.5 * f.cache.lambda_max;
  for (auto _ : state) {
    Mask m = workers == 0 ? serial::bedpp_filter(f.cache, lam)
                          : bedpp_filter(f.cache, lam, workers);
    benchmark::DoNotOptimize(m.data());
  }
}

void Args(benchmark::internal::Benchmark* b) {
  for (long p : {2000, 20000})
    for (long w : {0, 1, 2, 4}) b->Args({p, w});
  b->ArgNames({"p", "workers"})->Unit(benchmark::kMillisecond)->UseRealTime();
}

BENCHMARK(BM_ColumnStats)->Apply(Args);
BENCHMARK(BM_ScanXr)->Apply(Args);
BENCHMARK(BM_WeightedMoments)->Apply(Args);
BENCHMARK(BM_Bedpp)->Apply(Args);

}  // namespace

BENCHMARK_MAIN();
