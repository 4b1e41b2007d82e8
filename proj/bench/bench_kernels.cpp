#include <benchmark/benchmark.h>

#include <map>
#include <utility>

#include "optpart/diffusion.hpp"
#include "optpart/init.hpp"
#include "optpart/projection.hpp"
#include "optpart/reference.hpp"
#include "optpart/scheme.hpp"

namespace {

using namespace optpart;

/// Diffused Voronoi state: overlapping supports, so projections do real work.
const std::vector<Field>& input(int n, int k) {
  static std::map<std::pair<int, int>, std::vector<Field>> cache;
  auto it = cache.find({n, k});
  if (it == cache.end()) {
    const GridSpec g(2, n);
    SchemeConfig cfg;
    it = cache.emplace(std::pair{n, k}, diffuse(voronoi_init(g, k, 1, Boundary::periodic), cfg, 0.1)).first;
  }
  return it->second;
}

template <auto Kernel>
void run_kernel(benchmark::State& state) {
  const auto& parts = input(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(parts));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(parts.size() * parts[0].size()));
}

std::vector<Field> ratio_serial(const std::vector<Field>& p) {
  return reference::ortho_step_ratio(reference::positivity_step(p));
}
std::vector<Field> ratio_omp(const std::vector<Field>& p) { return ortho_step_ratio(positivity_step(p)); }
std::vector<Field> linear_serial(const std::vector<Field>& p) { return reference::ortho_pos_step_linear(p); }
std::vector<Field> linear_omp(const std::vector<Field>& p) { return ortho_pos_step_linear(p); }
std::vector<Field> geometric_serial(const std::vector<Field>& p) {
  return reference::ortho_pos_step_geometric(p);
}
std::vector<Field> geometric_omp(const std::vector<Field>& p) { return ortho_pos_step_geometric(p); }
std::vector<Field> norm_serial(const std::vector<Field>& p) { return reference::norm_step(p); }
std::vector<Field> norm_omp(const std::vector<Field>& p) { return norm_step(p); }

void heat(benchmark::State& state) {
  const Field& f = input(static_cast<int>(state.range(0)), 2)[0];
  for (auto _ : state) benchmark::DoNotOptimize(heat_semigroup_periodic(f, 0.1));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {256, 512})
    for (int k : {4, 8}) b->Args({n, k});
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(run_kernel<ratio_serial>)->Name("ratio/serial")->Apply(sizes);
BENCHMARK(run_kernel<ratio_omp>)->Name("ratio/openmp")->Apply(sizes);
BENCHMARK(run_kernel<linear_serial>)->Name("linear/serial")->Apply(sizes);
BENCHMARK(run_kernel<linear_omp>)->Name("linear/openmp")->Apply(sizes);
BENCHMARK(run_kernel<geometric_serial>)->Name("geometric/serial")->Apply(sizes);
BENCHMARK(run_kernel<geometric_omp>)->Name("geometric/openmp")->Apply(sizes);
BENCHMARK(run_kernel<norm_serial>)->Name("norm/serial")->Apply(sizes);
BENCHMARK(run_kernel<norm_omp>)->Name("norm/openmp")->Apply(sizes);
BENCHMARK(heat)->Name("heat/periodic")->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
