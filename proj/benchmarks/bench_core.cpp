#include <benchmark/benchmark.h>

#include "clab/examples.hpp"
#include "clab/hostkra.hpp"

using namespace clab;

namespace {

GroupHom identity_hom(const FinAbGroup& z) {
  std::vector<GroupElement> images;
  for (int i = 0; i < z.rank(); ++i) images.push_back(z.generator(i));
  return make_hom(z, z, images);
}

void BM_cube_system(benchmark::State& state) {
  ExampleBundle b = example_char2(int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(cube_system(*b.rho.base, 2));
}
BENCHMARK(BM_cube_system)->Arg(3)->Arg(4)->Arg(5);

void BM_type_test(benchmark::State& state) {
  ExampleBundle b = example_char2(int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(type_test(b.rho, 2).ok());
}
BENCHMARK(BM_type_test)->Arg(3)->Arg(4)->Arg(5);

void BM_cl_solve(benchmark::State& state) {
  ExampleBundle b = example_char2(int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(cl_solve(b.rho).ok());
}
BENCHMARK(BM_cl_solve)->Arg(2)->Arg(3)->Arg(4);

void BM_host_kra_group(benchmark::State& state) {
  ExampleBundle b = example_char2(int(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(host_kra_group(b.rho).size());
}
BENCHMARK(BM_host_kra_group)->Arg(1)->Arg(2)->Arg(3);

void BM_structure_report(benchmark::State& state) {
  ExampleBundle b = example_char2(int(state.range(0)));
  HKGroup g = host_kra_group(b.rho);
  for (auto _ : state)
    benchmark::DoNotOptimize(structure_report(g).commutator_order);
}
BENCHMARK(BM_structure_report)->Arg(2)->Arg(3);

void BM_gowers_norm(benchmark::State& state) {
  FinAbGroup z({(long long)state.range(0)});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  ObservableC f;
  for (int p = 0; p < x.n_points; ++p)
    f.values.push_back({double(p % 3) - 1.0, double(p % 2)});
  for (auto _ : state)
    benchmark::DoNotOptimize(gowers_norm(x, f, 2));
}
BENCHMARK(BM_gowers_norm)->Arg(8)->Arg(16);

void BM_mackey_reduce(benchmark::State& state) {
  ExampleBundle b = example_char2(int(state.range(0)));
  FiniteSystem ext = extension_build(b.rho);
  auto comps = ergodic_components(ext);
  for (auto _ : state)
    benchmark::DoNotOptimize(mackey_reduce(b.rho, comps.front()).mackey_group.size());
}
BENCHMARK(BM_mackey_reduce)->Arg(2)->Arg(3)->Arg(4);

} // namespace

BENCHMARK_MAIN();
