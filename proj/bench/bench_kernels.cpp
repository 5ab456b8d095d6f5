#include <benchmark/benchmark.h>

#include <random>

#include "bpcl/awf.hpp"
#include "bpcl/reference.hpp"
#include "bpcl/sweeps.hpp"

using namespace bpcl;

namespace {

const KernelSpec K = tensor_hilbert();

MeshFunction noise(const BoxDomain& d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  MeshFunction f(d);
  for (auto& z : f.values()) z = Complex(N(rng), N(rng));
  return f;
}

// Off-support application from a level-5 rectangle to its reflection, box depth from the argument.
struct OffSupport {
  BoxDomain d;
  MeshFunction g;
  std::vector<Cell> targets;
  explicit OffSupport(int depth) : d(BoxDomain::square(32.0, depth)) {
    const auto R = make_rectangle(5, 0, 5, 0);
    g = pointwise(noise(d, 1), indicator(d, R));
    targets = cells_of(d, reflect_rectangle(d, R, 8.0, K));
  }
};

void BM_offsupport_parallel(benchmark::State& st) {
  const OffSupport c(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(apply_offsupport(K, c.g, c.targets));
}
void BM_offsupport_reference(benchmark::State& st) {
  const OffSupport c(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::apply_offsupport(K, c.g, c.targets));
}

void BM_commutator_form_parallel(benchmark::State& st) {
  const auto d = BoxDomain::square(4.0, static_cast<int>(st.range(0)));
  const auto b = noise(d, 2), f = pointwise(noise(d, 3), indicator(d, make_rectangle(1, 0, 1, 0)));
  const auto g = pointwise(noise(d, 4), indicator(d, make_rectangle(1, 1, 1, 1)));
  for (auto _ : st) benchmark::DoNotOptimize(commutator_form(b, K, f, g));
}
void BM_commutator_form_reference(benchmark::State& st) {
  const auto d = BoxDomain::square(4.0, static_cast<int>(st.range(0)));
  const auto b = noise(d, 2), f = pointwise(noise(d, 3), indicator(d, make_rectangle(1, 0, 1, 0)));
  const auto g = pointwise(noise(d, 4), indicator(d, make_rectangle(1, 1, 1, 1)));
  for (auto _ : st) benchmark::DoNotOptimize(reference::commutator_form(b, K, f, g));
}

void BM_little_bmo_parallel(benchmark::State& st) {
  const auto b = noise(BoxDomain::square(1.0, static_cast<int>(st.range(0))), 5);
  for (auto _ : st) benchmark::DoNotOptimize(little_bmo(b));
}
void BM_little_bmo_reference(benchmark::State& st) {
  const auto b = noise(BoxDomain::square(1.0, static_cast<int>(st.range(0))), 5);
  for (auto _ : st) benchmark::DoNotOptimize(reference::little_bmo(b));
}

void BM_mixed_norm_parallel(benchmark::State& st) {
  const auto f = noise(BoxDomain::square(1.0, static_cast<int>(st.range(0))), 6);
  for (auto _ : st) benchmark::DoNotOptimize(mixed_norm(f, MixedNormSpec{0, 3.0, 2.0}));
}
void BM_mixed_norm_reference(benchmark::State& st) {
  const auto f = noise(BoxDomain::square(1.0, static_cast<int>(st.range(0))), 6);
  for (auto _ : st) benchmark::DoNotOptimize(reference::mixed_norm(f, MixedNormSpec{0, 3.0, 2.0}));
}

void BM_apply_model_parallel(benchmark::State& st) {
  const auto d = BoxDomain::square(1.0, static_cast<int>(st.range(0)));
  std::mt19937_64 rng(7);
  const auto S = ModelOperator::generate(random_inputs::random_model(rng, ModelKind::shift, 2), d);
  const auto f = noise(d, 8);
  for (auto _ : st) benchmark::DoNotOptimize(apply_model(S, f));
}
void BM_apply_model_reference(benchmark::State& st) {
  const auto d = BoxDomain::square(1.0, static_cast<int>(st.range(0)));
  std::mt19937_64 rng(7);
  const auto S = ModelOperator::generate(random_inputs::random_model(rng, ModelKind::shift, 2), d);
  const auto f = noise(d, 8);
  for (auto _ : st) benchmark::DoNotOptimize(reference::apply_model(S, f));
}

}  // namespace

BENCHMARK(BM_offsupport_parallel)->DenseRange(7, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_offsupport_reference)->DenseRange(7, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_commutator_form_parallel)->DenseRange(5, 6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_commutator_form_reference)->DenseRange(5, 6)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_little_bmo_parallel)->DenseRange(6, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_little_bmo_reference)->DenseRange(6, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_mixed_norm_parallel)->DenseRange(7, 8)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_mixed_norm_reference)->DenseRange(7, 8)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_apply_model_parallel)->DenseRange(6, 8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_apply_model_reference)->DenseRange(6, 8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
