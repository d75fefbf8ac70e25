// Serial reference vs OpenMP kernels, plus the end-to-end costs that bound
// training and evaluation time.

#include <benchmark/benchmark.h>

#include <vector>

#include "adex/agents/ddqn.hpp"
#include "adex/kernels.hpp"
#include "adex/nn/network.hpp"
#include "adex/rng.hpp"

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  adex::Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

template <auto Kernel>
void BM_xw(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto cols = static_cast<std::size_t>(state.range(1));
  const auto w = random_vector(rows * cols, 1);
  const auto x = random_vector(rows, 2);
  std::vector<double> y(cols, 0.0);
  for (auto _ : state) {
    Kernel(w, rows, cols, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rows * cols));
}

template <auto Kernel>
void BM_outer(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto cols = static_cast<std::size_t>(state.range(1));
  std::vector<double> g(rows * cols, 0.0);
  const auto x = random_vector(rows, 2);
  const auto v = random_vector(cols, 3);
  for (auto _ : state) {
    Kernel(g, rows, cols, x, v);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(rows * cols));
}

BENCHMARK(BM_xw<adex::kernels::serial::accumulate_xw>)->Args({625, 100})->Args({110, 440});
BENCHMARK(BM_xw<adex::kernels::parallel::accumulate_xw>)->Args({625, 100})->Args({110, 440});
BENCHMARK(BM_outer<adex::kernels::serial::accumulate_outer>)->Args({625, 100})->Args({110, 440});
BENCHMARK(BM_outer<adex::kernels::parallel::accumulate_outer>)->Args({625, 100})->Args({110, 440});

template <auto Kernel>
void BM_gemm(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto n = static_cast<std::size_t>(state.range(2));
  const auto a = random_vector(m * k, 1);
  const auto b = random_vector(k * n, 2);
  std::vector<double> c(m * n, 0.0);
  for (auto _ : state) {
    Kernel(a, b, c, m, k, n);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(m * k * n));
}

BENCHMARK(BM_gemm<adex::kernels::serial::gemm>)->Args({160, 625, 100})->Args({32, 110, 440});
BENCHMARK(BM_gemm<adex::kernels::parallel::gemm>)->Args({160, 625, 100})->Args({32, 110, 440});

adex::nn::History random_history(std::uint64_t seed) {
  adex::nn::History h(adex::nn::kHistoryLength, 31, adex::nn::kEgoMapSize);
  auto s = random_vector(h.states().size(), seed);
  auto m = random_vector(h.maps().size(), seed + 1);
  std::copy(s.begin(), s.end(), h.mutable_states().begin());
  std::copy(m.begin(), m.end(), h.mutable_maps().begin());
  return h;
}

void BM_nav_forward(benchmark::State& state) {
  adex::nn::PolicyNetwork net(adex::nn::navigation_spec());
  adex::Rng rng(5);
  net.initialize(rng);
  const auto h = random_history(7);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(h));
}
BENCHMARK(BM_nav_forward);

void BM_ddqn_update(benchmark::State& state) {
  adex::agents::NavigationLearner learner({}, true, 11);
  std::vector<adex::agents::Transition> batch;
  for (std::uint64_t i = 0; i < 32; ++i) {
    batch.push_back({random_history(100 + i), i % 5, 0.5, random_history(200 + i), i % 7 == 0});
  }
  std::vector<const adex::agents::Transition*> ptrs;
  for (const auto& t : batch) ptrs.push_back(&t);
  for (auto _ : state) benchmark::DoNotOptimize(learner.update(ptrs));
}
BENCHMARK(BM_ddqn_update)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
