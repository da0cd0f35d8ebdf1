// Serial reference vs OpenMP kernels on a synthetic graph.
//
//   ./partrans_kernels --benchmark_counters_tabular=true

#include <benchmark/benchmark.h>

#include "partrans/evaluator.hpp"
#include "partrans/trainer.hpp"

using namespace partrans;

namespace {

const KnowledgeGraph& graph() {
  static const KnowledgeGraph g = synth_typed_graph(2000, 20, 8, 20000, 500, 1);
  return g;
}

TrainConfig config(std::size_t threads) {
  TrainConfig c;
  c.dim = 50;
  c.epochs = 4;
  c.threads = threads;
  return c;
}

void BM_TrainSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(train_serial(graph(), config(1)).store);
  state.counters["iters/s"] = benchmark::Counter(
      static_cast<double>(state.iterations() * 4 * graph().num_train()), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_TrainSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_TrainParallel(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(train(graph(), config(p)).store);
  const auto epochs = config(p).epochs_per_worker() * p;
  state.counters["iters/s"] = benchmark::Counter(
      static_cast<double>(state.iterations() * epochs * graph().num_train()),
      benchmark::Counter::kIsRate);
}
BENCHMARK(BM_TrainParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

const EmbeddingStore& trained() {
  static const EmbeddingStore s = train_serial(graph(), config(1)).store;
  return s;
}

void BM_EvaluateSerial(benchmark::State& state) {
  trained();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_serial(trained(), graph(), {}));
}
BENCHMARK(BM_EvaluateSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_EvaluateParallel(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  trained();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(trained(), graph(), {}, p));
}
BENCHMARK(BM_EvaluateParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
