#include <benchmark/benchmark.h>

#include <vector>

#include "resparse/clustering.hpp"
#include "resparse/graph.hpp"
#include "resparse/leverage.hpp"
#include "resparse/linalg.hpp"
#include "resparse/presets.hpp"
#include "resparse/spanner.hpp"
#include "resparse/streaming.hpp"

using namespace resparse;

namespace {

WeightedGraph bench_graph(std::int64_t n) {
  return generate(GraphFamily::gnp, static_cast<std::size_t>(n), 1, 0.1);
}

void BM_PinvApply(benchmark::State& state) {
  const WeightedGraph g = bench_graph(state.range(0));
  const std::vector<Row> rows = graph_rows(g);
  const GramOperator op(g.num_vertices(), rows);
  const ComponentKernel kernel = ComponentKernel::of(g);
  Vector b = Vector::Zero(static_cast<Eigen::Index>(g.num_vertices()));
  b(0) = 1.0;
  b(b.size() - 1) = -1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pinv_apply(op, b, &kernel).x.data());
  }
}
BENCHMARK(BM_PinvApply)->Arg(200)->Arg(1000)->Arg(4000);

void BM_ExactLeverage(benchmark::State& state) {
  const WeightedGraph g = bench_graph(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exact_leverage(g).sum());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_ExactLeverage)->Arg(100)->Arg(400);

void BM_SketchedLeverage(benchmark::State& state) {
  const WeightedGraph g = bench_graph(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sketched_leverage_upper(g, 1.0 / 3.0, 7).sum());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_SketchedLeverage)->Arg(100)->Arg(400);

void BM_EstCluster(benchmark::State& state) {
  const WeightedGraph g = bench_graph(state.range(0));
  Seed seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(est_cluster(g, ClusterConfig{}, seed++).num_clusters());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_EstCluster)->Arg(1000)->Arg(10000);

void BM_ProbSpanner(benchmark::State& state) {
  const WeightedGraph g = bench_graph(state.range(0));
  const std::vector<double> lengths(g.num_edges(), 1.0);
  Seed seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(prob_spanner(g, lengths, SpannerConfig{}, seed++).num_edges());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_ProbSpanner)->Arg(1000)->Arg(4000);

void BM_StreamPass(benchmark::State& state) {
  const WeightedGraph g = generate(GraphFamily::complete, static_cast<std::size_t>(state.range(0)), 0);
  StreamConfig c = stream_config(desk_constants(), 0.5, 3);
  c.beta_coeff = 0.5;
  c.buffer_coeff = 1.2;
  for (auto _ : state) {
    GraphRowStream s(g);
    benchmark::DoNotOptimize(stream_sparsify_graph(s, c).graph.num_edges());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_StreamPass)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
