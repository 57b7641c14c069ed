#include <benchmark/benchmark.h>

#include <random>

#include "dpim/conflict_graph.hpp"
#include "dpim/dataset.hpp"
#include "dpim/dc.hpp"
#include "dpim/projection.hpp"
#include "dpim/repair.hpp"

namespace {

using namespace dpim;

Dataset make_dataset(std::size_t rows, int domain) {
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<int> pick(0, domain - 1);
  std::vector<AttributeSchema> schema = {{"A", AttrKind::Categorical, 0},
                                         {"B", AttrKind::Categorical, 1},
                                         {"C", AttrKind::Integer, 2}};
  std::vector<std::vector<Value>> data;
  data.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    data.push_back({Value("a" + std::to_string(pick(gen))),
                    Value("b" + std::to_string(pick(gen))),
                    Value(static_cast<std::int64_t>(pick(gen)))});
  }
  return Dataset::from_rows(std::move(schema), std::move(data));
}

ConflictGraph make_graph(std::size_t n, double density) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<TupleId> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
  EdgeList edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (unit(gen) < density) edges.emplace_back(i, j);
    }
  }
  return ConflictGraph(std::move(nodes), std::move(edges));
}

void BM_conflict_graph_blocked_fd(benchmark::State& state) {
  Dataset d = make_dataset(static_cast<std::size_t>(state.range(0)), 50);
  std::vector<DenialConstraint> dcs = {parse_dc("!(t.A = t'.A & t.B != t'.B)")};
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_conflict_graph(d, dcs));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_conflict_graph_blocked_fd)->Range(1000, 16000)->Complexity();

void BM_conflict_graph_all_pairs(benchmark::State& state) {
  Dataset d = make_dataset(static_cast<std::size_t>(state.range(0)), 50);
  std::vector<DenialConstraint> dcs = {parse_dc("!(t.C > t'.C & t.A != t'.A)")};
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_conflict_graph(d, dcs));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_conflict_graph_all_pairs)->Range(500, 4000)->Complexity();

void BM_edge_addition_projection(benchmark::State& state) {
  ConflictGraph g = make_graph(2000, 0.01);
  StableEdgeOrder order = stable_edge_order(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_stats(g, order, state.range(0)));
  }
}
BENCHMARK(BM_edge_addition_projection)->Arg(1)->Arg(10)->Arg(100);

void BM_vertex_cover(benchmark::State& state) {
  ConflictGraph g = make_graph(static_cast<std::size_t>(state.range(0)), 0.01);
  StableEdgeOrder order = stable_edge_order(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(vertex_cover_size(g, order));
  }
}
BENCHMARK(BM_vertex_cover)->Range(500, 8000);

void BM_select_theta_optimized(benchmark::State& state) {
  Dataset d = make_dataset(4000, 40);
  std::vector<DenialConstraint> dcs = {parse_dc("!(t.A = t'.A & t.B != t'.B)")};
  ConflictGraph g = build_conflict_graph(d, dcs);
  StableEdgeOrder order = stable_edge_order(g);
  CandidateSet candidates = default_candidate_set(g.node_count());
  std::uint64_t seed = 0;
  for (auto _ : state) {
    RandomSource rng(seed++);
    benchmark::DoNotOptimize(select_theta_optimized(g, order, candidates, 0.4, 0.6,
                                                    MeasureKind::MinimalInconsistency, dcs, d,
                                                    rng));
  }
}
BENCHMARK(BM_select_theta_optimized);

}  // namespace

BENCHMARK_MAIN();
