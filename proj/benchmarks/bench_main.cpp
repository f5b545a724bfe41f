#include <benchmark/benchmark.h>

#include <random>

#include "netident/netident.hpp"

namespace {

using namespace netident;

// Ring-with-chords network on L internal signals, one excitation per vertex.
NetworkModelSet ring_model(int L, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<EdgeEntry> entries;
  std::set<std::pair<int, int>> used;
  auto add = [&](int to, int from) {
    if (to == from || !used.insert({to, from}).second) return;
    entries.push_back({to, internal(from), Parametrized{true}});
  };
  for (int i = 0; i < L; ++i) add((i + 1) % L, i);
  for (int k = 0; k < 2 * L; ++k) add(static_cast<int>(rng() % L), static_cast<int>(rng() % L));
  for (int k = 0; k < L; ++k) entries.push_back({k, excitation(k), Known{RationalTF::constant(1.0)}});
  return NetworkModelSet::make(L, L, 0, entries);
}

void BM_MaxVdp(benchmark::State& state) {
  const auto model = ring_model(static_cast<int>(state.range(0)), 1);
  const auto graph = derive_graph(model);
  VertexSet from, to;
  for (int k = 0; k < model.K(); k += 2) from.insert(graph.vertex(excitation(k)));
  for (int i = 1; i < model.L(); i += 2) to.insert(i);
  for (auto _ : state) benchmark::DoNotOptimize(max_vdp(graph.digraph(), from, to).count);
}
BENCHMARK(BM_MaxVdp)->Arg(16)->Arg(64)->Arg(256);

void BM_PathConditions(benchmark::State& state) {
  const auto model = ring_model(static_cast<int>(state.range(0)), 2);
  const auto wj = compute_Wj(model, 0);
  const Query q{0, {wj.front()}};
  for (auto _ : state) benchmark::DoNotOptimize(check_path_conditions(model, q).identifiable);
}
BENCHMARK(BM_PathConditions)->Arg(16)->Arg(64)->Arg(256);

void BM_DisconnectingConditions(benchmark::State& state) {
  const auto model = ring_model(static_cast<int>(state.range(0)), 3);
  const auto wj = compute_Wj(model, 0);
  const Query q{0, {wj.front()}};
  for (auto _ : state) benchmark::DoNotOptimize(check_disconnecting_conditions(model, q).identifiable);
}
BENCHMARK(BM_DisconnectingConditions)->Arg(16)->Arg(64)->Arg(256);

void BM_StructuralRank(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(4);
  std::vector<std::vector<bool>> pattern(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
  for (auto& row : pattern)
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = rng() % 8 == 0;
  for (auto _ : state) benchmark::DoNotOptimize(structural_rank(pattern));
}
BENCHMARK(BM_StructuralRank)->Arg(32)->Arg(128)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
