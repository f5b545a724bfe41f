#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "corpus.hpp"

namespace netident {
namespace {

using testing::load_fixture;
using testing::random_digraph;
using testing::random_subset;

// Every simple path starting in `from` whose last vertex is in `to`.
std::vector<Path> all_simple_paths(const Digraph& g, const VertexSet& from, const VertexSet& to) {
  std::vector<Path> out;
  Path path;
  std::vector<bool> on(static_cast<std::size_t>(g.size()), false);
  std::function<void(Vertex)> walk = [&](Vertex v) {
    path.push_back(v);
    on[static_cast<std::size_t>(v)] = true;
    if (to.count(v)) out.push_back(path);
    for (Vertex w : g.out(v))
      if (!on[static_cast<std::size_t>(w)]) walk(w);
    on[static_cast<std::size_t>(v)] = false;
    path.pop_back();
  };
  for (Vertex s : from) walk(s);
  return out;
}

// Largest set of pairwise vertex-disjoint paths, by exhaustive packing.
int brute_force_vdp(const Digraph& g, const VertexSet& from, const VertexSet& to) {
  const auto paths = all_simple_paths(g, from, to);
  std::vector<std::uint64_t> masks;
  for (const auto& p : paths) {
    std::uint64_t m = 0;
    for (Vertex v : p) m |= std::uint64_t{1} << v;
    masks.push_back(m);
  }
  int best = 0;
  std::function<void(std::size_t, std::uint64_t, int)> pack = [&](std::size_t k, std::uint64_t used, int count) {
    best = std::max(best, count);
    for (std::size_t i = k; i < masks.size(); ++i)
      if (!(masks[i] & used)) pack(i + 1, used | masks[i], count + 1);
  };
  pack(0, 0, 0);
  return best;
}

VertexSet reachable_oracle(const Digraph& g, const VertexSet& from, const VertexSet& blocked) {
  VertexSet seen;
  std::vector<Vertex> stack;
  for (Vertex v : from)
    if (!blocked.count(v) && seen.insert(v).second) stack.push_back(v);
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : g.out(v))
      if (!blocked.count(w) && seen.insert(w).second) stack.push_back(w);
  }
  return seen;
}

void expect_valid_family(const Digraph& g, const DisjointPaths& dp, const VertexSet& from, const VertexSet& to) {
  EXPECT_EQ(dp.count, static_cast<int>(dp.family.size()));
  EXPECT_TRUE(dp.family.is_vertex_disjoint_in(g));
  for (const auto& p : dp.family.paths) {
    ASSERT_FALSE(p.empty());
    EXPECT_TRUE(from.count(p.front()));
    EXPECT_TRUE(to.count(p.back()));
  }
}

TEST(MaxVdp, TwoPathsIntoTheOutputsOfFig2a) {
  const auto graph = derive_graph(load_fixture("fig2a"));
  const VertexSet from = graph.vertices({excitation(0), excitation(1)});
  const VertexSet to = graph.internal_vertices({2, 3});
  const auto dp = max_vdp(graph.digraph(), from, to);
  EXPECT_EQ(dp.count, 2);
  expect_valid_family(graph.digraph(), dp, from, to);
}

TEST(MaxVdp, SingleNoiseToInputsOfW4InFig1a) {
  const auto graph = derive_graph(load_fixture("fig1a"));
  const VertexSet from = graph.vertices({noise(0)});
  EXPECT_EQ(max_vdp(graph.digraph(), from, graph.internal_vertices({0, 2})).count, 1);
}

TEST(MaxVdp, LoneVertexIsAPathToItself) {
  const Digraph g(3);
  const auto dp = max_vdp(g, {1}, {1});
  EXPECT_EQ(dp.count, 1);
  ASSERT_EQ(dp.family.size(), 1u);
  EXPECT_EQ(dp.family.paths[0], Path{1});
}

TEST(MaxVdp, MatchesExhaustivePathPacking) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const auto g = random_digraph(rng, n, 0.35);
    const auto from = random_subset(rng, n);
    const auto to = random_subset(rng, n);
    const auto dp = max_vdp(g, from, to);
    EXPECT_EQ(dp.count, brute_force_vdp(g, from, to)) << "trial " << trial;
    expect_valid_family(g, dp, from, to);
  }
}

TEST(MaxVdp, MonotoneAndSubadditive) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 8);
    auto g = random_digraph(rng, n, 0.25);
    const auto from = random_subset(rng, n);
    const auto to = random_subset(rng, n);
    const int b = max_vdp(g, from, to).count;
    EXPECT_LE(b, static_cast<int>(std::min(from.size(), to.size())));

    VertexSet a, c;
    for (Vertex v : to) (rng() & 1 ? a : c).insert(v);
    EXPECT_LE(b, max_vdp(g, from, a).count + max_vdp(g, from, c).count);

    const Vertex u = static_cast<Vertex>(rng() % n), v = static_cast<Vertex>(rng() % n);
    if (u != v) g.add_edge(u, v);
    EXPECT_GE(max_vdp(g, from, to).count, b);
  }
}

TEST(MinDisconnectingSet, W2SeparatesW1FromW3InFig1a) {
  const auto graph = derive_graph(load_fixture("fig1a"));
  const auto& g = graph.digraph();
  const VertexSet from = {0, graph.vertex(noise(0))};
  const VertexSet to = {2};
  const VertexSet d = min_disconnecting_set(g, from, to);
  EXPECT_EQ(d.size(), 1u);
  EXPECT_TRUE(is_disconnecting_set(g, from, to, {1}));
  EXPECT_TRUE(is_disconnecting_set(g, from, to, d));
}

TEST(MinDisconnectingSet, EmptyForDisconnectedPair) {
  Digraph g(4);
  g.add_edge(0, 1);
  g.add_edge(2, 3);
  EXPECT_TRUE(min_disconnecting_set(g, {0}, {3}).empty());
}

TEST(MinDisconnectingSet, MengerEqualityAgainstBruteForce) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    const auto g = random_digraph(rng, n, 0.3);
    const auto from = random_subset(rng, n);
    const auto to = random_subset(rng, n);
    const auto d = min_disconnecting_set(g, from, to);
    EXPECT_TRUE(is_disconnecting_set(g, from, to, d));
    EXPECT_EQ(static_cast<int>(d.size()), max_vdp(g, from, to).count);
    EXPECT_EQ(brute_force_cut(g, from, to).size(), d.size());
  }
}

TEST(MinDisconnectingSet, SourceSideTieBreak) {
  // 0 -> 1 -> 2 -> 3: every single inner vertex is a minimum cut from {0} to {3}.
  Digraph g(4);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  EXPECT_EQ(min_disconnecting_set(g, {0}, {3}), VertexSet{0});
}

TEST(BruteForceCut, SmallCases) {
  const auto graph = derive_graph(load_fixture("fig2a"));
  EXPECT_EQ(brute_force_cut(graph.digraph(), graph.vertices({excitation(0), excitation(1)}),
                            graph.internal_vertices({2, 3}))
                .size(),
            2u);
  Digraph edge(2);
  edge.add_edge(0, 1);
  EXPECT_EQ(brute_force_cut(edge, {0}, {1}).size(), 1u);
  EXPECT_TRUE(brute_force_cut(Digraph(2), {0}, {1}).empty());
  EXPECT_THROW(brute_force_cut(Digraph(13), {0}, {1}), std::length_error);
}

TEST(NormalizePaths, TruncatesAtFirstTargetCrossing) {
  // r=0, a=1, v2=2, b=3, v2'=4
  Digraph g(5);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(3, 4);
  PathFamily family{{{0, 1, 2, 3, 4}}};
  const auto normalized = normalize_paths(g, family, {0}, {2, 4});
  ASSERT_EQ(normalized.size(), 1u);
  EXPECT_EQ(normalized.paths[0], (Path{0, 1, 2}));
  EXPECT_EQ(normalize_paths(g, normalized, {0}, {2, 4}).paths, normalized.paths);
}

TEST(NormalizePaths, PreservesCountAndDisjointness) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 7);
    const auto g = random_digraph(rng, n, 0.35);
    const auto from = random_subset(rng, n);
    const auto to = random_subset(rng, n);
    const auto dp = max_vdp(g, from, to);
    const auto normalized = normalize_paths(g, dp.family, from, to);
    EXPECT_EQ(static_cast<int>(normalized.size()), brute_force_vdp(g, from, to));
    EXPECT_TRUE(normalized.is_vertex_disjoint_in(g));
    VertexSet ends = from;
    ends.insert(to.begin(), to.end());
    for (const auto& p : normalized.paths) {
      EXPECT_TRUE(from.count(p.front()));
      EXPECT_TRUE(to.count(p.back()));
      for (std::size_t k = 1; k + 1 < p.size(); ++k) EXPECT_FALSE(ends.count(p[k]));
    }
  }
}

TEST(PartitionSdp, Fig1bAroundW2) {
  const auto graph = derive_graph(load_fixture("fig1b"));
  const auto& g = graph.digraph();
  const VertexSet from = graph.vertices({noise(0), excitation(0)});
  const auto part = partition_sdp(g, from, {1});
  EXPECT_EQ(part.source_side, reachable_oracle(g, from, {1}));
  for (Vertex v : {graph.vertex(noise(0)), graph.vertex(excitation(0)), 0}) EXPECT_TRUE(part.source_side.count(v));
  EXPECT_TRUE(part.sink_side.count(2));
  // w1 -> w4 bypasses w2, so w4 stays on the source side.
  EXPECT_TRUE(part.source_side.count(3));
  for (Vertex s : part.source_side)
    for (Vertex t : g.out(s)) EXPECT_FALSE(part.sink_side.count(t));
}

TEST(PartitionSdp, DegenerateCuts) {
  Digraph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  const auto all = partition_sdp(g, {0}, {0, 1, 2});
  EXPECT_TRUE(all.source_side.empty());
  EXPECT_TRUE(all.sink_side.empty());

  const auto none = partition_sdp(Digraph(3), {0}, {});
  EXPECT_EQ(none.source_side, VertexSet{0});
  EXPECT_EQ(none.sink_side, (VertexSet{1, 2}));
}

TEST(PartitionSdp, RejectsNonDisconnectingSet) {
  Digraph g(3);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  const VertexSet to{2};
  EXPECT_THROW(partition_sdp(g, {0}, {}, &to), std::invalid_argument);
}

TEST(Reachability, AvoidingBlockedVertices) {
  Digraph g(4);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(0, 3);
  EXPECT_EQ(reachable_avoiding(g, {0}, {1}), (VertexSet{0, 3}));
  EXPECT_EQ(coreachable_avoiding(g, {2}, {}), (VertexSet{0, 1, 2}));
  EXPECT_EQ(out_neighbors(g, {0}), (VertexSet{1, 3}));
}

}  // namespace
}  // namespace netident
