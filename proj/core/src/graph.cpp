#include "netident/graph.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <deque>
#include <limits>
#include <stdexcept>
#include <string>

namespace netident {

void Digraph::add_edge(Vertex u, Vertex v) {
  if (u < 0 || v < 0 || u >= size() || v >= size())
    throw std::out_of_range("edge endpoint out of range");
  if (u == v) throw std::invalid_argument("self-loop on vertex " + std::to_string(u));
  if (has_edge(u, v)) return;
  out_[static_cast<std::size_t>(u)].push_back(v);
  in_[static_cast<std::size_t>(v)].push_back(u);
}

bool Digraph::has_edge(Vertex u, Vertex v) const {
  const auto& o = out(u);
  return std::find(o.begin(), o.end(), v) != o.end();
}

std::size_t Digraph::edge_count() const noexcept {
  std::size_t m = 0;
  for (const auto& o : out_) m += o.size();
  return m;
}

Digraph Digraph::without(const VertexSet& removed) const {
  Digraph h(size());
  for (Vertex u = 0; u < size(); ++u) {
    if (removed.contains(u)) continue;
    for (Vertex v : out(u))
      if (!removed.contains(v)) h.add_edge(u, v);
  }
  return h;
}

VertexSet PathFamily::start_vertices() const {
  VertexSet s;
  for (const auto& p : paths)
    if (!p.empty()) s.insert(p.front());
  return s;
}

VertexSet PathFamily::end_vertices() const {
  VertexSet s;
  for (const auto& p : paths)
    if (!p.empty()) s.insert(p.back());
  return s;
}

VertexSet PathFamily::vertices() const {
  VertexSet s;
  for (const auto& p : paths) s.insert(p.begin(), p.end());
  return s;
}

bool PathFamily::is_vertex_disjoint_in(const Digraph& g) const {
  VertexSet seen;
  for (const auto& p : paths) {
    if (p.empty()) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] < 0 || p[k] >= g.size()) return false;
      if (!seen.insert(p[k]).second) return false;
      if (k > 0 && !g.has_edge(p[k - 1], p[k])) return false;
    }
  }
  return true;
}

namespace {

constexpr int kInf = std::numeric_limits<int>::max() / 4;

// Dinic max-flow on the vertex-split network: v_in = 2v, v_out = 2v + 1.
class SplitFlow {
 public:
  SplitFlow(const Digraph& g, const VertexSet& from, const VertexSet& to)
      : n_(g.size()), source_(2 * n_), sink_(2 * n_ + 1), adj_(static_cast<std::size_t>(2 * n_ + 2)) {
    for (Vertex v = 0; v < n_; ++v) add(in(v), out(v), 1);
    for (Vertex u = 0; u < n_; ++u)
      for (Vertex v : g.out(u)) add(out(u), in(v), kInf);
    for (Vertex v : from) add(source_, in(v), kInf);
    for (Vertex v : to) add(out(v), sink_, kInf);
  }

  int run() {
    int flow = 0;
    while (bfs()) {
      it_.assign(adj_.size(), 0);
      while (int f = dfs(source_, kInf)) flow += f;
    }
    return flow;
  }

  PathFamily paths() {
    std::vector<int> used(edges_.size(), 0);
    for (std::size_t e = 0; e < edges_.size(); ++e) used[e] = edges_[e].flow;
    PathFamily family;
    for (int e : adj_[static_cast<std::size_t>(source_)]) {
      while (used[static_cast<std::size_t>(e)] > 0) {
        --used[static_cast<std::size_t>(e)];
        Path path;
        int node = edges_[static_cast<std::size_t>(e)].to;
        while (node != sink_) {
          // node is v_in; step through the split edge to v_out.
          path.push_back(node / 2);
          node = take(node, used, /*prefer_sink=*/false);
          node = take(node, used, /*prefer_sink=*/true);
        }
        family.paths.push_back(std::move(path));
      }
    }
    return family;
  }

  // Split edges crossing from the residual-reachable side of the last BFS.
  VertexSet cut() const {
    const auto reach = residual_reach();
    VertexSet c;
    for (Vertex v = 0; v < n_; ++v)
      if (reach[static_cast<std::size_t>(in(v))] && !reach[static_cast<std::size_t>(out(v))]) c.insert(v);
    return c;
  }

 private:
  struct Edge {
    int to;
    int cap;
    int flow;
  };

  static int in(Vertex v) { return 2 * v; }
  static int out(Vertex v) { return 2 * v + 1; }

  void add(int u, int v, int cap) {
    adj_[static_cast<std::size_t>(u)].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({v, cap, 0});
    adj_[static_cast<std::size_t>(v)].push_back(static_cast<int>(edges_.size()));
    edges_.push_back({u, 0, 0});
  }

  int take(int node, std::vector<int>& used, bool prefer_sink) {
    const auto& a = adj_[static_cast<std::size_t>(node)];
    if (prefer_sink) {
      for (int e : a)
        if (edges_[static_cast<std::size_t>(e)].to == sink_ && used[static_cast<std::size_t>(e)] > 0) {
          --used[static_cast<std::size_t>(e)];
          return sink_;
        }
    }
    for (int e : a)
      if ((e % 2 == 0) && used[static_cast<std::size_t>(e)] > 0) {
        --used[static_cast<std::size_t>(e)];
        return edges_[static_cast<std::size_t>(e)].to;
      }
    throw std::logic_error("flow decomposition failed");
  }

  bool bfs() {
    level_.assign(adj_.size(), -1);
    std::deque<int> q{source_};
    level_[static_cast<std::size_t>(source_)] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int e : adj_[static_cast<std::size_t>(u)]) {
        const Edge& ed = edges_[static_cast<std::size_t>(e)];
        if (ed.cap - ed.flow > 0 && level_[static_cast<std::size_t>(ed.to)] < 0) {
          level_[static_cast<std::size_t>(ed.to)] = level_[static_cast<std::size_t>(u)] + 1;
          q.push_back(ed.to);
        }
      }
    }
    return level_[static_cast<std::size_t>(sink_)] >= 0;
  }

  int dfs(int u, int pushed) {
    if (u == sink_) return pushed;
    auto& i = it_[static_cast<std::size_t>(u)];
    const auto& a = adj_[static_cast<std::size_t>(u)];
    for (; i < static_cast<int>(a.size()); ++i) {
      const int e = a[static_cast<std::size_t>(i)];
      Edge& ed = edges_[static_cast<std::size_t>(e)];
      if (ed.cap - ed.flow <= 0 ||
          level_[static_cast<std::size_t>(ed.to)] != level_[static_cast<std::size_t>(u)] + 1)
        continue;
      if (int f = dfs(ed.to, std::min(pushed, ed.cap - ed.flow))) {
        ed.flow += f;
        edges_[static_cast<std::size_t>(e ^ 1)].flow -= f;
        return f;
      }
    }
    return 0;
  }

  std::vector<bool> residual_reach() const {
    std::vector<bool> seen(adj_.size(), false);
    std::deque<int> q{source_};
    seen[static_cast<std::size_t>(source_)] = true;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int e : adj_[static_cast<std::size_t>(u)]) {
        const Edge& ed = edges_[static_cast<std::size_t>(e)];
        if (ed.cap - ed.flow > 0 && !seen[static_cast<std::size_t>(ed.to)]) {
          seen[static_cast<std::size_t>(ed.to)] = true;
          q.push_back(ed.to);
        }
      }
    }
    return seen;
  }

  int n_;
  int source_;
  int sink_;
  std::vector<std::vector<int>> adj_;
  std::vector<Edge> edges_;
  std::vector<int> level_;
  std::vector<int> it_;
};

void check_members(const Digraph& g, const VertexSet& vs) {
  for (Vertex v : vs)
    if (v < 0 || v >= g.size()) throw std::out_of_range("vertex " + std::to_string(v) + " out of range");
}

}  // namespace

DisjointPaths max_vdp(const Digraph& g, const VertexSet& from, const VertexSet& to) {
  check_members(g, from);
  check_members(g, to);
  SplitFlow flow(g, from, to);
  DisjointPaths result;
  result.count = flow.run();
  result.family = flow.paths();
  return result;
}

VertexSet min_disconnecting_set(const Digraph& g, const VertexSet& from, const VertexSet& to) {
  check_members(g, from);
  check_members(g, to);
  SplitFlow flow(g, from, to);
  flow.run();
  return flow.cut();
}

VertexSet reachable_avoiding(const Digraph& g, const VertexSet& from, const VertexSet& blocked) {
  VertexSet seen;
  std::deque<Vertex> q;
  for (Vertex v : from)
    if (!blocked.contains(v) && seen.insert(v).second) q.push_back(v);
  while (!q.empty()) {
    Vertex u = q.front();
    q.pop_front();
    for (Vertex v : g.out(u))
      if (!blocked.contains(v) && seen.insert(v).second) q.push_back(v);
  }
  return seen;
}

VertexSet coreachable_avoiding(const Digraph& g, const VertexSet& to, const VertexSet& blocked) {
  VertexSet seen;
  std::deque<Vertex> q;
  for (Vertex v : to)
    if (!blocked.contains(v) && seen.insert(v).second) q.push_back(v);
  while (!q.empty()) {
    Vertex u = q.front();
    q.pop_front();
    for (Vertex v : g.in(u))
      if (!blocked.contains(v) && seen.insert(v).second) q.push_back(v);
  }
  return seen;
}

bool is_disconnecting_set(const Digraph& g, const VertexSet& from, const VertexSet& to,
                          const VertexSet& cut) {
  const VertexSet reach = reachable_avoiding(g, from, cut);
  return std::none_of(to.begin(), to.end(), [&](Vertex v) { return reach.contains(v); });
}

VertexSet out_neighbors(const Digraph& g, const VertexSet& vs) {
  VertexSet n;
  for (Vertex v : vs) n.insert(g.out(v).begin(), g.out(v).end());
  return n;
}

PathFamily normalize_paths(const Digraph& g, const PathFamily& family, const VertexSet& from,
                           const VertexSet& to) {
  PathFamily result;
  for (const Path& p : family.paths) {
    if (p.empty() || !from.contains(p.front()))
      throw std::invalid_argument("path does not start in the source set");
    std::size_t last = p.size();
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (k > 0 && !g.has_edge(p[k - 1], p[k])) throw std::invalid_argument("path leaves the graph");
      if (to.contains(p[k])) {
        last = k;
        break;
      }
    }
    if (last == p.size()) throw std::invalid_argument("path never reaches the target set");
    std::size_t first = 0;
    for (std::size_t k = 0; k <= last; ++k)
      if (from.contains(p[k])) first = k;
    result.paths.emplace_back(p.begin() + static_cast<std::ptrdiff_t>(first),
                              p.begin() + static_cast<std::ptrdiff_t>(last) + 1);
  }
  return result;
}

SdpPartition partition_sdp(const Digraph& g, const VertexSet& from, const VertexSet& cut,
                           const VertexSet* to) {
  check_members(g, from);
  check_members(g, cut);
  SdpPartition part;
  part.cut = cut;
  part.source_side = reachable_avoiding(g, from, cut);
  for (Vertex v = 0; v < g.size(); ++v)
    if (!part.cut.contains(v) && !part.source_side.contains(v)) part.sink_side.insert(v);
  if (to != nullptr) {
    for (Vertex v : *to)
      if (part.source_side.contains(v))
        throw std::invalid_argument("set is not a disconnecting set: vertex " + std::to_string(v) +
                                    " is reachable");
  }
  for (Vertex u : part.source_side)
    for (Vertex v : g.out(u)) {
      assert(!part.sink_side.contains(v));
      (void)v;
    }
  return part;
}

VertexSet brute_force_cut(const Digraph& g, const VertexSet& from, const VertexSet& to, int max_n) {
  const int n = g.size();
  if (n > max_n || n > 30)
    throw std::length_error("brute_force_cut: " + std::to_string(n) + " vertices exceeds limit " +
                            std::to_string(max_n));
  VertexSet best;
  int best_size = n + 1;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    const int k = std::popcount(mask);
    if (k >= best_size) continue;
    VertexSet cut;
    for (int v = 0; v < n; ++v)
      if (mask & (1u << v)) cut.insert(v);
    if (is_disconnecting_set(g, from, to, cut)) {
      best = std::move(cut);
      best_size = k;
    }
  }
  return best;
}

}  // namespace netident
