#pragma once

#include <cstddef>
#include <set>
#include <vector>

namespace netident {

using Vertex = int;
using VertexSet = std::set<Vertex>;
using Path = std::vector<Vertex>;

/// Simple directed graph on vertices 0..n-1.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(int n) : out_(static_cast<std::size_t>(n)), in_(static_cast<std::size_t>(n)) {}

  int size() const noexcept { return static_cast<int>(out_.size()); }
  /// Adds u -> v. Duplicate edges are ignored; self-loops are rejected.
  void add_edge(Vertex u, Vertex v);
  bool has_edge(Vertex u, Vertex v) const;
  const std::vector<Vertex>& out(Vertex v) const { return out_.at(static_cast<std::size_t>(v)); }
  const std::vector<Vertex>& in(Vertex v) const { return in_.at(static_cast<std::size_t>(v)); }
  std::size_t edge_count() const noexcept;

  /// Same vertex ids, every edge incident to `removed` dropped.
  Digraph without(const VertexSet& removed) const;

 private:
  std::vector<std::vector<Vertex>> out_;
  std::vector<std::vector<Vertex>> in_;
};

/// A family of directed paths. A single vertex is a path to itself.
struct PathFamily {
  std::vector<Path> paths;

  std::size_t size() const noexcept { return paths.size(); }
  bool empty() const noexcept { return paths.empty(); }
  VertexSet start_vertices() const;
  VertexSet end_vertices() const;
  VertexSet vertices() const;
  /// Every path follows edges of g and no vertex is shared between paths.
  bool is_vertex_disjoint_in(const Digraph& g) const;
};

struct DisjointPaths {
  int count = 0;
  PathFamily family;
};

/// Maximum number of vertex-disjoint paths from `from` to `to` together with
/// a witness family (vertex splitting + unit-capacity max-flow).
DisjointPaths max_vdp(const Digraph& g, const VertexSet& from, const VertexSet& to);

/// Minimum from-to disconnecting set. Among the minimum sets the one closest
/// to `from` is returned (source side of the residual min-cut).
VertexSet min_disconnecting_set(const Digraph& g, const VertexSet& from, const VertexSet& to);

/// True if every path from `from` to `to` meets `cut`.
bool is_disconnecting_set(const Digraph& g, const VertexSet& from, const VertexSet& to,
                          const VertexSet& cut);

/// Vertices reachable from `from` by paths that avoid `blocked` (blocked
/// start vertices are skipped).
VertexSet reachable_avoiding(const Digraph& g, const VertexSet& from, const VertexSet& blocked);

/// Vertices that can reach `to` by paths avoiding `blocked`.
VertexSet coreachable_avoiding(const Digraph& g, const VertexSet& to, const VertexSet& blocked);

/// Union of out-neighbours of `vs`.
VertexSet out_neighbors(const Digraph& g, const VertexSet& vs);

/// Truncates every path to its sub-path from the last `from` vertex before the
/// first `to` vertex, so no internal vertex lies in from ∪ to. Throws
/// std::invalid_argument if a path does not start in `from` or never meets `to`.
PathFamily normalize_paths(const Digraph& g, const PathFamily& family, const VertexSet& from,
                           const VertexSet& to);

struct SdpPartition {
  VertexSet source_side;  // S: reachable from V1 without meeting D
  VertexSet cut;          // D
  VertexSet sink_side;    // P: everything else
};

/// Splits the vertex set into S, D, P for a disconnecting set D. If `to` is
/// given and intersects S, D was not a from-to disconnecting set and
/// std::invalid_argument is thrown.
SdpPartition partition_sdp(const Digraph& g, const VertexSet& from, const VertexSet& cut,
                           const VertexSet* to = nullptr);

/// Exact minimum disconnecting set by subset enumeration (test oracle).
/// Throws std::length_error if the graph has more than max_n vertices.
VertexSet brute_force_cut(const Digraph& g, const VertexSet& from, const VertexSet& to,
                          int max_n = 12);

}  // namespace netident
