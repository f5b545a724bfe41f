#include "netident/synth.hpp"

#include <algorithm>
#include <stdexcept>

#include "netident/error.hpp"
#include "netident/ident.hpp"

namespace netident {

namespace {

struct Sets {
  NetworkGraph graph;
  VertexSet targets;
  VertexSet others;
};

Sets query_sets(const NetworkModelSet& model, const Query& query) {
  validate_query(model, query);
  Sets s;
  s.graph = derive_graph(model);
  s.targets = s.graph.internal_vertices(query.targets);
  std::vector<int> others;
  for (int w : compute_Wj(model, query.output))
    if (!s.targets.contains(w)) others.push_back(w);
  s.others = s.graph.internal_vertices(others);
  return s;
}

VertexSet check_x0(const NetworkModelSet& model, const NetworkGraph& graph, const Query& query,
                   const std::vector<SignalRef>& x0) {
  const auto xj = compute_Xj(model, query.output);
  for (auto x : x0)
    if (std::find(xj.begin(), xj.end(), x) == xj.end())
      throw QueryError(signal_name(x) + " has an unknown edge into w" + std::to_string(query.output + 1) +
                       " or does not exist");
  return graph.vertices(x0);
}

void finish(const NetworkModelSet& model, AllocationPlan& plan, std::vector<int> vertices) {
  std::sort(vertices.begin(), vertices.end());
  int k = model.K();
  for (int v : vertices) plan.new_signals.push_back({v, k++});
  plan.augmented_model = vertices.empty() ? model : model.with_excitations(vertices);
  plan.verified = check_path_conditions(plan.augmented_model, plan.query).identifiable;
}

}  // namespace

VertexSet largest_admissible_sources(const NetworkGraph& graph, const VertexSet& cut, const VertexSet& targets) {
  const VertexSet reaches = coreachable_avoiding(graph.digraph(), targets, cut);
  VertexSet out;
  for (int v = 0; v < graph.L(); ++v)
    if (!reaches.contains(v)) out.insert(v);
  return out;
}

AllocationPlan allocate_direct(const NetworkModelSet& model, const Query& query) {
  const Sets s = query_sets(model, query);
  AllocationPlan plan;
  plan.query = query;
  plan.disconnecting_set = canonical_disconnecting_set(s.graph.digraph(), s.targets, s.others, {});
  VertexSet excite = plan.disconnecting_set;
  excite.insert(s.targets.begin(), s.targets.end());
  plan.bound = static_cast<int>(excite.size());
  finish(model, plan, std::vector<int>(excite.begin(), excite.end()));
  return plan;
}

AllocationPlan allocate(const NetworkModelSet& model, const Query& query, const std::vector<SignalRef>& x0,
                        const std::vector<int>& preferred) {
  const Sets s = query_sets(model, query);
  const Digraph& g = s.graph.digraph();
  const VertexSet sources = check_x0(model, s.graph, query, x0);

  AllocationPlan plan;
  plan.query = query;
  plan.disconnecting_set = canonical_disconnecting_set(g, s.targets, s.others, sources);
  VertexSet goal = plan.disconnecting_set;
  goal.insert(s.targets.begin(), s.targets.end());

  const DisjointPaths reach = max_vdp(g, sources, goal);
  plan.reused_paths = normalize_paths(g, reach.family, sources, goal);
  plan.covered = plan.reused_paths.end_vertices();
  plan.bound = static_cast<int>(goal.size()) - reach.count;

  VertexSet uncovered;
  for (Vertex v : goal)
    if (!plan.covered.contains(v)) uncovered.insert(v);
  if (uncovered.empty()) {
    finish(model, plan, {});
    return plan;
  }
  for (Vertex v : uncovered)
    if (!s.graph.is_internal(v)) throw std::logic_error("uncovered external vertex in the disconnecting set");

  std::vector<int> placed;
  if (!preferred.empty()) {
    const VertexSet admissible = largest_admissible_sources(s.graph, plan.disconnecting_set, s.others);
    const Digraph reduced = g.without(plan.reused_paths.vertices());
    VertexSet candidates;
    for (int v : preferred)
      if (admissible.contains(v) && !plan.reused_paths.vertices().contains(v)) candidates.insert(v);
    if (!candidates.empty()) {
      const DisjointPaths routed = max_vdp(reduced, candidates, uncovered);
      const PathFamily paths = normalize_paths(reduced, routed.family, candidates, uncovered);
      for (const Path& p : paths.paths) {
        placed.push_back(p.front());
        uncovered.erase(p.back());
      }
    }
  }
  placed.insert(placed.end(), uncovered.begin(), uncovered.end());
  finish(model, plan, placed);
  return plan;
}

int allocation_bound(const NetworkModelSet& model, const Query& query, const std::vector<SignalRef>& x0) {
  const Sets s = query_sets(model, query);
  const VertexSet sources = check_x0(model, s.graph, query, x0);
  VertexSet goal = canonical_disconnecting_set(s.graph.digraph(), s.targets, s.others, sources);
  goal.insert(s.targets.begin(), s.targets.end());
  return static_cast<int>(goal.size()) - max_vdp(s.graph.digraph(), sources, goal).count;
}

std::vector<AllocationPlan> allocate_each(const NetworkModelSet& model, const std::vector<Query>& queries) {
  std::vector<AllocationPlan> plans;
  NetworkModelSet current = model;
  for (const auto& q : queries) {
    plans.push_back(allocate(current, q, compute_Xj(current, q.output)));
    current = plans.back().augmented_model;
  }
  return plans;
}

}  // namespace netident
