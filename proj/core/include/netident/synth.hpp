#pragma once

#include <optional>
#include <vector>

#include "netident/graph.hpp"
#include "netident/model.hpp"

namespace netident {

struct NewSignal {
  int vertex = 0;   // internal index receiving the signal
  int r_index = 0;  // 0-based excitation index in the augmented model
};

/// Outcome of a signal allocation. Vertex-valued fields refer to the graph of
/// the input model.
struct AllocationPlan {
  Query query;
  std::vector<NewSignal> new_signals;
  VertexSet disconnecting_set;
  PathFamily reused_paths;  // from the pre-existing signals, normalized
  VertexSet covered;        // ending vertices of reused_paths
  int bound = 0;            // |D ∪ W̄_j| - b_{X0 -> D ∪ W̄_j}
  NetworkModelSet augmented_model;
  bool verified = false;    // path conditions hold on augmented_model
};

/// Fresh excitation at every vertex of D ∪ W̄_j, D a minimum N⁺(W̄_j) - (W_j \ W̄_j)
/// disconnecting set. Throws QueryError.
AllocationPlan allocate_direct(const NetworkModelSet& model, const Query& query);

/// Allocation that reuses the external signals x0 (a subset of X_j). Uncovered
/// vertices of D ∪ W̄_j are excited directly unless `preferred` lists upstream
/// internal vertices to route through. Throws QueryError.
AllocationPlan allocate(const NetworkModelSet& model, const Query& query, const std::vector<SignalRef>& x0,
                        const std::vector<int>& preferred = {});

/// Internal vertices from which every path to `targets` meets `cut`; targets
/// outside the cut are excluded.
VertexSet largest_admissible_sources(const NetworkGraph& graph, const VertexSet& cut, const VertexSet& targets);

int allocation_bound(const NetworkModelSet& model, const Query& query, const std::vector<SignalRef>& x0);

/// Runs allocate() for each query on the model produced by the previous one,
/// using all of X_j as pre-existing signals. Not a joint optimum.
std::vector<AllocationPlan> allocate_each(const NetworkModelSet& model, const std::vector<Query>& queries);

}  // namespace netident
