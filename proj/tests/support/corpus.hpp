#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "netident/netident.hpp"

namespace netident::testing {

/// Model set parsed from tests/fixtures/<name>.json.
NetworkModelSet load_fixture(const std::string& name);
std::string fixture_path(const std::string& name);

struct CorpusOptions {
  int min_L = 2;
  int max_L = 8;
  double min_density = 0.15;
  double max_density = 0.5;
  int max_known = 3;          // Known G entries with generic random values
  int max_excitations = 3;
  int max_noises = 2;
  bool allow_known = true;
};

/// Random strictly proper model set: G edges with the drawn density, a few
/// excitations and noise columns, each wired to one or two internal signals
/// through parametrized or random known entries.
NetworkModelSet random_model(std::mt19937_64& rng, const CorpusOptions& options = {});

/// Every valid query (j, W̄_j) of the model, W̄_j ranging over non-empty subsets
/// of W_j (capped at `max_subsets` per output).
std::vector<Query> all_queries(const NetworkModelSet& model, int max_subsets = 64);

/// A random valid query, or nothing if no output has parametrized inputs.
std::optional<Query> random_query(const NetworkModelSet& model, std::mt19937_64& rng);

/// Random digraph on n vertices with edge probability `density`.
Digraph random_digraph(std::mt19937_64& rng, int n, double density);

/// Random subset of [0, n), each element kept with probability 1/2.
VertexSet random_subset(std::mt19937_64& rng, int n);

}  // namespace netident::testing
