#pragma once

#include <optional>
#include <string>
#include <vector>

#include "netident/graph.hpp"
#include "netident/model.hpp"

namespace netident {

struct NumericModel;

enum class CellKind { Zero, Fixed, Parametrized };

struct PatternCell {
  CellKind kind = CellKind::Zero;
  int row = 0;          // internal index
  SignalRef col;        // column signal; Internal columns belong to G - I
  bool diagonal = false;  // the -1 of G - I
};

/// Nonzero pattern of a sub-block of [G - I, X], row-major.
struct SparsityPattern {
  std::vector<int> rows;
  std::vector<SignalRef> cols;
  std::vector<PatternCell> cells;

  int row_count() const noexcept { return static_cast<int>(rows.size()); }
  int col_count() const noexcept { return static_cast<int>(cols.size()); }
  const PatternCell& at(int r, int c) const {
    return cells.at(static_cast<std::size_t>(r) * cols.size() + static_cast<std::size_t>(c));
  }
  std::string row_label(int r) const { return signal_name(internal(rows.at(static_cast<std::size_t>(r)))); }
  std::string col_label(int c) const { return signal_name(cols.at(static_cast<std::size_t>(c))); }
};

/// Pattern of [G - I, X] restricted to the given rows and columns.
SparsityPattern build_pattern(const NetworkModelSet& model, const std::vector<int>& rows,
                              const std::vector<SignalRef>& cols);

/// F(W̄, X̄) = [ (G - I)_{W, W \ W̄}   X_{W, X̄} ], an L x (L - |W̄| + |X̄|) pattern.
SparsityPattern build_F(const NetworkModelSet& model, const std::vector<int>& wbar,
                        const std::vector<SignalRef>& xbar);

/// Maximum bipartite matching of the nonzero pattern.
int structural_rank(const SparsityPattern& pattern);
int structural_rank(const std::vector<std::vector<bool>>& nonzero);

/// b_{X̄ -> W̄} in the induced graph.
int generic_rank_T(const NetworkModelSet& model, const std::vector<int>& wbar,
                   const std::vector<SignalRef>& xbar);

struct Certificate {
  int targets = 0;        // |W̄_j|
  int b_targets = 0;      // b_{X_j -> W̄_j}
  int b_all_inputs = 0;   // b_{X_j -> W_j}
  int b_other_inputs = 0; // b_{X_j -> W_j \ W̄_j}
};

enum class Method { Path, Cut, Algebraic };

struct SampleVerdict {
  Complex z;
  int rank_targets = 0;
  int rank_all = 0;
  int rank_others = 0;
  int rank_F_targets = 0;
  int rank_F_all = 0;
  int rank_F_others = 0;
  bool identifiable = false;
  bool F_form_identifiable = false;
};

struct IdentVerdict {
  bool identifiable = false;
  Method method = Method::Path;
  Query query;
  Certificate certificate;
  /// Cut method: the tested disconnecting set (graph vertex ids) and b_{X_j -> W̄_j ∪ D}.
  std::optional<VertexSet> disconnecting_set;
  int b_cut = 0;
  /// Path method: a maximum family X_j -> W_j; cut method: X_j -> W̄_j ∪ D.
  PathFamily witness;
  std::vector<SampleVerdict> samples;
};

const char* method_name(Method m);

/// Vertex-disjoint path conditions on (X_j, W̄_j, W_j). Throws QueryError.
IdentVerdict check_path_conditions(const NetworkModelSet& model, const Query& query);

/// Disconnecting-set condition with the canonical minimum D from
/// N⁺(W̄_j) ∪ X_j to W_j \ W̄_j. Throws QueryError.
IdentVerdict check_disconnecting_conditions(const NetworkModelSet& model, const Query& query);

/// Minimum disconnecting set from N⁺(targets) ∪ external_sources to
/// other_inputs, closest to the sources.
VertexSet canonical_disconnecting_set(const Digraph& g, const VertexSet& targets, const VertexSet& other_inputs,
                                      const VertexSet& external_sources);

/// Rank conditions on T_{W X_j}(z) and the equivalent F-form, evaluated at the
/// given points. The verdict uses the maximum rank over the points.
IdentVerdict check_algebraic_conditions(const NetworkModelSet& model, const NumericModel& numeric,
                                        const Query& query, const std::vector<Complex>& points,
                                        double tol = 1e-8);

struct ParallelPathLoopResult {
  bool disconnecting = false;        // D separates {w_i} from W_j \ {w_i}
  bool blocks_paths_and_loops = false;  // D meets every parallel path and every loop through w_j
};

/// Both sides of the parallel-path/loop characterization, computed independently.
/// Requires all G entries parametrized, w_i ∈ W_j and w_i ∉ D; throws
/// std::invalid_argument otherwise. `cut` holds internal indices.
ParallelPathLoopResult parallel_path_loop_equivalence(const NetworkModelSet& model, int i, int j,
                                                      const std::vector<int>& cut);

/// Fixed-submatrix rank check of [(G - I) X]: every square submatrix made of
/// fixed and zero cells must have numeric rank equal to its structural rank.
/// Exhaustive up to size_cap, then `probes` random larger submatrices.
Assumption5Report check_assumption5(const NetworkModelSet& model, int size_cap = 5, int probes = 200,
                                    unsigned long long seed = 42);

}  // namespace netident
