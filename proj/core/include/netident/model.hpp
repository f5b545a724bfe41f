#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "netident/graph.hpp"
#include "netident/transfer_function.hpp"

namespace netident {

enum class SignalKind { Internal, Excitation, Noise };

/// w_i (Internal), r_k (Excitation) or e_k (Noise); index is 0-based.
struct SignalRef {
  SignalKind kind = SignalKind::Internal;
  int index = 0;

  friend auto operator<=>(const SignalRef&, const SignalRef&) = default;
};

inline SignalRef internal(int i) { return {SignalKind::Internal, i}; }
inline SignalRef excitation(int k) { return {SignalKind::Excitation, k}; }
inline SignalRef noise(int k) { return {SignalKind::Noise, k}; }

/// "w1", "r2", "e1": 1-based display names.
std::string signal_name(SignalRef s);
/// Inverse of signal_name. Throws std::invalid_argument.
SignalRef parse_signal_name(std::string_view name);

enum class Block { G, R, H };

struct Parametrized {
  bool strictly_proper = true;
  friend bool operator==(const Parametrized&, const Parametrized&) = default;
};
struct Known {
  RationalTF tf;
  friend bool operator==(const Known&, const Known&) = default;
};
using EntryStatus = std::variant<Parametrized, Known>;

/// One entry of G, R or H that is not fixed to zero. The source is an
/// internal signal for G, an excitation for R and a noise for H.
struct EdgeEntry {
  int target = 0;
  SignalRef source;
  EntryStatus status;

  Block block() const noexcept;
  bool is_known() const noexcept { return std::holds_alternative<Known>(status); }
  bool is_parametrized() const noexcept { return !is_known(); }
  /// Non-zero limit at z -> infinity is possible (flagged or actual).
  bool has_feedthrough() const;

  friend bool operator==(const EdgeEntry&, const EdgeEntry&) = default;
};

enum class FeedthroughMode { StrictlyProper, NoAlgebraicLoops };

/// Declared properties of the parametrization that the sparsity pattern
/// cannot reveal: independent parametrization and openness in the structure class.
struct DeclaredAssumptions {
  bool independent_parametrization = true;
  bool open_set = true;
  friend bool operator==(const DeclaredAssumptions&, const DeclaredAssumptions&) = default;
};

/// Symbolic network model set. Construct through make() or parse_model(); both
/// enforce the invariants, so a NetworkModelSet value is always valid.
class NetworkModelSet {
 public:
  NetworkModelSet() = default;

  static NetworkModelSet make(int L, int K, int p, std::vector<EdgeEntry> entries,
                              FeedthroughMode mode = FeedthroughMode::StrictlyProper,
                              DeclaredAssumptions declared = {});

  int L() const noexcept { return L_; }
  int K() const noexcept { return K_; }
  int p() const noexcept { return p_; }
  const std::vector<EdgeEntry>& entries() const noexcept { return entries_; }
  FeedthroughMode feedthrough_mode() const noexcept { return mode_; }
  const DeclaredAssumptions& declared() const noexcept { return declared_; }

  /// Entry with the given target and source, if not fixed to zero.
  const EdgeEntry* find(int target, SignalRef source) const;
  bool has_known_modules() const;

  /// Returns a copy with `count` fresh excitation signals, each entering its
  /// vertex through a Known R-entry equal to 1. New signals get indices K, K+1, ...
  NetworkModelSet with_excitations(const std::vector<int>& vertices) const;

  friend bool operator==(const NetworkModelSet&, const NetworkModelSet&) = default;

 private:
  int L_ = 0;
  int K_ = 0;
  int p_ = 0;
  std::vector<EdgeEntry> entries_;
  FeedthroughMode mode_ = FeedthroughMode::StrictlyProper;
  DeclaredAssumptions declared_;
};

/// Graph induced by a model set. Vertex ids: w_i -> i, r_k -> L + k, e_k -> L + K + k.
class NetworkGraph {
 public:
  NetworkGraph() = default;
  NetworkGraph(int L, int K, int p);

  const Digraph& digraph() const noexcept { return graph_; }
  int L() const noexcept { return L_; }
  int K() const noexcept { return K_; }
  int p() const noexcept { return p_; }
  int vertex_count() const noexcept { return L_ + K_ + p_; }

  Vertex vertex(SignalRef s) const;
  SignalRef signal(Vertex v) const;
  bool is_internal(Vertex v) const noexcept { return v >= 0 && v < L_; }
  VertexSet vertices(const std::vector<SignalRef>& signals) const;
  VertexSet internal_vertices(const std::vector<int>& indices) const;
  VertexSet all_internal() const;
  std::string name(Vertex v) const { return signal_name(signal(v)); }

  void add_edge(SignalRef from, SignalRef to_internal, bool known);
  bool is_known_edge(Vertex from, Vertex to) const;

 private:
  int L_ = 0, K_ = 0, p_ = 0;
  Digraph graph_;
  std::set<std::pair<Vertex, Vertex>> known_;
};

/// Output w_j and the target inputs W̄_j of the modules G_{j W̄_j}.
struct Query {
  int output = 0;
  std::vector<int> targets;
};

/// Parses and validates a JSON model document. Throws ModelError.
NetworkModelSet parse_model(std::string_view document);
/// Serializes to the JSON model schema; parse_model(serialize_model(m)) == m.
std::string serialize_model(const NetworkModelSet& model);

/// Sources of the parametrized G-entries into w_j (sorted internal indices).
std::vector<int> compute_Wj(const NetworkModelSet& model, int j);
/// External signals whose R/H entry into w_j is absent or known.
std::vector<SignalRef> compute_Xj(const NetworkModelSet& model, int j);
NetworkGraph derive_graph(const NetworkModelSet& model);

/// Throws QueryError unless j is valid, targets are non-empty, distinct and ⊆ W_j.
void validate_query(const NetworkModelSet& model, const Query& query);

struct Assumption5Violation {
  std::vector<int> rows;        // internal indices
  std::vector<SignalRef> cols;  // column signals of [(G - I) X]
  int structural_rank = 0;
  int numeric_rank = 0;
};

/// Outcome of the fixed-submatrix rank check. Never a proof: `exhaustive_up_to`
/// is the largest submatrix size enumerated completely.
struct Assumption5Report {
  bool passed = true;
  bool vacuous = false;
  int exhaustive_up_to = 0;
  int random_probes = 0;
  int violation_count = 0;  // violations keeps at most the first 32
  std::vector<Assumption5Violation> violations;
};

struct ModelDiagnostics {
  bool hollow = true;
  bool feedthrough_consistent = true;
  bool algebraic_loop_free = true;
  std::vector<int> algebraic_loop;  // internal indices of one offending cycle
  DeclaredAssumptions declared;
  Assumption5Report assumption5;
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

struct Assumption5Options {
  int size_cap = 5;
  int random_probes = 200;
  unsigned long long seed = 42;
};

/// Structural checks of the model-set assumptions plus the fixed-submatrix
/// rank check. Reports violations instead of throwing.
ModelDiagnostics validate_assumptions(const NetworkModelSet& model,
                                      const Assumption5Options& options = {});

}  // namespace netident
