#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "netident/graph.hpp"
#include "netident/ident.hpp"
#include "netident/model.hpp"
#include "netident/transfer_function.hpp"

namespace netident {

using TFMatrix = std::vector<std::vector<std::optional<RationalTF>>>;

/// One concrete member of a model set. Absent entries are zero.
struct NumericModel {
  int L = 0, K = 0, p = 0;
  TFMatrix G, R, H;
  Eigen::MatrixXd lambda;

  static NumericModel zeros(int L, int K, int p);

  /// Column of X = [R H] that belongs to an external signal.
  int external_column(SignalRef s) const;
  const std::optional<RationalTF>& entry(int target, SignalRef source) const;
  std::optional<RationalTF>& entry(int target, SignalRef source);

  Eigen::MatrixXcd G_at(Complex z) const;
  Eigen::MatrixXcd X_at(Complex z) const;
};

struct InstantiationOptions {
  /// Bound on the spectral norm of G(e^{iω}) over the grid.
  double gain_bound = 0.5;
  int grid_points = 64;
};

/// Random FIR values for every parametrized entry, Known entries copied,
/// parametrized G entries scaled jointly to keep ‖G(e^{iω})‖ ≤ gain_bound.
NumericModel instantiate_random(const NetworkModelSet& model, std::uint64_t seed,
                                const InstantiationOptions& options = {});

/// Per-trial seed derived from a base seed (splitmix64).
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// exp(iω)(1 + 1e-3) with ω uniform in [0, 2π).
Complex sample_point(std::mt19937_64& rng);
std::vector<Complex> sample_points(std::uint64_t seed, int count);

/// T_{WX}(z) = (I - G(z))^{-1} X(z), L x (K + p). Throws SingularPointError.
Eigen::MatrixXcd transfer_matrix_T(const NumericModel& model, Complex z);

/// Number of singular values above tol * σ_max.
int numeric_rank(const Eigen::MatrixXcd& m, double tol = 1e-8);

/// Rows are internal indices, columns external signals.
Eigen::MatrixXcd submatrix(const NumericModel& model, const Eigen::MatrixXcd& T, const std::vector<int>& rows,
                           const std::vector<SignalRef>& cols);

/// Values of a pattern of [G - I, X] taken from a numeric instance.
Eigen::MatrixXcd evaluate_pattern(const SparsityPattern& pattern, const NumericModel& model, Complex z);

struct RankTrial {
  std::uint64_t seed = 0;
  int numeric_rank = 0;
  bool agrees = false;
};

struct GenericRankReport {
  int graph_rank = 0;
  int trials = 0;
  int agreements = 0;
  std::vector<RankTrial> details;
  bool assumption5_passed = true;

  double fraction() const noexcept { return trials == 0 ? 1.0 : static_cast<double>(agreements) / trials; }
  /// Disagreement explained by a failed fixed-submatrix check.
  bool assumption5_counterexample() const noexcept { return !assumption5_passed && agreements < trials; }
};

/// Compares b_{X̄ -> W̄} with rank T_{W̄X̄} over random instances, two sample
/// points per instance, maximum rank taken.
GenericRankReport verify_generic_rank(const NetworkModelSet& model, const std::vector<int>& wbar,
                                      const std::vector<SignalRef>& xbar, int trials, std::uint64_t seed);

struct Lemma3Check {
  int rank_T = 0;
  int rank_F = 0;
  bool holds = false;  // rank_T + L == rank_F + |W̄|
};

Lemma3Check check_rank_identity(const NetworkModelSet& model, const NumericModel& numeric,
                                const std::vector<int>& wbar, const std::vector<SignalRef>& xbar, Complex z,
                                double tol = 1e-8);

struct Factorization {
  Eigen::MatrixXcd K;
  Eigen::MatrixXcd T_targets;  // T_{W̄X̄}
  Eigen::MatrixXcd T_cut;      // T_{DX̄}, rows in cut_order
  std::vector<Vertex> cut_order;
  double residual = 0.0;       // relative to T_{W̄X̄}, or to T_{WX̄} when T_{W̄X̄} vanishes
};

/// T_{W̄X̄}(z) = K(z) T_{DX̄}(z) for a X̄ - W̄ disconnecting set D (graph vertex
/// ids), K assembled from the S/D/P block structure. Throws std::invalid_argument
/// if D does not disconnect, SingularPointError if I - G_PP(z) is singular.
Factorization factorization_K(const NetworkModelSet& model, const NumericModel& numeric, const VertexSet& cut,
                              const std::vector<int>& wbar, const std::vector<SignalRef>& xbar, Complex z);

}  // namespace netident
