#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "netident/graph.hpp"
#include "netident/model.hpp"
#include "netident/oracle.hpp"

namespace netident {

enum class IndirectErrorKind {
  KnownModules,   // a Known G entry is present
  NoRonlySetup,   // identifiability needs noise signals
};

class IndirectError : public std::runtime_error {
 public:
  IndirectError(IndirectErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  IndirectErrorKind kind() const noexcept { return kind_; }

 private:
  IndirectErrorKind kind_;
};

struct IndirectSetup {
  Query query;
  std::vector<SignalRef> xbar;  // excitations without an edge into w_j
  VertexSet cut;                // graph vertex ids of D
  std::vector<SignalRef> cut_signals;
  std::vector<int> measured;    // W̄_j ∪ D_w ∪ {j}, internal indices
  int b_cut = 0;                // b_{X̄ -> W̄_j ∪ D}
};

/// r-only disconnecting-set setup for the indirect method. Throws QueryError,
/// IndirectError(KnownModules) or IndirectError(NoRonlySetup).
IndirectSetup select_indirect_setup(const NetworkModelSet& model, const Query& query);

/// Transfer samples between measured signals: values[k] is rows x cols at points[k].
struct FrequencySamples {
  std::vector<Complex> points;
  std::vector<SignalRef> rows;
  std::vector<SignalRef> cols;
  std::vector<Eigen::MatrixXcd> values;

  Complex at(std::size_t k, SignalRef row, SignalRef col) const;
};

/// T restricted to measured rows and X̄ columns, evaluated analytically.
FrequencySamples exact_transfer_samples(const NumericModel& numeric, const IndirectSetup& setup,
                                        const std::vector<Complex>& points);

struct ModuleSamples {
  std::vector<Complex> points;
  std::vector<Eigen::RowVectorXcd> values;  // G_{j W̄_j}, one row per usable point
  std::vector<std::size_t> skipped;         // indices of rank-deficient points
};

/// G_{jW̄} = T_{jX̄} [T_{W̄X̄}; T_{DX̄}]^† [I; 0] at every point.
ModuleSamples reconstruct_modules(const FrequencySamples& T, const IndirectSetup& setup, double tol = 1e-8);

/// True G_{jW̄}(z) of a numeric model.
Eigen::RowVectorXcd true_modules(const NumericModel& numeric, const Query& query, Complex z);

/// Measured signals of a simulation run: internal w's and excitations r.
struct TimeSeries {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
  double sample_time = 1.0;

  std::size_t length() const noexcept { return columns.empty() ? 0 : columns.front().size(); }
  /// Throws std::out_of_range for an unknown name.
  const std::vector<double>& column(const std::string& name) const;
  void write_csv(std::ostream& os) const;
  /// Throws std::runtime_error on malformed input.
  static TimeSeries read_csv(std::istream& is);
};

struct ExcitationSpec {
  std::vector<double> r_variance;  // one per excitation, default 1
  std::vector<double> e_variance;  // one per noise, default diag(Λ)
  int burn_in = 500;
};

/// w(t) = G(q)w(t) + R(q)r(t) + H(q)e(t) with white Gaussian r and e.
/// Throws std::runtime_error if the recursion diverges.
TimeSeries simulate(const NumericModel& numeric, const ExcitationSpec& spec, std::size_t N, std::uint64_t seed);

/// 64 points ω_k = π(k + 1)/65 on the unit circle.
std::vector<Complex> default_grid(int points = 64);

struct EstimateOptions {
  int fir_order = 40;
  double max_condition = 1e10;
};

struct FrequencyEstimate {
  FrequencySamples samples;
  std::vector<double> input_condition;  // per point, condition of the input spectrum
  double regressor_condition = 0.0;
  bool low_data = false;                // N < 20 * inputs * (order + 1)
};

/// FIR least-squares estimate of the map inputs -> outputs (samples t >= order),
/// evaluated on the grid. Records every column read in `touched` when given.
/// Throws std::runtime_error on insufficient excitation.
FrequencyEstimate estimate_frequency_response(const TimeSeries& data, const std::vector<std::string>& inputs,
                                              const std::vector<std::string>& outputs,
                                              const std::vector<Complex>& grid, const EstimateOptions& options = {},
                                              std::set<std::string>* touched = nullptr);

struct PipelineOptions {
  std::size_t N = 50000;
  std::uint64_t seed = 42;
  ExcitationSpec excitation;
  EstimateOptions estimate;
  std::vector<Complex> grid = default_grid();
};

struct PipelineResult {
  IndirectSetup setup;
  ModuleSamples estimate;
  std::vector<double> relative_error;  // per usable grid point
  double median_midband_error = 0.0;   // ω in [π/4, 3π/4]
  double max_error = 0.0;
  FrequencyEstimate diagnostics;
  std::set<std::string> touched;
};

/// Simulates `truth`, estimates transfers between measured signals and
/// reconstructs the target modules.
PipelineResult run_indirect_pipeline(const NetworkModelSet& model, const NumericModel& truth, const Query& query,
                                     const PipelineOptions& options);

/// Relative error of each reconstructed point against the truth.
std::vector<double> reconstruction_errors(const NumericModel& truth, const Query& query, const ModuleSamples& s);
double median_midband(const std::vector<Complex>& points, const std::vector<double>& errors);

}  // namespace netident
