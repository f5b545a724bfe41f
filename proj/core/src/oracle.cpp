#include "netident/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "netident/error.hpp"

namespace netident {

NumericModel NumericModel::zeros(int L, int K, int p) {
  NumericModel m;
  m.L = L;
  m.K = K;
  m.p = p;
  auto make = [L](int cols) {
    return TFMatrix(static_cast<std::size_t>(L), std::vector<std::optional<RationalTF>>(static_cast<std::size_t>(cols)));
  };
  m.G = make(L);
  m.R = make(K);
  m.H = make(p);
  m.lambda = Eigen::MatrixXd::Identity(p, p);
  return m;
}

int NumericModel::external_column(SignalRef s) const {
  switch (s.kind) {
    case SignalKind::Excitation: return s.index;
    case SignalKind::Noise: return K + s.index;
    case SignalKind::Internal: break;
  }
  throw std::invalid_argument("internal signal has no column in X");
}

const std::optional<RationalTF>& NumericModel::entry(int target, SignalRef source) const {
  const auto& M = source.kind == SignalKind::Internal ? G : source.kind == SignalKind::Excitation ? R : H;
  return M.at(static_cast<std::size_t>(target)).at(static_cast<std::size_t>(source.index));
}

std::optional<RationalTF>& NumericModel::entry(int target, SignalRef source) {
  auto& M = source.kind == SignalKind::Internal ? G : source.kind == SignalKind::Excitation ? R : H;
  return M.at(static_cast<std::size_t>(target)).at(static_cast<std::size_t>(source.index));
}

namespace {

Eigen::MatrixXcd evaluate(const TFMatrix& M, int rows, int cols, Complex z) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (const auto& tf = M[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) out(r, c) = (*tf)(z);
  return out;
}

double max_spectral_norm(const TFMatrix& M, int n, int grid) {
  double rho = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double w = std::numbers::pi * k / std::max(grid - 1, 1);
    const Eigen::MatrixXcd A = evaluate(M, n, n, std::polar(1.0, w));
    if (A.size() == 0) continue;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A);
    rho = std::max(rho, svd.singularValues()(0));
  }
  return rho;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Eigen::MatrixXcd NumericModel::G_at(Complex z) const { return evaluate(G, L, L, z); }

Eigen::MatrixXcd NumericModel::X_at(Complex z) const {
  Eigen::MatrixXcd X(L, K + p);
  X << evaluate(R, L, K, z), evaluate(H, L, p, z);
  return X;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return splitmix64(seed ^ splitmix64(trial)); }

NumericModel instantiate_random(const NetworkModelSet& model, std::uint64_t seed,
                                const InstantiationOptions& options) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  NumericModel known = NumericModel::zeros(model.L(), model.K(), model.p());
  NumericModel param = known;
  for (const auto& e : model.entries()) {
    if (const auto* k = std::get_if<Known>(&e.status)) {
      known.entry(e.target, e.source) = k->tf;
      continue;
    }
    std::vector<double> taps;
    if (e.block() == Block::G && std::get<Parametrized>(e.status).strictly_proper)
      taps = {0.0, coef(rng), coef(rng), coef(rng)};
    else
      taps = {coef(rng), coef(rng), coef(rng)};
    param.entry(e.target, e.source) = RationalTF::fir(std::move(taps));
  }

  const double rho_known = max_spectral_norm(known.G, model.L(), options.grid_points);
  const double rho_param = max_spectral_norm(param.G, model.L(), options.grid_points);
  double scale = 1.0;
  if (rho_param > 0.0) scale = std::max(options.gain_bound - rho_known, 0.2 * options.gain_bound) / rho_param;

  NumericModel out = known;
  for (const auto& e : model.entries()) {
    if (e.is_known()) continue;
    RationalTF tf = *param.entry(e.target, e.source);
    if (e.block() == Block::G) {
      auto taps = tf.numerator();
      for (double& c : taps) c *= scale;
      tf = RationalTF::fir(std::move(taps));
    }
    out.entry(e.target, e.source) = std::move(tf);
  }
  return out;
}

Complex sample_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> omega(0.0, 2.0 * std::numbers::pi);
  return std::polar(1.0 + 1e-3, omega(rng));
}

std::vector<Complex> sample_points(std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::vector<Complex> pts;
  for (int k = 0; k < count; ++k) pts.push_back(sample_point(rng));
  return pts;
}

Eigen::MatrixXcd transfer_matrix_T(const NumericModel& model, Complex z) {
  const Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(model.L, model.L) - model.G_at(z);
  const Eigen::MatrixXcd X = model.X_at(z);
  if (model.L == 0) return X;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
  if (!lu.isInvertible() || lu.rcond() < 1e-12) throw SingularPointError("I - G(z) is singular at the sample point");
  return lu.solve(X);
}

int numeric_rank(const Eigen::MatrixXcd& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0 || !std::isfinite(s(0))) return 0;
  int rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > tol * s(0)) ++rank;
  return rank;
}

Eigen::MatrixXcd submatrix(const NumericModel& model, const Eigen::MatrixXcd& T, const std::vector<int>& rows,
                           const std::vector<SignalRef>& cols) {
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = T(rows[r], model.external_column(cols[c]));
  return out;
}

Eigen::MatrixXcd evaluate_pattern(const SparsityPattern& pattern, const NumericModel& model, Complex z) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(pattern.row_count(), pattern.col_count());
  for (int r = 0; r < pattern.row_count(); ++r)
    for (int c = 0; c < pattern.col_count(); ++c) {
      const PatternCell& cell = pattern.at(r, c);
      if (cell.kind == CellKind::Zero) continue;
      if (cell.diagonal) {
        out(r, c) = -1.0;
        continue;
      }
      const auto& tf = model.entry(cell.row, cell.col);
      if (tf) out(r, c) = (*tf)(z);
    }
  return out;
}

GenericRankReport verify_generic_rank(const NetworkModelSet& model, const std::vector<int>& wbar,
                                      const std::vector<SignalRef>& xbar, int trials, std::uint64_t seed) {
  GenericRankReport report;
  report.graph_rank = generic_rank_T(model, wbar, xbar);
  report.assumption5_passed = check_assumption5(model, 5, 200, seed).passed;
  for (int t = 0; t < trials; ++t) {
    RankTrial trial;
    trial.seed = trial_seed(seed, static_cast<std::uint64_t>(t));
    const NumericModel numeric = instantiate_random(model, trial.seed);
    for (Complex z : sample_points(trial.seed ^ 0x5a5a5a5aULL, 2)) {
      const Eigen::MatrixXcd T = transfer_matrix_T(numeric, z);
      trial.numeric_rank = std::max(trial.numeric_rank, numeric_rank(submatrix(numeric, T, wbar, xbar)));
    }
    trial.agrees = trial.numeric_rank == report.graph_rank;
    report.agreements += trial.agrees ? 1 : 0;
    ++report.trials;
    report.details.push_back(trial);
  }
  return report;
}

Lemma3Check check_rank_identity(const NetworkModelSet& model, const NumericModel& numeric,
                                const std::vector<int>& wbar, const std::vector<SignalRef>& xbar, Complex z,
                                double tol) {
  Lemma3Check c;
  const Eigen::MatrixXcd T = transfer_matrix_T(numeric, z);
  c.rank_T = numeric_rank(submatrix(numeric, T, wbar, xbar), tol);
  c.rank_F = numeric_rank(evaluate_pattern(build_F(model, wbar, xbar), numeric, z), tol);
  c.holds = c.rank_T + model.L() == c.rank_F + static_cast<int>(wbar.size());
  return c;
}

Factorization factorization_K(const NetworkModelSet& model, const NumericModel& numeric, const VertexSet& cut,
                              const std::vector<int>& wbar, const std::vector<SignalRef>& xbar, Complex z) {
  const NetworkGraph g = derive_graph(model);
  const VertexSet xv = g.vertices(xbar);
  const VertexSet wv = g.internal_vertices(wbar);
  const SdpPartition part = partition_sdp(g.digraph(), xv, cut, &wv);

  // Cut rows: internal cut vertices, then cut vertices in X̄, then other externals.
  std::vector<Vertex> d_w, d_xbar, d_rest;
  for (Vertex v : cut) {
    if (g.is_internal(v)) d_w.push_back(v);
    else if (xv.contains(v)) d_xbar.push_back(v);
    else d_rest.push_back(v);
  }
  Factorization f;
  f.cut_order = d_w;
  f.cut_order.insert(f.cut_order.end(), d_xbar.begin(), d_xbar.end());
  f.cut_order.insert(f.cut_order.end(), d_rest.begin(), d_rest.end());

  std::vector<int> p_w;
  for (Vertex v : part.sink_side)
    if (g.is_internal(v)) p_w.push_back(v);

  const Eigen::MatrixXcd T = transfer_matrix_T(numeric, z);
  const Eigen::MatrixXcd G = numeric.G_at(z);
  const Eigen::MatrixXcd X = numeric.X_at(z);
  const auto nd = static_cast<Eigen::Index>(f.cut_order.size());
  const auto nx = static_cast<Eigen::Index>(xbar.size());
  const auto nw = static_cast<Eigen::Index>(wbar.size());
  const auto np = static_cast<Eigen::Index>(p_w.size());

  f.T_targets = submatrix(numeric, T, wbar, xbar);
  f.T_cut = Eigen::MatrixXcd::Zero(nd, nx);
  for (Eigen::Index r = 0; r < nd; ++r) {
    const Vertex v = f.cut_order[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < nx; ++c) {
      const SignalRef x = xbar[static_cast<std::size_t>(c)];
      if (g.is_internal(v)) f.T_cut(r, c) = T(v, numeric.external_column(x));
      else f.T_cut(r, c) = g.vertex(x) == v ? 1.0 : 0.0;
    }
  }

  // (I - G_PP)^{-1} restricted to target rows in P.
  Eigen::MatrixXcd inv;
  if (np > 0) {
    Eigen::MatrixXcd A(np, np);
    for (Eigen::Index a = 0; a < np; ++a)
      for (Eigen::Index b = 0; b < np; ++b)
        A(a, b) = (a == b ? 1.0 : 0.0) - G(p_w[static_cast<std::size_t>(a)], p_w[static_cast<std::size_t>(b)]);
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
    if (!lu.isInvertible() || lu.rcond() < 1e-12) throw SingularPointError("I - G_PP(z) is singular");
    inv = lu.inverse();
  }

  f.K = Eigen::MatrixXcd::Zero(nw, nd);
  for (Eigen::Index r = 0; r < nw; ++r) {
    const Vertex w = wbar[static_cast<std::size_t>(r)];
    if (cut.contains(w)) {
      const auto pos = std::find(f.cut_order.begin(), f.cut_order.end(), w) - f.cut_order.begin();
      f.K(r, pos) = 1.0;
      continue;
    }
    const auto prow = std::find(p_w.begin(), p_w.end(), w) - p_w.begin();
    for (Eigen::Index c = 0; c < nd; ++c) {
      const Vertex d = f.cut_order[static_cast<std::size_t>(c)];
      Complex acc{};
      for (Eigen::Index k = 0; k < np; ++k) {
        const Vertex pv = p_w[static_cast<std::size_t>(k)];
        const Complex into = g.is_internal(d) ? G(pv, d) : X(pv, numeric.external_column(g.signal(d)));
        acc += inv(prow, k) * into;
      }
      // Externals of the cut outside X̄ carry no X̄ signal; their block is zero.
      if (!g.is_internal(d) && !xv.contains(d)) acc = 0.0;
      f.K(r, c) = acc;
    }
  }

  std::vector<int> all_rows(static_cast<std::size_t>(numeric.L));
  std::iota(all_rows.begin(), all_rows.end(), 0);
  const double full = submatrix(numeric, T, all_rows, xbar).norm();
  double scale = f.T_targets.norm();
  if (scale <= 1e-12 * full) scale = full;  // target block vanishes up to roundoff
  const double err = (f.T_targets - f.K * f.T_cut).norm();
  f.residual = scale > 0.0 ? err / scale : err;
  return f;
}

}  // namespace netident
