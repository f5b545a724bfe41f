#include "netident/indirect.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "netident/error.hpp"
#include "netident/ident.hpp"

namespace netident {

IndirectSetup select_indirect_setup(const NetworkModelSet& model, const Query& query) {
  validate_query(model, query);
  if (model.has_known_modules())
    throw IndirectError(IndirectErrorKind::KnownModules,
                        "the indirect method is only available when no module in G is known");
  const NetworkGraph graph = derive_graph(model);
  IndirectSetup setup;
  setup.query = query;
  for (int k = 0; k < model.K(); ++k)
    if (model.find(query.output, excitation(k)) == nullptr) setup.xbar.push_back(excitation(k));

  const VertexSet targets = graph.internal_vertices(query.targets);
  std::vector<int> others;
  for (int w : compute_Wj(model, query.output))
    if (!targets.contains(w)) others.push_back(w);
  const VertexSet sources = graph.vertices(setup.xbar);
  setup.cut = canonical_disconnecting_set(graph.digraph(), targets, graph.internal_vertices(others), sources);

  VertexSet goal = setup.cut;
  goal.insert(targets.begin(), targets.end());
  setup.b_cut = max_vdp(graph.digraph(), sources, goal).count;
  if (setup.b_cut != static_cast<int>(goal.size()))
    throw IndirectError(IndirectErrorKind::NoRonlySetup,
                        "the excitation signals alone do not satisfy the disconnecting-set condition (b = " +
                            std::to_string(setup.b_cut) + " < " + std::to_string(goal.size()) +
                            "); identifiability relies on noise signals, use a direct method");

  std::set<int> measured(query.targets.begin(), query.targets.end());
  for (Vertex v : setup.cut) {
    setup.cut_signals.push_back(graph.signal(v));
    if (graph.is_internal(v)) measured.insert(v);
  }
  measured.insert(query.output);
  setup.measured.assign(measured.begin(), measured.end());
  return setup;
}

Complex FrequencySamples::at(std::size_t k, SignalRef row, SignalRef col) const {
  const auto r = std::find(rows.begin(), rows.end(), row);
  const auto c = std::find(cols.begin(), cols.end(), col);
  if (r == rows.end() || c == cols.end())
    throw std::out_of_range("no transfer sample for " + signal_name(row) + " <- " + signal_name(col));
  return values.at(k)(r - rows.begin(), c - cols.begin());
}

FrequencySamples exact_transfer_samples(const NumericModel& numeric, const IndirectSetup& setup,
                                        const std::vector<Complex>& points) {
  FrequencySamples s;
  s.points = points;
  for (int w : setup.measured) s.rows.push_back(internal(w));
  s.cols = setup.xbar;
  for (Complex z : points) s.values.push_back(submatrix(numeric, transfer_matrix_T(numeric, z), setup.measured, s.cols));
  return s;
}

ModuleSamples reconstruct_modules(const FrequencySamples& T, const IndirectSetup& setup, double tol) {
  ModuleSamples out;
  const auto nt = static_cast<Eigen::Index>(setup.query.targets.size());
  const auto nd = static_cast<Eigen::Index>(setup.cut_signals.size());
  const auto nx = static_cast<Eigen::Index>(setup.xbar.size());
  for (std::size_t k = 0; k < T.points.size(); ++k) {
    Eigen::MatrixXcd M(nt + nd, nx);
    Eigen::RowVectorXcd y(nx);
    for (Eigen::Index c = 0; c < nx; ++c) {
      const SignalRef x = setup.xbar[static_cast<std::size_t>(c)];
      for (Eigen::Index r = 0; r < nt; ++r)
        M(r, c) = T.at(k, internal(setup.query.targets[static_cast<std::size_t>(r)]), x);
      for (Eigen::Index r = 0; r < nd; ++r) {
        const SignalRef d = setup.cut_signals[static_cast<std::size_t>(r)];
        M(nt + r, c) = d.kind == SignalKind::Internal ? T.at(k, d, x) : Complex(d == x ? 1.0 : 0.0);
      }
      y(c) = T.at(k, internal(setup.query.output), x);
    }
    if (numeric_rank(M, tol) < nt + nd) {
      out.skipped.push_back(k);
      continue;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    Eigen::VectorXcd inv_s = Eigen::VectorXcd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > tol * sv(0)) inv_s(i) = 1.0 / sv(i);
    const Eigen::MatrixXcd pinv = svd.matrixV() * inv_s.asDiagonal() * svd.matrixU().adjoint();
    const Eigen::RowVectorXcd g = y * pinv;
    out.points.push_back(T.points[k]);
    out.values.push_back(g.head(nt));
  }
  return out;
}

Eigen::RowVectorXcd true_modules(const NumericModel& numeric, const Query& query, Complex z) {
  Eigen::RowVectorXcd g(static_cast<Eigen::Index>(query.targets.size()));
  for (std::size_t k = 0; k < query.targets.size(); ++k) {
    const auto& tf = numeric.entry(query.output, internal(query.targets[k]));
    g(static_cast<Eigen::Index>(k)) = tf ? (*tf)(z) : Complex{};
  }
  return g;
}

const std::vector<double>& TimeSeries::column(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("time series has no signal '" + name + "'");
  return columns[static_cast<std::size_t>(it - names.begin())];
}

void TimeSeries::write_csv(std::ostream& os) const {
  for (std::size_t c = 0; c < names.size(); ++c) os << (c ? "," : "") << names[c];
  os << '\n';
  os.precision(17);
  for (std::size_t t = 0; t < length(); ++t) {
    for (std::size_t c = 0; c < columns.size(); ++c) os << (c ? "," : "") << columns[c][t];
    os << '\n';
  }
}

TimeSeries TimeSeries::read_csv(std::istream& is) {
  TimeSeries ts;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty CSV");
  {
    std::stringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) ts.names.push_back(name);
  }
  ts.columns.resize(ts.names.size());
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream fields(line);
    std::string field;
    std::size_t c = 0;
    while (std::getline(fields, field, ',')) {
      if (c >= ts.columns.size()) throw std::runtime_error("CSV row " + std::to_string(row) + " has too many fields");
      std::size_t used = 0;
      const double v = std::stod(field, &used);
      if (!std::isfinite(v)) throw std::runtime_error("CSV row " + std::to_string(row) + " has a non-finite value");
      ts.columns[c++].push_back(v);
    }
    if (c != ts.columns.size()) throw std::runtime_error("CSV row " + std::to_string(row) + " has too few fields");
  }
  return ts;
}

namespace {

struct Filter {
  int target;
  SignalRef source;
  const RationalTF* tf;
  std::vector<double> y;
};

// Contribution of past inputs and outputs at time t (everything except b0 x(t)).
double past_part(const Filter& f, const std::vector<double>& x, std::size_t t) {
  const auto& b = f.tf->numerator();
  const auto& a = f.tf->denominator();
  double acc = 0.0;
  for (std::size_t k = 1; k < b.size() && k <= t; ++k) acc += b[k] * x[t - k];
  for (std::size_t k = 1; k < a.size() && k <= t; ++k) acc -= a[k] * f.y[t - k];
  return acc;
}

}  // namespace

TimeSeries simulate(const NumericModel& numeric, const ExcitationSpec& spec, std::size_t N, std::uint64_t seed) {
  const int L = numeric.L, K = numeric.K, p = numeric.p;
  const std::size_t total = N + static_cast<std::size_t>(std::max(spec.burn_in, 0));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<std::vector<double>> r(static_cast<std::size_t>(K), std::vector<double>(total));
  std::vector<std::vector<double>> e(static_cast<std::size_t>(p), std::vector<double>(total));
  for (int k = 0; k < K; ++k) {
    const double var = k < static_cast<int>(spec.r_variance.size()) ? spec.r_variance[static_cast<std::size_t>(k)] : 1.0;
    for (auto& v : r[static_cast<std::size_t>(k)]) v = std::sqrt(var) * gauss(rng);
  }
  for (int k = 0; k < p; ++k) {
    const double var = k < static_cast<int>(spec.e_variance.size()) ? spec.e_variance[static_cast<std::size_t>(k)]
                                                                    : numeric.lambda(k, k);
    for (auto& v : e[static_cast<std::size_t>(k)]) v = std::sqrt(var) * gauss(rng);
  }
  std::vector<std::vector<double>> w(static_cast<std::size_t>(L), std::vector<double>(total, 0.0));

  std::vector<Filter> g_filters, x_filters;
  for (int i = 0; i < L; ++i) {
    for (int c = 0; c < L; ++c)
      if (const auto& tf = numeric.G[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])
        g_filters.push_back({i, internal(c), &*tf, std::vector<double>(total, 0.0)});
    for (int c = 0; c < K; ++c)
      if (const auto& tf = numeric.R[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])
        x_filters.push_back({i, excitation(c), &*tf, std::vector<double>(total, 0.0)});
    for (int c = 0; c < p; ++c)
      if (const auto& tf = numeric.H[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)])
        x_filters.push_back({i, noise(c), &*tf, std::vector<double>(total, 0.0)});
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(L, L);
  bool feedthrough = false;
  for (const auto& f : g_filters) {
    const double b0 = f.tf->feedthrough();
    if (b0 != 0.0) {
      A(f.target, f.source.index) -= b0;
      feedthrough = true;
    }
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  if (feedthrough) lu.compute(A);

  auto input_of = [&](SignalRef s) -> const std::vector<double>& {
    return s.kind == SignalKind::Excitation ? r[static_cast<std::size_t>(s.index)] : e[static_cast<std::size_t>(s.index)];
  };

  Eigen::VectorXd c(L);
  for (std::size_t t = 0; t < total; ++t) {
    c.setZero();
    for (auto& f : x_filters) {
      const auto& x = input_of(f.source);
      f.y[t] = f.tf->feedthrough() * x[t] + past_part(f, x, t);
      c(f.target) += f.y[t];
    }
    for (auto& f : g_filters) {
      f.y[t] = past_part(f, w[static_cast<std::size_t>(f.source.index)], t);
      c(f.target) += f.y[t];
    }
    const Eigen::VectorXd wt = feedthrough ? Eigen::VectorXd(lu.solve(c)) : c;
    for (int i = 0; i < L; ++i) {
      if (!std::isfinite(wt(i)) || std::abs(wt(i)) > 1e12)
        throw std::runtime_error("simulation diverged at sample " + std::to_string(t));
      w[static_cast<std::size_t>(i)][t] = wt(i);
    }
    for (auto& f : g_filters) f.y[t] += f.tf->feedthrough() * w[static_cast<std::size_t>(f.source.index)][t];
  }

  TimeSeries ts;
  const auto skip = static_cast<std::ptrdiff_t>(total - N);
  for (int i = 0; i < L; ++i) {
    ts.names.push_back(signal_name(internal(i)));
    ts.columns.emplace_back(w[static_cast<std::size_t>(i)].begin() + skip, w[static_cast<std::size_t>(i)].end());
  }
  for (int k = 0; k < K; ++k) {
    ts.names.push_back(signal_name(excitation(k)));
    ts.columns.emplace_back(r[static_cast<std::size_t>(k)].begin() + skip, r[static_cast<std::size_t>(k)].end());
  }
  return ts;
}

std::vector<Complex> default_grid(int points) {
  std::vector<Complex> grid;
  for (int k = 0; k < points; ++k) grid.push_back(std::polar(1.0, std::numbers::pi * (k + 1) / (points + 1)));
  return grid;
}

FrequencyEstimate estimate_frequency_response(const TimeSeries& data, const std::vector<std::string>& inputs,
                                              const std::vector<std::string>& outputs,
                                              const std::vector<Complex>& grid, const EstimateOptions& options,
                                              std::set<std::string>* touched) {
  std::vector<const std::vector<double>*> u, y;
  for (const auto& name : inputs) {
    u.push_back(&data.column(name));
    if (touched) touched->insert(name);
  }
  for (const auto& name : outputs) {
    y.push_back(&data.column(name));
    if (touched) touched->insert(name);
  }
  const std::size_t N = data.length();
  const int m = static_cast<int>(u.size());
  const int n = options.fir_order;
  const int dim = m * (n + 1);
  if (m == 0) throw std::invalid_argument("no input signals");
  if (N <= static_cast<std::size_t>(n + 1)) throw std::runtime_error("insufficient excitation: too few samples");

  // r_ab(τ) = (1/N) Σ u_a(t) u_b(t - τ)
  auto corr = [N](const std::vector<double>& a, const std::vector<double>& b, int tau) {
    double acc = 0.0;
    for (std::size_t t = static_cast<std::size_t>(tau); t < N; ++t) acc += a[t] * b[t - static_cast<std::size_t>(tau)];
    return acc / static_cast<double>(N);
  };
  std::vector<Eigen::MatrixXd> R(static_cast<std::size_t>(n + 1), Eigen::MatrixXd(m, m));
  for (int tau = 0; tau <= n; ++tau)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) R[static_cast<std::size_t>(tau)](a, b) = corr(*u[static_cast<std::size_t>(a)], *u[static_cast<std::size_t>(b)], tau);

  // Gram matrix of the regressor φ(t) = [u(t); ...; u(t - n)] over t = n..N-1.
  // Block (k, l) follows block (k - 1, l - 1) by moving the window one sample back.
  const std::size_t n0 = static_cast<std::size_t>(n);
  auto lagged = [&](const std::vector<double>& a, const std::vector<double>& b, int k, int l) {
    double acc = 0.0;
    for (std::size_t t = n0; t < N; ++t) acc += a[t - static_cast<std::size_t>(k)] * b[t - static_cast<std::size_t>(l)];
    return acc;
  };
  Eigen::MatrixXd Phi(dim, dim);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      const auto& ua = *u[static_cast<std::size_t>(a)];
      const auto& ub = *u[static_cast<std::size_t>(b)];
      for (int l = 0; l <= n; ++l) {
        Phi(a, l * m + b) = lagged(ua, ub, 0, l);
        Phi(l * m + a, b) = lagged(ua, ub, l, 0);
      }
      for (int k = 1; k <= n; ++k)
        for (int l = 1; l <= n; ++l) {
          const std::size_t first = n0 - static_cast<std::size_t>(1);
          const std::size_t last = N - 1;
          Phi(k * m + a, l * m + b) = Phi((k - 1) * m + a, (l - 1) * m + b) +
                                      ua[first - static_cast<std::size_t>(k - 1)] * ub[first - static_cast<std::size_t>(l - 1)] -
                                      ua[last - static_cast<std::size_t>(k - 1)] * ub[last - static_cast<std::size_t>(l - 1)];
        }
    }
  Phi /= static_cast<double>(N - n0);

  FrequencyEstimate est;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Phi, Eigen::EigenvaluesOnly);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lmax = eig.eigenvalues().maxCoeff();
  est.regressor_condition = lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  if (!(est.regressor_condition <= options.max_condition))
    throw std::runtime_error("insufficient excitation: regressor condition number " +
                             std::to_string(est.regressor_condition));
  est.low_data = N < static_cast<std::size_t>(20 * dim);

  Eigen::MatrixXd rhs(dim, static_cast<Eigen::Index>(y.size()));
  for (std::size_t o = 0; o < y.size(); ++o)
    for (int k = 0; k <= n; ++k)
      for (int a = 0; a < m; ++a)
        rhs(k * m + a, static_cast<Eigen::Index>(o)) = lagged(*y[o], *u[static_cast<std::size_t>(a)], 0, k);
  rhs /= static_cast<double>(N - n0);
  const Eigen::MatrixXd h = Phi.ldlt().solve(rhs);

  est.samples.points = grid;
  for (const auto& name : outputs) est.samples.rows.push_back(parse_signal_name(name));
  for (const auto& name : inputs) est.samples.cols.push_back(parse_signal_name(name));
  for (Complex z : grid) {
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(y.size()), m);
    Complex zk{1.0, 0.0};
    const Complex zinv = 1.0 / z;
    for (int k = 0; k <= n; ++k) {
      for (std::size_t o = 0; o < y.size(); ++o)
        for (int a = 0; a < m; ++a) T(static_cast<Eigen::Index>(o), a) += h(k * m + a, static_cast<Eigen::Index>(o)) * zk;
      zk *= zinv;
    }
    est.samples.values.push_back(std::move(T));

    Eigen::MatrixXcd S = R[0].cast<Complex>();
    Complex zt{1.0, 0.0};
    for (int tau = 1; tau <= n; ++tau) {
      zt *= zinv;
      S += R[static_cast<std::size_t>(tau)].cast<Complex>() * zt + R[static_cast<std::size_t>(tau)].transpose().cast<Complex>() * std::conj(zt);
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(S);
    const auto& sv = svd.singularValues();
    est.input_condition.push_back(sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                          : std::numeric_limits<double>::infinity());
  }
  return est;
}

std::vector<double> reconstruction_errors(const NumericModel& truth, const Query& query, const ModuleSamples& s) {
  std::vector<double> err;
  for (std::size_t k = 0; k < s.points.size(); ++k) {
    const Eigen::RowVectorXcd g = true_modules(truth, query, s.points[k]);
    const double scale = g.norm();
    const double diff = (s.values[k] - g).norm();
    err.push_back(scale > 0.0 ? diff / scale : diff);
  }
  return err;
}

double median_midband(const std::vector<Complex>& points, const std::vector<double>& errors) {
  std::vector<double> mid;
  for (std::size_t k = 0; k < points.size() && k < errors.size(); ++k) {
    const double w = std::abs(std::arg(points[k]));
    if (w >= std::numbers::pi / 4 && w <= 3 * std::numbers::pi / 4) mid.push_back(errors[k]);
  }
  if (mid.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(mid.begin(), mid.end());
  const std::size_t h = mid.size() / 2;
  return mid.size() % 2 ? mid[h] : 0.5 * (mid[h - 1] + mid[h]);
}

PipelineResult run_indirect_pipeline(const NetworkModelSet& model, const NumericModel& truth, const Query& query,
                                     const PipelineOptions& options) {
  PipelineResult res;
  res.setup = select_indirect_setup(model, query);
  const TimeSeries data = simulate(truth, options.excitation, options.N, options.seed);
  std::vector<std::string> inputs, outputs;
  for (auto x : res.setup.xbar) inputs.push_back(signal_name(x));
  for (int w : res.setup.measured) outputs.push_back(signal_name(internal(w)));
  res.diagnostics = estimate_frequency_response(data, inputs, outputs, options.grid, options.estimate, &res.touched);
  res.estimate = reconstruct_modules(res.diagnostics.samples, res.setup);
  res.relative_error = reconstruction_errors(truth, query, res.estimate);
  res.median_midband_error = median_midband(res.estimate.points, res.relative_error);
  for (double e : res.relative_error) res.max_error = std::max(res.max_error, e);
  return res;
}

}  // namespace netident
