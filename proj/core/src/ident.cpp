#include "netident/ident.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <stdexcept>

#include "netident/error.hpp"
#include "netident/oracle.hpp"

namespace netident {

namespace {

std::vector<SignalRef> all_external(const NetworkModelSet& model) {
  std::vector<SignalRef> x;
  for (int k = 0; k < model.K(); ++k) x.push_back(excitation(k));
  for (int k = 0; k < model.p(); ++k) x.push_back(noise(k));
  return x;
}

std::vector<int> minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  for (int v : a)
    if (std::find(b.begin(), b.end(), v) == b.end()) out.push_back(v);
  return out;
}

bool kuhn(int r, const std::vector<std::vector<int>>& adj, std::vector<int>& match_col, std::vector<bool>& seen) {
  for (int c : adj[static_cast<std::size_t>(r)]) {
    if (seen[static_cast<std::size_t>(c)]) continue;
    seen[static_cast<std::size_t>(c)] = true;
    if (match_col[static_cast<std::size_t>(c)] < 0 ||
        kuhn(match_col[static_cast<std::size_t>(c)], adj, match_col, seen)) {
      match_col[static_cast<std::size_t>(c)] = r;
      return true;
    }
  }
  return false;
}

}  // namespace

SparsityPattern build_pattern(const NetworkModelSet& model, const std::vector<int>& rows,
                              const std::vector<SignalRef>& cols) {
  SparsityPattern pat;
  pat.rows = rows;
  pat.cols = cols;
  pat.cells.reserve(rows.size() * cols.size());
  for (int r : rows) {
    for (SignalRef c : cols) {
      PatternCell cell;
      cell.row = r;
      cell.col = c;
      if (c.kind == SignalKind::Internal && c.index == r) {
        cell.kind = CellKind::Fixed;
        cell.diagonal = true;
      } else if (const auto* e = model.find(r, c)) {
        cell.kind = e->is_known() ? CellKind::Fixed : CellKind::Parametrized;
      }
      pat.cells.push_back(cell);
    }
  }
  return pat;
}

SparsityPattern build_F(const NetworkModelSet& model, const std::vector<int>& wbar,
                        const std::vector<SignalRef>& xbar) {
  std::vector<int> rows(static_cast<std::size_t>(model.L()));
  for (int i = 0; i < model.L(); ++i) rows[static_cast<std::size_t>(i)] = i;
  std::vector<SignalRef> cols;
  for (int i : minus(rows, wbar)) cols.push_back(internal(i));
  cols.insert(cols.end(), xbar.begin(), xbar.end());
  return build_pattern(model, rows, cols);
}

int structural_rank(const std::vector<std::vector<bool>>& nonzero) {
  std::vector<std::vector<int>> adj(nonzero.size());
  std::size_t ncols = 0;
  for (std::size_t r = 0; r < nonzero.size(); ++r) {
    ncols = std::max(ncols, nonzero[r].size());
    for (std::size_t c = 0; c < nonzero[r].size(); ++c)
      if (nonzero[r][c]) adj[r].push_back(static_cast<int>(c));
  }
  std::vector<int> match_col(ncols, -1);
  int rank = 0;
  for (std::size_t r = 0; r < nonzero.size(); ++r) {
    std::vector<bool> seen(ncols, false);
    if (kuhn(static_cast<int>(r), adj, match_col, seen)) ++rank;
  }
  return rank;
}

int structural_rank(const SparsityPattern& pattern) {
  std::vector<std::vector<bool>> nz(static_cast<std::size_t>(pattern.row_count()),
                                    std::vector<bool>(static_cast<std::size_t>(pattern.col_count()), false));
  for (int r = 0; r < pattern.row_count(); ++r)
    for (int c = 0; c < pattern.col_count(); ++c)
      nz[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = pattern.at(r, c).kind != CellKind::Zero;
  return structural_rank(nz);
}

int generic_rank_T(const NetworkModelSet& model, const std::vector<int>& wbar,
                   const std::vector<SignalRef>& xbar) {
  if (wbar.empty() || xbar.empty()) return 0;
  const NetworkGraph g = derive_graph(model);
  return max_vdp(g.digraph(), g.vertices(xbar), g.internal_vertices(wbar)).count;
}

const char* method_name(Method m) {
  switch (m) {
    case Method::Path: return "path";
    case Method::Cut: return "cut";
    case Method::Algebraic: return "algebraic";
  }
  return "?";
}

namespace {

struct QueryContext {
  NetworkGraph graph;
  std::vector<int> wj;
  std::vector<int> others;
  VertexSet xj, targets, other_vertices, all_inputs;
};

QueryContext prepare(const NetworkModelSet& model, const Query& query) {
  validate_query(model, query);
  QueryContext c;
  c.graph = derive_graph(model);
  c.wj = compute_Wj(model, query.output);
  c.others = minus(c.wj, query.targets);
  c.xj = c.graph.vertices(compute_Xj(model, query.output));
  c.targets = c.graph.internal_vertices(query.targets);
  c.other_vertices = c.graph.internal_vertices(c.others);
  c.all_inputs = c.graph.internal_vertices(c.wj);
  return c;
}

Certificate certificate(const QueryContext& c) {
  const Digraph& g = c.graph.digraph();
  Certificate cert;
  cert.targets = static_cast<int>(c.targets.size());
  cert.b_targets = max_vdp(g, c.xj, c.targets).count;
  cert.b_all_inputs = max_vdp(g, c.xj, c.all_inputs).count;
  cert.b_other_inputs = max_vdp(g, c.xj, c.other_vertices).count;
  return cert;
}

}  // namespace

IdentVerdict check_path_conditions(const NetworkModelSet& model, const Query& query) {
  const QueryContext c = prepare(model, query);
  IdentVerdict v;
  v.method = Method::Path;
  v.query = query;
  v.certificate = certificate(c);
  const auto& cert = v.certificate;
  v.identifiable = cert.b_targets == cert.targets &&
                   cert.b_all_inputs == cert.b_targets + cert.b_other_inputs;
  v.witness = max_vdp(c.graph.digraph(), c.xj, c.all_inputs).family;
  return v;
}

VertexSet canonical_disconnecting_set(const Digraph& g, const VertexSet& targets, const VertexSet& other_inputs,
                                      const VertexSet& external_sources) {
  VertexSet from = out_neighbors(g, targets);
  from.insert(external_sources.begin(), external_sources.end());
  return min_disconnecting_set(g, from, other_inputs);
}

IdentVerdict check_disconnecting_conditions(const NetworkModelSet& model, const Query& query) {
  const QueryContext c = prepare(model, query);
  IdentVerdict v;
  v.method = Method::Cut;
  v.query = query;
  v.certificate = certificate(c);

  const VertexSet D = canonical_disconnecting_set(c.graph.digraph(), c.targets, c.other_vertices, c.xj);
  VertexSet cut_and_targets = D;
  cut_and_targets.insert(c.targets.begin(), c.targets.end());
  const DisjointPaths paths = max_vdp(c.graph.digraph(), c.xj, cut_and_targets);
  v.b_cut = paths.count;
  v.disconnecting_set = D;
  v.witness = paths.family;
  v.identifiable = paths.count == static_cast<int>(D.size() + c.targets.size());
  return v;
}

IdentVerdict check_algebraic_conditions(const NetworkModelSet& model, const NumericModel& numeric,
                                        const Query& query, const std::vector<Complex>& points, double tol) {
  validate_query(model, query);
  const auto wj = compute_Wj(model, query.output);
  const auto others = minus(wj, query.targets);
  const auto xj = compute_Xj(model, query.output);
  const int L = model.L();
  const int nt = static_cast<int>(query.targets.size());

  IdentVerdict v;
  v.method = Method::Algebraic;
  v.query = query;
  SampleVerdict best;
  for (Complex z : points) {
    SampleVerdict s;
    s.z = z;
    const Eigen::MatrixXcd T = transfer_matrix_T(numeric, z);
    s.rank_targets = numeric_rank(submatrix(numeric, T, query.targets, xj), tol);
    s.rank_all = numeric_rank(submatrix(numeric, T, wj, xj), tol);
    s.rank_others = numeric_rank(submatrix(numeric, T, others, xj), tol);
    s.identifiable = s.rank_targets == nt && s.rank_all == s.rank_targets + s.rank_others;
    s.rank_F_targets = numeric_rank(evaluate_pattern(build_F(model, query.targets, xj), numeric, z), tol);
    s.rank_F_all = numeric_rank(evaluate_pattern(build_F(model, wj, xj), numeric, z), tol);
    s.rank_F_others = numeric_rank(evaluate_pattern(build_F(model, others, xj), numeric, z), tol);
    s.F_form_identifiable =
        s.rank_F_targets == L && s.rank_F_all == s.rank_F_targets + s.rank_F_others - L;
    best.rank_targets = std::max(best.rank_targets, s.rank_targets);
    best.rank_all = std::max(best.rank_all, s.rank_all);
    best.rank_others = std::max(best.rank_others, s.rank_others);
    v.samples.push_back(s);
  }
  v.certificate.targets = nt;
  v.certificate.b_targets = best.rank_targets;
  v.certificate.b_all_inputs = best.rank_all;
  v.certificate.b_other_inputs = best.rank_others;
  v.identifiable = best.rank_targets == nt && best.rank_all == best.rank_targets + best.rank_others;
  return v;
}

ParallelPathLoopResult parallel_path_loop_equivalence(const NetworkModelSet& model, int i, int j,
                                                      const std::vector<int>& cut) {
  if (model.has_known_modules())
    throw std::invalid_argument("parallel path/loop test requires every module to be parametrized");
  const auto wj = compute_Wj(model, j);
  if (!std::binary_search(wj.begin(), wj.end(), i))
    throw std::invalid_argument("w" + std::to_string(i + 1) + " is not an input of w" + std::to_string(j + 1));
  const VertexSet D(cut.begin(), cut.end());
  if (D.contains(i)) throw std::invalid_argument("the excited input may not belong to the cut");

  const NetworkGraph ng = derive_graph(model);
  const Digraph& g = ng.digraph();
  ParallelPathLoopResult result;
  VertexSet others = ng.internal_vertices(wj);
  others.erase(i);
  result.disconnecting = is_disconnecting_set(g, {i}, others, D);

  // Simple paths i -> j other than the edge (i, j), and simple cycles through j
  // that do not enter j along (i, j).
  const int L = model.L();
  std::vector<bool> on_path(static_cast<std::size_t>(L), false);
  Path path;
  bool blocked = true;
  std::function<void(int, int)> walk = [&](int u, int target) {
    if (!blocked) return;
    for (int v : g.out(u)) {
      if (v >= L) continue;
      if (v == target) {
        const bool loop = path.front() == j;
        if (!loop && path.size() == 1) continue;  // the module edge (i, j) itself
        if (loop && u == i) continue;             // loops closing through the module edge
        // A parallel path must be hit at an internal vertex, a loop anywhere.
        bool hit = loop && D.contains(j);
        for (std::size_t k = 1; k < path.size(); ++k) hit = hit || D.contains(path[k]);
        if (!hit) blocked = false;
        continue;
      }
      if (on_path[static_cast<std::size_t>(v)]) continue;
      on_path[static_cast<std::size_t>(v)] = true;
      path.push_back(v);
      walk(v, target);
      path.pop_back();
      on_path[static_cast<std::size_t>(v)] = false;
    }
  };
  on_path.assign(static_cast<std::size_t>(L), false);
  on_path[static_cast<std::size_t>(i)] = true;
  path = {i};
  walk(i, j);
  on_path.assign(static_cast<std::size_t>(L), false);
  on_path[static_cast<std::size_t>(j)] = true;
  path = {j};
  walk(j, j);
  result.blocks_paths_and_loops = blocked;
  return result;
}

namespace {

// Value of a fixed cell, independent of any parameter.
Complex fixed_value(const NetworkModelSet& model, const PatternCell& cell, Complex z) {
  if (cell.diagonal) return {-1.0, 0.0};
  const auto* e = model.find(cell.row, cell.col);
  return std::get<Known>(e->status).tf(z);
}

bool full_structural_rank(const SparsityPattern& pat, const std::vector<int>& rows, const std::vector<int>& cols) {
  std::vector<std::vector<bool>> nz(rows.size(), std::vector<bool>(cols.size(), false));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      nz[r][c] = pat.at(rows[r], cols[c]).kind != CellKind::Zero;
  return structural_rank(nz) == static_cast<int>(rows.size());
}

bool all_fixed(const SparsityPattern& pat, const std::vector<int>& rows, const std::vector<int>& cols) {
  for (int r : rows)
    for (int c : cols)
      if (pat.at(r, c).kind == CellKind::Parametrized) return false;
  return true;
}

// Checks one square fixed block; appends a violation if its numeric rank at
// two generic points falls below its structural rank.
void test_block(const NetworkModelSet& model, const SparsityPattern& pat, const std::vector<int>& rows,
                const std::vector<int>& cols, const std::vector<Complex>& points, Assumption5Report& report) {
  std::vector<std::vector<bool>> nz(rows.size(), std::vector<bool>(cols.size(), false));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) nz[r][c] = pat.at(rows[r], cols[c]).kind != CellKind::Zero;
  const int srank = structural_rank(nz);
  if (srank == 0) return;
  int nrank = 0;
  for (Complex z : points) {
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto& cell = pat.at(rows[r], cols[c]);
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            cell.kind == CellKind::Zero ? Complex{} : fixed_value(model, cell, z);
      }
    nrank = std::max(nrank, numeric_rank(m));
  }
  if (nrank < srank) {
    ++report.violation_count;
    if (report.violations.size() >= 32) return;
    Assumption5Violation v;
    for (int r : rows) v.rows.push_back(pat.rows[static_cast<std::size_t>(r)]);
    for (int c : cols) v.cols.push_back(pat.cols[static_cast<std::size_t>(c)]);
    v.structural_rank = srank;
    v.numeric_rank = nrank;
    report.violations.push_back(std::move(v));
  }
}

}  // namespace

Assumption5Report check_assumption5(const NetworkModelSet& model, int size_cap, int probes,
                                    unsigned long long seed) {
  Assumption5Report report;
  const bool any_known = std::any_of(model.entries().begin(), model.entries().end(),
                                     [](const EdgeEntry& e) { return e.is_known(); });
  if (!any_known) {
    report.vacuous = true;
    return report;
  }
  std::vector<int> rows(static_cast<std::size_t>(model.L()));
  for (int i = 0; i < model.L(); ++i) rows[static_cast<std::size_t>(i)] = i;
  std::vector<SignalRef> cols;
  for (int i = 0; i < model.L(); ++i) cols.push_back(internal(i));
  for (auto x : all_external(model)) cols.push_back(x);
  const SparsityPattern pat = build_pattern(model, rows, cols);
  const std::vector<Complex> points = sample_points(seed, 2);

  const int nr = pat.row_count();
  const int nc = pat.col_count();
  const int cap = std::min({size_cap, nr, nc});

  // A square block only matters if it contains a Known cell; blocks of zeros and
  // -1 diagonals alone are permutations of -I and always have full rank.
  auto has_known = [&](const std::vector<int>& rs, const std::vector<int>& cs) {
    for (int r : rs)
      for (int c : cs) {
        const auto& cell = pat.at(r, c);
        if (cell.kind == CellKind::Fixed && !cell.diagonal) return true;
      }
    return false;
  };

  std::vector<int> rsel, csel;
  std::function<void(int, int)> choose_cols;
  std::function<void(int, int)> choose_rows = [&](int start, int k) {
    if (static_cast<int>(rsel.size()) == k) {
      csel.clear();
      choose_cols(0, k);
      return;
    }
    for (int r = start; r < nr; ++r) {
      rsel.push_back(r);
      choose_rows(r + 1, k);
      rsel.pop_back();
    }
  };
  choose_cols = [&](int start, int k) {
    if (static_cast<int>(csel.size()) == k) {
      if (has_known(rsel, csel)) test_block(model, pat, rsel, csel, points, report);
      return;
    }
    for (int c = start; c < nc; ++c) {
      // prune: every chosen column must be fixed on the chosen rows
      bool ok = true;
      for (int r : rsel)
        if (pat.at(r, c).kind == CellKind::Parametrized) ok = false;
      if (!ok) continue;
      csel.push_back(c);
      choose_cols(c + 1, k);
      csel.pop_back();
    }
  };
  for (int k = 1; k <= cap; ++k) choose_rows(0, k);
  report.exhaustive_up_to = cap;

  // Random larger blocks: grow a fixed block greedily from random seeds.
  const int max_size = std::min(nr, nc);
  if (max_size > cap && probes > 0) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (int t = 0; t < probes; ++t) {
      std::vector<int> rs(static_cast<std::size_t>(nr)), cs(static_cast<std::size_t>(nc));
      for (int r = 0; r < nr; ++r) rs[static_cast<std::size_t>(r)] = r;
      for (int c = 0; c < nc; ++c) cs[static_cast<std::size_t>(c)] = c;
      std::shuffle(rs.begin(), rs.end(), rng);
      std::shuffle(cs.begin(), cs.end(), rng);
      std::uniform_int_distribution<int> size_dist(cap + 1, max_size);
      const int k = size_dist(rng);
      std::vector<int> r_pick(rs.begin(), rs.begin() + k);
      std::vector<int> c_pick;
      for (int c : cs) {
        if (static_cast<int>(c_pick.size()) == k) break;
        bool ok = true;
        for (int r : r_pick)
          if (pat.at(r, c).kind == CellKind::Parametrized) ok = false;
        if (ok) c_pick.push_back(c);
      }
      if (static_cast<int>(c_pick.size()) < k) continue;
      std::sort(r_pick.begin(), r_pick.end());
      std::sort(c_pick.begin(), c_pick.end());
      ++report.random_probes;
      if (all_fixed(pat, r_pick, c_pick) && has_known(r_pick, c_pick) &&
          full_structural_rank(pat, r_pick, c_pick))
        test_block(model, pat, r_pick, c_pick, points, report);
    }
  }
  report.passed = report.violation_count == 0;
  return report;
}

}  // namespace netident
