#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "corpus.hpp"

namespace netident {
namespace {

using testing::load_fixture;

// Maximum number of nonzeros on a permuted diagonal, by trying every injection
// of rows into columns.
int brute_force_structural_rank(const SparsityPattern& p) {
  const int r = p.row_count(), c = p.col_count();
  int best = 0;
  std::vector<int> assign(static_cast<std::size_t>(r), -1);
  std::vector<bool> used(static_cast<std::size_t>(c), false);
  std::function<void(int, int)> go = [&](int row, int count) {
    best = std::max(best, count);
    if (row == r || count + (r - row) <= best) return;
    go(row + 1, count);
    for (int col = 0; col < c; ++col)
      if (!used[static_cast<std::size_t>(col)] && p.at(row, col).kind != CellKind::Zero) {
        used[static_cast<std::size_t>(col)] = true;
        go(row + 1, count + 1);
        used[static_cast<std::size_t>(col)] = false;
      }
  };
  go(0, 0);
  return best;
}

int lu_rank(const Eigen::MatrixXcd& m) {
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(m);
  lu.setThreshold(1e-9);
  return static_cast<int>(lu.rank());
}

std::vector<SignalRef> all_externals(const NetworkModelSet& m) {
  std::vector<SignalRef> x;
  for (int k = 0; k < m.K(); ++k) x.push_back(excitation(k));
  for (int k = 0; k < m.p(); ++k) x.push_back(noise(k));
  return x;
}

NetworkModelSet fig3_with_r1_r5() { return load_fixture("fig3").with_excitations({0, 4}); }

TEST(StructuralRank, SmallPatterns) {
  EXPECT_EQ(structural_rank(std::vector<std::vector<bool>>{{true, false}, {true, true}}), 2);
  EXPECT_EQ(structural_rank(std::vector<std::vector<bool>>{{false, false}, {false, false}}), 0);
  EXPECT_EQ(structural_rank(std::vector<std::vector<bool>>{{true, true}, {false, false}}), 1);
}

TEST(StructuralRank, EqualsMaxRankOfRandomFillings) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<bool>> nz(8, std::vector<bool>(8));
    for (auto& row : nz)
      for (std::size_t c = 0; c < 8; ++c) row[c] = rng() % 4 == 0;
    int best = 0;
    for (int fill = 0; fill < 50; ++fill) {
      Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(8, 8);
      for (int r = 0; r < 8; ++r)
        for (int c = 0; c < 8; ++c)
          if (nz[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]) m(r, c) = gauss(rng);
      best = std::max(best, lu_rank(m));
    }
    EXPECT_EQ(structural_rank(nz), best);
  }
}

TEST(BuildF, SingletonIsOneParametrizedCell) {
  const auto f = build_F(load_fixture("singleton"), {0}, {noise(0)});
  ASSERT_EQ(f.row_count(), 1);
  ASSERT_EQ(f.col_count(), 1);
  EXPECT_EQ(f.at(0, 0).kind, CellKind::Parametrized);
}

TEST(BuildF, Fig2aOutputsFromBothExcitations) {
  const auto m = load_fixture("fig2a");
  const auto f = build_F(m, {2, 3}, {excitation(0), excitation(1)});
  EXPECT_EQ(f.row_count(), 4);
  EXPECT_EQ(f.col_count(), 4);
  EXPECT_EQ(structural_rank(f), brute_force_structural_rank(f));
  EXPECT_EQ(structural_rank(f), 4);
  // diagonal of G - I enters as a fixed -1
  EXPECT_EQ(f.at(0, 0).kind, CellKind::Fixed);
  EXPECT_TRUE(f.at(0, 0).diagonal);
}

TEST(BuildF, Fig1aRankRelation) {
  const auto m = load_fixture("fig1a");
  const std::vector<int> wbar{0, 2};
  const std::vector<SignalRef> xbar{noise(0)};
  const auto f = build_F(m, wbar, xbar);
  EXPECT_EQ(f.col_count(), 4 - 2 + 1);
  EXPECT_EQ(structural_rank(f), 3);
  EXPECT_EQ(brute_force_structural_rank(f), 3);
  const auto numeric = instantiate_random(m, 5);
  for (Complex z : sample_points(6, 4)) {
    const int rank_t = lu_rank(submatrix(numeric, transfer_matrix_T(numeric, z), wbar, xbar));
    const int rank_f = lu_rank(evaluate_pattern(f, numeric, z));
    EXPECT_EQ(rank_t, rank_f + 2 - 4);
  }
}

TEST(StructuralRank, MatchingAgreesWithExhaustiveSearch) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = testing::random_model(rng, {.max_L = 6});
    const auto x = all_externals(m);
    std::vector<int> wbar;
    for (int i = 0; i < m.L(); ++i)
      if (rng() & 1) wbar.push_back(i);
    const auto f = build_F(m, wbar, x);
    EXPECT_EQ(structural_rank(f), brute_force_structural_rank(f));
  }
}

TEST(GenericRankT, Examples) {
  const auto m = load_fixture("fig2a");
  EXPECT_EQ(generic_rank_T(m, {2, 3}, {excitation(0), excitation(1)}), 2);
  EXPECT_EQ(generic_rank_T(m, {2, 3}, {}), 0);
}

TEST(GenericRankT, MatchesNumericRankOnRandomModels) {
  std::mt19937_64 rng(33);
  int trials = 0, agree = 0;
  for (int t = 0; t < 150; ++t) {
    const auto m = testing::random_model(rng);
    const auto numeric = instantiate_random(m, rng());
    const auto x = all_externals(m);
    std::vector<int> wbar;
    for (int i = 0; i < m.L(); ++i)
      if (rng() & 1) wbar.push_back(i);
    const auto points = sample_points(rng(), 2);
    int rank = 0;
    for (Complex z : points) rank = std::max(rank, lu_rank(submatrix(numeric, transfer_matrix_T(numeric, z), wbar, x)));
    ++trials;
    agree += rank == generic_rank_T(m, wbar, x);
  }
  EXPECT_GE(agree, trials * 99 / 100);
}

TEST(PathConditions, Fig1aNotIdentifiable) {
  const auto v = check_path_conditions(load_fixture("fig1a"), {3, {0}});
  EXPECT_FALSE(v.identifiable);
  EXPECT_EQ(v.certificate.b_targets, 1);
  EXPECT_EQ(v.certificate.b_all_inputs, 1);
  EXPECT_EQ(v.certificate.b_other_inputs, 1);
  EXPECT_EQ(v.certificate.targets, 1);
}

TEST(PathConditions, Fig1bIdentifiable) {
  const auto v = check_path_conditions(load_fixture("fig1b"), {3, {0}});
  EXPECT_TRUE(v.identifiable);
  EXPECT_EQ(v.certificate.b_all_inputs, 2);
  EXPECT_EQ(v.witness.size(), 2u);
}

TEST(PathConditions, Fig3AfterAllocationIdentifiable) {
  const auto m = load_fixture("fig3");
  EXPECT_FALSE(check_path_conditions(m, {6, {2}}).identifiable);
  EXPECT_TRUE(check_path_conditions(fig3_with_r1_r5(), {6, {2}}).identifiable);
}

TEST(PathConditions, AllInputsReduceToSingleCondition) {
  std::mt19937_64 rng(34);
  for (int t = 0; t < 100; ++t) {
    const auto m = testing::random_model(rng);
    for (int j = 0; j < m.L(); ++j) {
      const auto wj = compute_Wj(m, j);
      if (wj.empty()) continue;
      const auto v = check_path_conditions(m, {j, wj});
      EXPECT_EQ(v.identifiable, v.certificate.b_all_inputs == static_cast<int>(wj.size()));
    }
  }
}

TEST(PathConditions, InvalidQueryThrows) {
  EXPECT_THROW(check_path_conditions(load_fixture("fig1a"), {3, {1}}), QueryError);
  EXPECT_THROW(check_disconnecting_conditions(load_fixture("fig1a"), {3, {1}}), QueryError);
}

TEST(DisconnectingConditions, Fig1bWitnessW2) {
  const auto m = load_fixture("fig1b");
  const auto v = check_disconnecting_conditions(m, {3, {0}});
  EXPECT_TRUE(v.identifiable);
  ASSERT_TRUE(v.disconnecting_set.has_value());
  EXPECT_EQ(*v.disconnecting_set, VertexSet{1});
  EXPECT_EQ(v.b_cut, 2);
}

TEST(DisconnectingConditions, Fig3WitnessW4W7) {
  const auto m = fig3_with_r1_r5();
  const auto v = check_disconnecting_conditions(m, {6, {2}});
  EXPECT_TRUE(v.identifiable);
  ASSERT_TRUE(v.disconnecting_set.has_value());
  EXPECT_EQ(*v.disconnecting_set, (VertexSet{3, 6}));
  EXPECT_EQ(v.b_cut, 3);
}

TEST(DisconnectingConditions, CanonicalSetOfFig3) {
  const auto m = load_fixture("fig3");
  const auto graph = derive_graph(m);
  const auto d = canonical_disconnecting_set(graph.digraph(), {2}, graph.internal_vertices({3, 5, 7}),
                                             graph.vertices({noise(0)}));
  EXPECT_EQ(d, (VertexSet{3, 6}));
}

TEST(DisconnectingConditions, AgreesWithPathConditions) {
  std::mt19937_64 rng(35);
  for (int t = 0; t < 120; ++t) {
    const auto m = testing::random_model(rng);
    for (const auto& q : testing::all_queries(m, 8)) {
      const auto a = check_path_conditions(m, q);
      const auto b = check_disconnecting_conditions(m, q);
      EXPECT_EQ(a.identifiable, b.identifiable);
      ASSERT_TRUE(b.disconnecting_set.has_value());
      for (int w : q.targets) EXPECT_FALSE(b.disconnecting_set->count(w));
    }
  }
}

TEST(AlgebraicConditions, Fig1aFailsAtEverySample) {
  const auto m = load_fixture("fig1a");
  const auto numeric = instantiate_random(m, 1);
  const auto points = sample_points(2, 5);
  const auto v = check_algebraic_conditions(m, numeric, {3, {0}}, points);
  EXPECT_FALSE(v.identifiable);
  ASSERT_EQ(v.samples.size(), points.size());
  for (const auto& s : v.samples) {
    EXPECT_FALSE(s.identifiable);
    EXPECT_FALSE(s.F_form_identifiable);
    EXPECT_LT(s.rank_all, s.rank_targets + s.rank_others);
  }
}

TEST(AlgebraicConditions, Fig1bHolds) {
  const auto m = load_fixture("fig1b");
  const auto numeric = instantiate_random(m, 1);
  const auto v = check_algebraic_conditions(m, numeric, {3, {0}}, sample_points(2, 5));
  EXPECT_TRUE(v.identifiable);
  for (const auto& s : v.samples) EXPECT_TRUE(s.F_form_identifiable);
}

TEST(AlgebraicConditions, AgreesWithGraphVerdict) {
  std::mt19937_64 rng(36);
  int total = 0, agree = 0;
  for (int t = 0; t < 150; ++t) {
    const auto m = testing::random_model(rng);
    const auto q = testing::random_query(m, rng);
    if (!q) continue;
    const auto numeric = instantiate_random(m, rng());
    const auto alg = check_algebraic_conditions(m, numeric, *q, sample_points(rng(), 2));
    ++total;
    agree += alg.identifiable == check_path_conditions(m, *q).identifiable;
  }
  ASSERT_GT(total, 50);
  EXPECT_GE(agree * 100, total * 99);
}

TEST(AlgebraicConditions, RankIdentityOnRandomInstances) {
  std::mt19937_64 rng(37);
  for (int t = 0; t < 100; ++t) {
    const auto m = testing::random_model(rng);
    const auto numeric = instantiate_random(m, rng());
    std::vector<int> wbar;
    for (int i = 0; i < m.L(); ++i)
      if (rng() & 1) wbar.push_back(i);
    std::vector<SignalRef> xbar;
    for (auto x : all_externals(m))
      if (rng() & 1) xbar.push_back(x);
    for (Complex z : sample_points(rng(), 2)) {
      const auto c = check_rank_identity(m, numeric, wbar, xbar, z);
      EXPECT_TRUE(c.holds);
      EXPECT_EQ(c.rank_T + m.L(), c.rank_F + static_cast<int>(wbar.size()));
    }
  }
}

NetworkModelSet fig1a_all_parametrized() {
  return NetworkModelSet::make(4, 0, 1,
                               {{0, noise(0), Parametrized{false}},
                                {1, internal(0), Parametrized{true}},
                                {2, internal(1), Parametrized{true}},
                                {3, internal(2), Parametrized{true}},
                                {3, internal(0), Parametrized{true}},
                                {3, internal(1), Parametrized{true}}});
}

TEST(ParallelPathLoop, Fig1aStructure) {
  const auto m = fig1a_all_parametrized();
  // parallel paths w1 -> w2 -> w4 and w1 -> w2 -> w3 -> w4 both pass w2; no loops
  const auto r = parallel_path_loop_equivalence(m, 0, 3, {1});
  EXPECT_TRUE(r.disconnecting);
  EXPECT_TRUE(r.blocks_paths_and_loops);
  const auto empty = parallel_path_loop_equivalence(m, 0, 3, {});
  EXPECT_FALSE(empty.disconnecting);
  EXPECT_FALSE(empty.blocks_paths_and_loops);
  const auto others = parallel_path_loop_equivalence(m, 0, 3, {1, 2});
  EXPECT_TRUE(others.disconnecting);
  EXPECT_TRUE(others.blocks_paths_and_loops);
}

TEST(ParallelPathLoop, PreconditionsEnforced) {
  EXPECT_THROW(parallel_path_loop_equivalence(load_fixture("fig1a"), 0, 3, {1}), std::invalid_argument);
  const auto m = fig1a_all_parametrized();
  EXPECT_THROW(parallel_path_loop_equivalence(m, 0, 3, {0}), std::invalid_argument);
  EXPECT_THROW(parallel_path_loop_equivalence(m, 2, 0, {}), std::invalid_argument);
}

TEST(ParallelPathLoop, LoopThroughOutputMustBeHit) {
  // w1 -> w2, w2 -> w3 -> w2 loop through the output w2
  const auto m = NetworkModelSet::make(3, 1, 0,
                                       {{0, excitation(0), Known{RationalTF::constant(1.0)}},
                                        {1, internal(0), Parametrized{true}},
                                        {2, internal(1), Parametrized{true}},
                                        {1, internal(2), Parametrized{true}}});
  const auto none = parallel_path_loop_equivalence(m, 0, 1, {});
  EXPECT_FALSE(none.disconnecting);
  EXPECT_FALSE(none.blocks_paths_and_loops);
  const auto hit = parallel_path_loop_equivalence(m, 0, 1, {2});
  EXPECT_TRUE(hit.disconnecting);
  EXPECT_TRUE(hit.blocks_paths_and_loops);
}

TEST(ParallelPathLoop, LoopClosingThroughModuleEdgeIgnored) {
  // w1 -> w2, w3 -> w2, w2 -> w3; the loop w2 -> w3 -> w2 enters w2 along the module edge
  const auto m = NetworkModelSet::make(3, 1, 0,
                                       {{0, excitation(0), Known{RationalTF::constant(1.0)}},
                                        {1, internal(0), Parametrized{true}},
                                        {1, internal(2), Parametrized{true}},
                                        {2, internal(1), Parametrized{true}}});
  const auto r = parallel_path_loop_equivalence(m, 2, 1, {});
  EXPECT_TRUE(r.disconnecting);
  EXPECT_TRUE(r.blocks_paths_and_loops);
}

TEST(Assumption5, DegenerateFig2b) {
  const auto r = check_assumption5(load_fixture("fig2b_degenerate"));
  EXPECT_FALSE(r.passed);
  EXPECT_FALSE(r.vacuous);
  ASSERT_FALSE(r.violations.empty());
  bool two_by_two = false;
  for (const auto& v : r.violations)
    two_by_two |= v.rows.size() == 2 && v.structural_rank == 2 && v.numeric_rank == 1;
  EXPECT_TRUE(two_by_two);
}

TEST(Assumption5, GenericKnownValuesPass) {
  std::mt19937_64 rng(38);
  for (int t = 0; t < 30; ++t) {
    const auto m = testing::random_model(rng, {.max_L = 6});
    const auto r = check_assumption5(m);
    EXPECT_TRUE(r.passed) << serialize_model(m);
  }
}

TEST(Assumption5, NoKnownEntriesIsVacuous) {
  const auto m = NetworkModelSet::make(2, 0, 1, {{0, noise(0), Parametrized{false}}, {1, internal(0), Parametrized{true}}});
  const auto v = check_assumption5(m);
  EXPECT_TRUE(v.passed);
  EXPECT_TRUE(v.vacuous);
}

}  // namespace
}  // namespace netident
