#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "ikf/ikf.hpp"
#include "ikf/scenarios.hpp"
#include "test_util.hpp"

using namespace ikf;

namespace {

DirectionEvidence dir(std::size_t lead, std::size_t count, double avg) {
  return {lead, count > 0, count, avg * static_cast<double>(count), avg};
}

IkfParams quick_params() {
  IkfParams params;
  params.king.n_trees = 30;
  params.king.max_depth = 3;
  params.king.n_iter = 2;
  params.king.n_top = 10;
  return params;
}

KingReport profile_only(std::size_t king, std::vector<double> profile) {
  KingReport k;
  k.king = king;
  k.pvim_profile = std::move(profile);
  return k;
}

}  // namespace

TEST(Params, DefaultStopSize) {
  EXPECT_EQ(default_stop_size(200), 10u);
  EXPECT_EQ(default_stop_size(500), 10u);
  EXPECT_EQ(default_stop_size(1000), 20u);
  EXPECT_EQ(default_stop_size(1001), 21u);
}

TEST(Params, ValidateRejectsOutOfRange) {
  IkfParams p;
  EXPECT_NO_THROW(validate(p));
  p.alpha = 1.0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = {};
  p.max_kings = 0;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = {};
  p.tau_dir = -1;
  EXPECT_THROW(validate(p), std::invalid_argument);
  p = {};
  p.king.n_trees = 0;
  EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(InferOrders, Examples) {
  EXPECT_TRUE(infer_orders(std::vector<double>{0, 0, 0, 0}, 0.0).empty());
  EXPECT_EQ(infer_orders(std::vector<double>{0.19, 3.75, 4.03, 4.47}, 0.5), (std::vector<int>{2}));
  EXPECT_EQ(infer_orders(std::vector<double>{0.20, 1.11, 1.33, 1.24}, 0.5), (std::vector<int>{2}));
  EXPECT_EQ(infer_orders(std::vector<double>{0.20, 1.11, 1.33, 1.24}, 0.1), (std::vector<int>{1, 2, 3}));
}

TEST(InferOrders, NonIncreasingProfileClaimsAtMostOrderOne) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    std::vector<double> profile(1 + gen() % 6);
    for (auto& v : profile) v = u(gen) * 2 - 0.5;
    std::sort(profile.rbegin(), profile.rend());
    auto orders = infer_orders(profile, u(gen) * 0.1);
    EXPECT_LE(orders.size(), 1u);
    if (!orders.empty()) EXPECT_EQ(orders[0], 1);
  }
}

TEST(Classify, SynergisticWhenBothDirectionsStrong) {
  // (Zld, Twi) 22 reps avg 0.0323; (Twi, Zld) 33 reps avg 0.0090; no main effects.
  auto t = classify_interaction({0, 1}, {dir(0, 22, 0.0323), dir(1, 33, 0.0090)},
                                {-4.163e-19, -2.318e-17}, {1e-6, 1e-6});
  EXPECT_EQ(t.kind, InteractionKind::Synergistic);
  EXPECT_FALSE(t.low_confidence);
  EXPECT_TRUE(t.dominant.empty());
}

TEST(Classify, HierarchicalWhenOneDirectionIsNumericalZero) {
  // (Zld, Kni) 69 reps avg 0.0459; (Kni, Zld) 15 reps avg 2e-16.
  auto t = classify_interaction({0, 2}, {dir(0, 69, 0.0459), dir(2, 15, 2e-16)},
                                {-4.163e-19, -4.774e-17}, {1e-6, 1e-6});
  EXPECT_EQ(t.kind, InteractionKind::Hierarchical);
  EXPECT_EQ(t.dominant, (std::vector<std::size_t>{0}));
}

TEST(Classify, AccompaniedWhenAMemberHasAMainEffect) {
  auto t = classify_interaction({4, 6}, {dir(4, 50, 0.4), dir(6, 40, 0.3)}, {1.8, 0.01}, {0.45, 1e-6});
  EXPECT_EQ(t.kind, InteractionKind::Accompanied);
  auto u = classify_interaction({4, 6}, {dir(4, 50, 0.4), dir(6, 0, 0.0)}, {1.8, std::nullopt}, {0.45, 1e-6});
  EXPECT_EQ(u.kind, InteractionKind::Accompanied);
}

TEST(Classify, NoStrongDirectionIsLowConfidence) {
  auto t = classify_interaction({1, 2}, {dir(1, 3, 0.0), dir(2, 0, 0.0)}, {0.0, std::nullopt}, {1.0, 1e-6});
  EXPECT_EQ(t.kind, InteractionKind::Synergistic);
  EXPECT_TRUE(t.low_confidence);
}

TEST(Classify, ThirdOrderHierarchyListsStrongLeads) {
  auto t = classify_interaction({0, 2, 4}, {dir(0, 9, 0.2), dir(2, 0, 0.0), dir(4, 7, 0.5)},
                                {0.0, 0.0, 0.0}, {1.0, 1e-6});
  EXPECT_EQ(t.kind, InteractionKind::Hierarchical);
  EXPECT_EQ(t.dominant, (std::vector<std::size_t>{4, 0}));
  EXPECT_LT(t.dominant.size(), t.vars.size());
}

TEST(Classify, InvariantToJointPositiveRescaling) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(-0.2, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const std::size_t m = 2 + gen() % 2;
    std::vector<std::size_t> vars(m);
    std::vector<DirectionEvidence> dirs;
    std::vector<std::optional<double>> mains;
    for (std::size_t i = 0; i < m; ++i) {
      vars[i] = i;
      dirs.push_back(dir(i, 1 + gen() % 20, gen() % 3 == 0 ? 0.0 : u(gen)));
      mains.push_back(gen() % 4 == 0 ? std::nullopt : std::optional<double>(u(gen)));
    }
    TypingThresholds th{std::abs(u(gen)), std::abs(u(gen)) * 0.1};
    const double c = std::ldexp(1.0, static_cast<int>(gen() % 20) - 10);  // exact power-of-two scale
    auto scaled_dirs = dirs;
    for (auto& d : scaled_dirs) {
      d.avg_pvim *= c;
      d.pvim_sum *= c;
    }
    auto scaled_mains = mains;
    for (auto& mm : scaled_mains)
      if (mm) *mm *= c;
    auto a = classify_interaction(vars, dirs, mains, th);
    auto b = classify_interaction(vars, scaled_dirs, scaled_mains, {th.tau_main * c, th.tau_dir * c});
    EXPECT_EQ(a.kind, b.kind);
    EXPECT_EQ(a.dominant, b.dominant);
    EXPECT_EQ(a.low_confidence, b.low_confidence);
  }
}

TEST(Thresholds, DefaultsFloorAtTauDir) {
  // Depth-1 profile values of nine Kings whose main effects are numerically zero.
  std::vector<KingReport> kings;
  const std::vector<double> d1{-4.774e-17, -2.318e-17, -4.163e-19, 2.359e-18, 1.388e-18,
                               -4.163e-18, 1.568e-17, -5.829e-18, -4.857e-18};
  for (std::size_t k = 0; k < d1.size(); ++k) kings.push_back(profile_only(k, {d1[k], 0.0}));
  IkfParams params;
  auto th = typing_thresholds(kings, params);
  EXPECT_EQ(th.tau_main, 1e-6);
  EXPECT_EQ(th.tau_dir, 1e-6);

  kings.push_back(profile_only(9, {2.0, 2.5}));
  EXPECT_DOUBLE_EQ(typing_thresholds(kings, params).tau_main, 0.5);
  params.tau_main = 0.7;
  EXPECT_EQ(typing_thresholds(kings, params).tau_main, 0.7);

  IkfParams q;
  EXPECT_DOUBLE_EQ(order_threshold(std::vector<double>{0.1, 0.4, 0.3}, q), 0.04);
  EXPECT_EQ(order_threshold(std::vector<double>{-1e-17, 2e-17}, q), 1e-6);
  q.tau_order = 0.2;
  EXPECT_EQ(order_threshold(std::vector<double>{0.1, 0.4}, q), 0.2);
}

TEST(TypeInteractions, DirectionsComeFromEachLeadKing) {
  KingReport a = profile_only(0, {0.0, 0.5});
  a.paths = {{{{0, 1}, 10, 1.0}, {{0, 3}, 2, 0.4}}};
  a.shortlists = {{2, {{{0, 1}, 10, 1.0}}, {{{0, 1}, 10, 1.0}}}};
  KingReport b = profile_only(1, {0.0, 0.0});
  b.paths = {{{{1, 0}, 5, 0.0}}};
  b.shortlists = {{2, {{{1, 0}, 5, 0.0}}, {{{1, 0}, 5, 0.0}}}};
  std::vector<KingReport> kings{a, b};
  auto typed = type_interactions(kings, {1.0, 1e-6});
  ASSERT_EQ(typed.size(), 1u);
  const auto& t = typed[0];
  EXPECT_EQ(t.vars, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(t.kind, InteractionKind::Hierarchical);
  EXPECT_EQ(t.dominant, (std::vector<std::size_t>{0}));
  ASSERT_EQ(t.directions.size(), 2u);
  EXPECT_EQ(t.directions[0].count, 10u);
  EXPECT_DOUBLE_EQ(t.directions[0].avg_pvim, 0.1);
  EXPECT_EQ(t.directions[1].count, 5u);
  EXPECT_TRUE(t.directions[1].observed);
}

TEST(TypeInteractions, NonKingMembersHaveNoEvidence) {
  KingReport a = profile_only(0, {0.0, 0.5});
  a.paths = {{{{0, 7}, 4, 0.8}}};
  a.shortlists = {{2, {{{0, 7}, 4, 0.8}}, {}}};
  std::vector<KingReport> kings{a};
  auto typed = type_interactions(kings, {1.0, 1e-6});
  ASSERT_EQ(typed.size(), 1u);
  EXPECT_FALSE(typed[0].directions[1].observed);
  EXPECT_FALSE(typed[0].main_pvims[1].has_value());
  EXPECT_EQ(typed[0].kind, InteractionKind::Hierarchical);
}

TEST(FirstKing, NamedAndRandom) {
  auto data = test::noise_dataset(50, 10, 1);
  IkfParams p;
  p.first_king = {FirstKingMode::Named, "x5"};
  EXPECT_EQ(choose_first_king(data, p, SeedContext(1)), 4u);
  p.first_king = {FirstKingMode::Named, "7"};
  EXPECT_EQ(choose_first_king(data, p, SeedContext(1)), 6u);
  p.first_king = {FirstKingMode::Named, "x11"};
  EXPECT_THROW(choose_first_king(data, p, SeedContext(1)), DataError);
  p.first_king = {FirstKingMode::Random, {}};
  const auto a = choose_first_king(data, p, SeedContext(9));
  EXPECT_EQ(a, choose_first_king(data, p, SeedContext(9)));
  std::set<std::size_t> seen;
  for (int s = 0; s < 50; ++s) seen.insert(choose_first_king(data, p, SeedContext(s)));
  EXPECT_GT(seen.size(), 5u);
}

TEST(FirstKing, AutoFindsTheStrongMainEffect) {
  int hits = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto data = test::random_dataset(200, 10, 500 + s, [](const std::vector<double>& x, std::mt19937_64& r) {
      return 5 * x[1] + std::normal_distribution<double>()(r);
    });
    hits += choose_first_king(data, IkfParams{}, SeedContext(s)) == 1;
  }
  EXPECT_GE(hits, 18);
}

TEST(RunIkf, MaxKingsOneGivesThatKingsWeights) {
  auto data = test::noise_dataset(80, 15, 2);
  auto params = quick_params();
  params.max_kings = 1;
  params.first_king = {FirstKingMode::Named, "x3"};
  auto report = run_ikf(data, params, SeedContext(4));
  ASSERT_EQ(report.kings.size(), 1u);
  EXPECT_EQ(report.kings[0].king, 2u);
  EXPECT_EQ(report.W, report.kings[0].weights);
}

TEST(RunIkf, OuterLoopInvariants) {
  auto data = test::random_dataset(120, 40, 3, [](const std::vector<double>& x, std::mt19937_64& r) {
    return 2 * x[0] * x[2] - 2 * x[4] * (x[6] < 0.2) + std::normal_distribution<double>()(r);
  });
  auto params = quick_params();
  params.stop_size = 3;
  auto report = run_ikf(data, params, SeedContext(8));
  ASSERT_FALSE(report.kings.empty());
  EXPECT_EQ(report.survived.size(), report.kings.size());
  // |I_1| = ceil(0.5 * 40) = 20, so S_1 holds exactly 20 variables.
  EXPECT_EQ(report.survived[0].size(), 20u);
  std::set<std::size_t> kings;
  std::vector<double> sum(40, 0.0);
  for (std::size_t i = 0; i < report.kings.size(); ++i) {
    EXPECT_TRUE(kings.insert(report.kings[i].king).second) << "King repeated";
    for (std::size_t v = 0; v < 40; ++v) sum[v] += report.kings[i].weights[v];
    if (i > 0) {
      const auto& prev = report.survived[i - 1];
      const auto& cur = report.survived[i];
      EXPECT_TRUE(std::includes(prev.begin(), prev.end(), cur.begin(), cur.end()));
    }
    test::expect_path_bound(report.kings[i]);
  }
  EXPECT_EQ(report.W, sum);
  const bool stopped_by_size = report.survived.back().size() <= 3;
  EXPECT_TRUE(stopped_by_size || report.kings.size() == 40);
  for (std::size_t i = 0; i + 1 < report.kings.size(); ++i) EXPECT_GT(report.survived[i].size(), 3u);
  EXPECT_EQ(report.orders.size(), report.kings.size());
}

TEST(RunIkf, NextKingIsArgmaxOfAccumulatedWeights) {
  auto data = test::random_dataset(100, 20, 4, [](const std::vector<double>& x, std::mt19937_64& r) {
    return x[0] * x[1] + x[2] + std::normal_distribution<double>()(r);
  });
  auto params = quick_params();
  params.max_kings = 4;
  auto report = run_ikf(data, params, SeedContext(5));
  std::vector<double> W(20, 0.0);
  std::set<std::size_t> used;
  for (std::size_t i = 0; i + 1 < report.kings.size(); ++i) {
    for (std::size_t v = 0; v < 20; ++v) W[v] += report.kings[i].weights[v];
    used.insert(report.kings[i].king);
    std::size_t best = 20;
    for (std::size_t v = 0; v < 20; ++v)
      if (!used.count(v) && (best == 20 || W[v] > W[best])) best = v;
    EXPECT_EQ(report.kings[i + 1].king, best);
  }
}

TEST(RunIkf, DeterministicPerSeed) {
  auto data = test::noise_dataset(60, 12, 6);
  auto params = quick_params();
  params.max_kings = 2;
  auto a = run_ikf(data, params, SeedContext(7));
  auto b = run_ikf(data, params, SeedContext(7));
  EXPECT_EQ(a.W, b.W);
  EXPECT_EQ(a.interactions, b.interactions);
  EXPECT_EQ(a.survived, b.survived);
}

TEST(RunIkf, RestrictedRankingKeepsTheChain) {
  auto data = test::noise_dataset(80, 30, 9);
  auto params = quick_params();
  params.restrict_to_survivors = true;
  params.stop_size = 4;
  auto report = run_ikf(data, params, SeedContext(9));
  std::size_t expected = 30;
  for (const auto& s : report.survived) {
    expected = static_cast<std::size_t>(std::ceil(0.5 * static_cast<double>(expected) - 1e-9));
    EXPECT_EQ(s.size(), expected);
  }
}

TEST(RunIkf, ScenarioA1TruthRanksNearTheTop) {
  // Paper-scale p = 200: median MRS is 4, upper quartile 8.
  int hits = 0;
  const int seeds = 6;
  for (int s = 0; s < seeds; ++s) {
    auto data = generate(Scenario::make(ScenarioId::A1, 200, 200), 2000 + s);
    auto report = run_ikf(data, IkfParams{}, SeedContext(s));
    auto ranking = report.ranking();
    std::set<std::size_t> top(ranking.begin(), ranking.begin() + 10);
    hits += top.count(0) && top.count(2) && top.count(4) && top.count(6);
  }
  EXPECT_GE(hits, 4);
}
