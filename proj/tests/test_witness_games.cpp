#include <gtest/gtest.h>

#include <random>

#include "oracles/witness_games.hpp"
#include "support.hpp"

using namespace oracles;
using brute::Rational;

namespace {

InformationStructure example6() {
  auto s = StateSpace::numbered(4);
  return InformationStructure(Prior::uniform(s),
                              {{"P1", Partition(s, {{0, 1}, {2}, {3}})}, {"P2", Partition(s, {{0}, {1}, {2, 3}})}},
                              {{"F1", Partition(s, {{0, 3}, {1, 2}})}, {"F2", Partition(s, {{0, 2}, {1, 3}})}});
}

StochasticSignaling tau2(const InformationStructure& st) {
  return StochasticSignaling::from_block_rows(st.partition("F2"), {"s1", "s2", "s3"},
                                              {{0, Rational(1, 2), Rational(1, 2)}, {Rational(1, 4), Rational(3, 4), 0}});
}

StochasticSignaling mimic(const InformationStructure& st) {
  return StochasticSignaling::from_block_rows(st.partition("F1"), {"t1", "t2"},
                                              {{Rational(1, 4), Rational(3, 4)}, {Rational(3, 8), Rational(5, 8)}});
}

JointPosteriorProfile profile(std::vector<std::vector<Rational>> ps) {
  JointPosteriorProfile p;
  for (auto& d : ps) p.per_player.emplace_back(std::move(d));
  return p;
}

}  // namespace

TEST(BeliefGame, PointPayoffsByHand) {
  // p1 = (1/2, 1/2, 0), p2 = (0, 1/4, 3/4).
  BeliefGame g(profile({{Rational(1, 2), Rational(1, 2), 0}, {0, Rational(1, 4), Rational(3, 4)}}));
  EXPECT_EQ(g.actions(0), (StateSet{0, 1}));
  EXPECT_EQ(g.reward(0, 0, 0), 2);
  EXPECT_EQ(g.reward(0, 1, 0), 0);
  EXPECT_EQ(g.reward(0, 0, 2), -2);
  EXPECT_THROW(g.reward(1, 0, 1), DomainError);
  // w = 1: both supports contain it. R1 = 2 (a1 = 1), R2 = 4 (a2 = 1).
  EXPECT_EQ(g.payoff(0, {1, 1}, 1), 2 - 2 * 4);
  EXPECT_EQ(g.payoff(1, {1, 1}, 1), 4 - 2 * 2);
  // w = 0: outside p2's support, so only R1 = 2 enters and R2 = -2 is not charged to player 1.
  EXPECT_EQ(g.payoff(0, {0, 2}, 0), 2);
  EXPECT_EQ(g.payoff(1, {0, 2}, 0), -2 - 2 * 2);
}

TEST(BeliefGame, TruthfulBeliefsEarnMinusOneEach) {
  std::mt19937 rng(31);
  for (int k = 0; k < 60; ++k) {
    std::size_t n = 2 + k % 3, states = 2 + rng() % 3;
    JointPosteriorProfile p;
    for (std::size_t i = 0; i < n; ++i) p.per_player.emplace_back(brute::random_distribution(states, rng, 0.3));
    BeliefGame g(p);
    std::vector<State> a;
    for (std::size_t i = 0; i < n; ++i) a.push_back(g.best_response(i, p.per_player[i]));
    // Under its own belief every action in the support scores exactly 1.
    EXPECT_EQ(g.expected_payoffs(p.per_player, a), std::vector<Rational>(n, Rational(-1)));
    EXPECT_TRUE(g.is_equilibrium(p.per_player, a));
  }
}

TEST(BeliefGame, NeedsTwoPlayers) {
  EXPECT_THROW(BeliefGame(profile({{1}})), DomainError);
  BeliefGame g(profile({{1, 0}, {0, 1}}));
  EXPECT_THROW(g.expected_payoffs({Distribution({1, 0})}, {0, 1}), DomainError);
}

TEST(TwoStage, TruthfulPlayIsAnEquilibriumAtMinusN) {
  auto st = example6();
  auto t = tau2(st);
  TwoStageGame g(st, t);
  auto sigma = g.truthful(t);
  EXPECT_EQ(g.aggregate(t, sigma), -2);
  EXPECT_FALSE(g.profitable_deviation(t, sigma));
  auto m = g.max_aggregate(t);
  ASSERT_TRUE(m.best_feasible);
  EXPECT_TRUE(m.exact());
  EXPECT_GE(*m.best_feasible, -2);
  ASSERT_TRUE(m.argmax);
  EXPECT_EQ(g.aggregate(t, *m.argmax), *m.best_feasible);
}

TEST(TwoStage, PenaltyBoundFromMenus) {
  auto st = example6();
  TwoStageGame g(st, tau2(st));
  Rational r_max = 2;
  for (std::size_t i = 0; i < 2; ++i)
    for (const auto& d : g.menu(i))
      for (const auto& x : d.masses())
        if (x > 0 && 1 / x > r_max) r_max = 1 / x;
  EXPECT_EQ(g.penalty_bound(), 2 + Rational(2 * 4) * (1 + 3 * r_max));
  EXPECT_EQ(g.penalty(), g.penalty_bound());
  EXPECT_THROW(TwoStageGame(st, tau2(st), Rational(1)), DomainError);
  TwoStageGame big(st, tau2(st), Rational(1000));
  EXPECT_EQ(big.penalty(), 1000);
}

TEST(TwoStage, DisagreeingDeclarationsPayThePenalty) {
  auto st = example6();
  auto t = tau2(st);
  TwoStageGame g(st, t);
  Declaration a{0, 0, g.menu(0)[0].support().front()};
  Declaration b{1, 0, g.menu(1)[0].support().front()};
  Declaration silent{std::nullopt, 0, g.menu(1)[0].support().front()};
  EXPECT_FALSE(g.feasible({&a, &b}));
  EXPECT_FALSE(g.feasible({&a, &silent}));
  EXPECT_EQ(g.point_payoffs({&a, &b}, 0), std::vector<Rational>(2, -g.penalty()));
}

TEST(TwoStage, MimickingSignalingStaysBelowMinusN) {
  auto st = example6();
  TwoStageGame g(st, tau2(st));
  auto m = g.max_aggregate(mimic(st));
  EXPECT_LT(m.upper_bound(), -2);
  EXPECT_LT(m.infeasible_bound, -2);
}

TEST(TwoStage, MaxAggregateDominatesRandomFeasibleStrategies) {
  auto st = example6();
  auto t = tau2(st);
  TwoStageGame g(st, t);
  auto m = g.max_aggregate(t);
  ASSERT_TRUE(m.exact());
  std::mt19937 rng(32);
  auto base = g.truthful(t);
  for (int k = 0; k < 200; ++k) {
    auto sigma = base;
    for (std::size_t i = 0; i < 2; ++i)
      for (auto& [info, d] : sigma[i]) {
        if (rng() % 3) continue;
        d.posterior = rng() % g.menu(i).size();
        d.action = g.menu(i)[d.posterior].support().front();
      }
    EXPECT_LE(g.aggregate(t, sigma), *m.best_feasible);
  }
}

TEST(LogScore, ArgmaxAgreesWithCrossMultipliedComparison) {
  std::mt19937 rng(33);
  for (int k = 0; k < 200; ++k) {
    std::size_t states = 2 + rng() % 3;
    auto q = brute::random_distribution(states, rng, 0.3);
    std::vector<Distribution> cands;
    for (std::size_t c = 0, m = 1 + rng() % 4; c < m; ++c) cands.emplace_back(brute::random_distribution(states, rng, 0.3));
    auto choice = log_score_argmax(Distribution(q), cands);
    for (std::size_t c = 0; c < cands.size(); ++c) {
      int cmp = brute::compare_log_scores(q, cands[choice.index].masses(), cands[c].masses());
      EXPECT_GE(cmp, 0);
      if (c < choice.index) {
        EXPECT_GT(cmp, 0);
      }
    }
  }
}

TEST(LogScore, TrueDistributionWinsUniquely) {
  Distribution q({Rational(1, 3), Rational(2, 3)});
  auto c = log_score_argmax(q, {Distribution({Rational(1, 2), Rational(1, 2)}), q, Distribution({0, 1})});
  EXPECT_EQ(c.index, 1u);
  EXPECT_TRUE(c.unique);
  auto tie = log_score_argmax(q, {q, q});
  EXPECT_EQ(tie.index, 0u);
  EXPECT_FALSE(tie.unique);
  EXPECT_THROW(log_score_argmax(q, {}), DomainError);
}

TEST(Kld, BestResponsesReportTheTruePosterior) {
  auto st = example6();
  auto t = tau2(st);
  KldGame g(st, t);
  auto best = g.best_responses(t);
  for (std::size_t i = 0; i < 2; ++i)
    for (const auto& [info, k] : best[i]) {
      State w = 0;
      for (State v : st.player(i).block(info.first))
        if (t.prob(v, info.second) > 0) {
          w = v;
          break;
        }
      EXPECT_EQ(g.menu(i)[k], stoch_posterior(st, i, t, w, info.second));
    }
  auto value = g.expected_payoffs(t, best);
  std::mt19937 rng(34);
  for (int k = 0; k < 50; ++k) {
    auto other = best;
    for (std::size_t i = 0; i < 2; ++i)
      for (auto& [info, idx] : other[i]) idx = rng() % g.menu(i).size();
    auto v = g.expected_payoffs(t, other);
    for (std::size_t i = 0; i < 2; ++i) EXPECT_FALSE(v[i] > value[i]);
  }
}

TEST(Combined, HalvesEachComponent) {
  auto st = example6();
  auto t = tau2(st);
  CombinedGame g(st, t);
  auto first = g.two_stage().truthful(t);
  auto second = g.kld().best_responses(t);
  auto a = g.two_stage().expected_payoffs(t, first);
  auto b = g.kld().expected_payoffs(t, second);
  auto c = g.expected_payoffs(t, first, second);
  ASSERT_EQ(c.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(c[i].two_stage_half, a[i] / 2);
    EXPECT_TRUE(c[i].kld_half + c[i].kld_half == b[i]);
  }
}
