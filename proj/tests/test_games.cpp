#include <gtest/gtest.h>

#include <random>

#include "oracles/games.hpp"
#include "support.hpp"

using namespace oracles;
using brute::Rational;

namespace {

// Rock concert: states n1, n2, s1, s2; actions D, M.
BayesianGame concert() {
  auto s = std::make_shared<const StateSpace>(std::vector<std::string>{"n1", "n2", "s1", "s2"});
  InformationStructure st(Prior::uniform(s),
                          {{"Band1", Partition(s, {{0, 3}, {1, 2}})}, {"Band2", Partition(s, {{0}, {2}, {1, 3}})}},
                          {{"F1", Partition(s, {{0, 2}, {1}, {3}})}});
  return BayesianGame::from_function(st, {{"D", "M"}, {"D", "M"}}, [](State w, const ActionProfile& a) {
    const bool nice = w < 2;
    const std::size_t good = nice ? 1 : 0;  // M in nice weather, D otherwise
    auto u = [&](std::size_t mine, std::size_t other) -> Rational {
      if (mine == good && other == good) return 10;
      if (mine == good) return 26;
      if (other == good) return -1;
      return -3;
    };
    return std::vector<Rational>{u(a[0], a[1]), u(a[1], a[0])};
  });
}

StochasticSignaling reveal(const Partition& oracle, const Partition& coarse) {
  return DeterministicSignaling::revealing(oracle, coarse).to_stochastic();
}

}  // namespace

TEST(BayesianGame, ValidatesShapes) {
  auto s = StateSpace::numbered(2);
  InformationStructure st(Prior::uniform(s), {{"P", Partition::trivial(s)}});
  EXPECT_THROW(BayesianGame(st, {{"a", "a"}}, {{{0}, {0}}, {{0}, {0}}}), DomainError);
  EXPECT_THROW(BayesianGame(st, {{"a", "b"}}, {{{0}}, {{0}}}), DomainError);
  EXPECT_THROW(BayesianGame(st, {{"a"}, {"b"}}, {{{0}}, {{0}}}), DomainError);
  BayesianGame g(st, {{"a", "b"}}, {{{1}, {2}}, {{3}, {4}}});
  EXPECT_EQ(g.payoff(1, 1, 0), 4);
  EXPECT_TRUE(g.is_common_payoff());
}

TEST(BayesianGame, ProfileIndexing) {
  auto g = concert();
  EXPECT_EQ(g.profile_index({1, 0}), 2u);
  EXPECT_EQ(g.profile_key(2), "M|D");
  EXPECT_EQ(g.decode(3), (ActionProfile{1, 1}));
  EXPECT_FALSE(g.is_common_payoff());
}

TEST(Concert, GuidedEquilibriumPayoffs) {
  auto g = concert();
  const auto& st = g.structure();
  auto tau = reveal(st.partition("F1"), Partition(st.space(), {{0, 2}, {1, 3}}));
  // Band1 knows everything; Band2 mixes at {n2, s2}.
  StrategyProfile sigma;
  sigma.per_player.resize(2);
  auto block1 = [&](State w) { return st.player(0).block_of(w); };
  auto block2 = [&](State w) { return st.player(1).block_of(w); };
  auto sig = [&](State w) { return tau.prob(w, 0) == 1 ? std::size_t{0} : std::size_t{1}; };
  sigma.per_player[0][{block1(0), sig(0)}] = pure_action(2, 1);
  sigma.per_player[0][{block1(2), sig(2)}] = pure_action(2, 0);
  sigma.per_player[0][{block1(1), sig(1)}] = pure_action(2, 1);
  sigma.per_player[0][{block1(3), sig(3)}] = pure_action(2, 0);
  sigma.per_player[1][{block2(0), sig(0)}] = pure_action(2, 1);
  sigma.per_player[1][{block2(2), sig(2)}] = pure_action(2, 0);
  sigma.per_player[1][{block2(1), sig(1)}] = {Rational(1, 2), Rational(1, 2)};
  EXPECT_TRUE(is_equilibrium(g, tau, sigma).holds);
  EXPECT_EQ(conditional_payoffs(g, tau, sigma, {1, 3}), (std::vector<Rational>{18, Rational(9, 2)}));
  auto ned = ned_distribution(g, tau, sigma);
  EXPECT_EQ(ned.total(), 1);
  EXPECT_EQ(ned.at(1, g.profile_index({1, 0})), Rational(1, 8));
  EXPECT_EQ(ned.state_marginal(4), (std::vector<Rational>(4, Rational(1, 4))));
}

TEST(Concert, SilentAlwaysDIsNotAnEquilibrium) {
  auto g = concert();
  const auto& st = g.structure();
  auto tau = reveal(st.partition("F1"), Partition::trivial(st.space()));
  StrategyProfile sigma;
  sigma.per_player.resize(2);
  for (std::size_t i = 0; i < 2; ++i)
    for (const auto& info : reachable_info_sets(st, i, tau)) sigma.per_player[i][info] = pure_action(2, 0);
  auto check = is_equilibrium(g, tau, sigma);
  EXPECT_FALSE(check.holds);
  ASSERT_TRUE(check.deviation);
  EXPECT_GT(check.deviation->gain, 0);
}

TEST(Equilibria, EnumerationMatchesWholeStrategyBruteForce) {
  std::mt19937 rng(21);
  for (int k = 0; k < 40; ++k) {
    auto s = StateSpace::numbered(3);
    auto st = brute::uniform_structure(s, {brute::random_partition(s, rng), brute::random_partition(s, rng)});
    auto tau = brute::random_signaling(brute::random_partition(s, rng), 2, rng);
    std::uniform_int_distribution<int> value(-3, 3);
    auto g = BayesianGame::from_function(st, {{"a", "b"}, {"a", "b"}}, [&](State, const ActionProfile&) {
      return std::vector<Rational>{value(rng), value(rng)};
    });
    std::size_t brute_count = 0;
    brute::for_each_pure_profile(g, tau, [&](const brute::PureStrategy& sigma) {
      bool ours = is_equilibrium(g, tau, brute::to_profile(g, sigma)).holds;
      bool theirs = brute::pure_is_equilibrium(g, tau, sigma);
      EXPECT_EQ(ours, theirs);
      EXPECT_EQ(expected_payoffs(g, tau, brute::to_profile(g, sigma)), brute::pure_payoffs(g, tau, sigma));
      brute_count += theirs;
    });
    auto all = enumerate_pure_equilibria(g, tau);
    EXPECT_EQ(all.size(), brute_count);
    for (const auto& eq : all) EXPECT_TRUE(is_equilibrium(g, tau, eq).holds);
  }
}

TEST(Equilibria, BestCommonPayoffMatchesBruteMaximum) {
  std::mt19937 rng(22);
  for (int k = 0; k < 40; ++k) {
    auto s = StateSpace::numbered(3 + k % 2);
    auto st = brute::uniform_structure(s, {brute::random_partition(s, rng), brute::random_partition(s, rng)});
    auto tau = brute::random_signaling(brute::random_partition(s, rng), 2, rng);
    std::uniform_int_distribution<int> value(0, 4);
    auto g = BayesianGame::from_function(st, {{"a", "b"}, {"a", "b"}}, [&](State, const ActionProfile&) {
      Rational v = value(rng);
      return std::vector<Rational>{v, v};
    });
    std::optional<Rational> best;
    brute::for_each_pure_profile(g, tau, [&](const brute::PureStrategy& sigma) {
      auto u = brute::pure_payoffs(g, tau, sigma)[0];
      if (!best || u > *best) best = u;
    });
    EXPECT_EQ(best_common_payoff(g, tau), *best);
  }
}

TEST(Equilibria, ProfileCapRaisesResourceError) {
  auto s = StateSpace::numbered(6);
  InformationStructure st(Prior::uniform(s), {{"A", Partition::discrete(s)}, {"B", Partition::discrete(s)}});
  auto g = BayesianGame::from_function(st, {{"a", "b"}, {"a", "b"}},
                                       [](State, const ActionProfile&) { return std::vector<Rational>{0, 0}; });
  auto tau = DeterministicSignaling::full_reveal(Partition::discrete(s)).to_stochastic();
  EXPECT_THROW(enumerate_pure_equilibria(g, tau, 1000), ResourceError);
  EXPECT_EQ(enumerate_pure_equilibria(g, tau).size(), 4096u);
}

TEST(DecisionValue, MatchesBruteMaxPerInformationSet) {
  auto s = StateSpace::numbered(3);
  InformationStructure st(Prior(s, {Rational(1, 2), Rational(1, 4), Rational(1, 4)}), {{"P", Partition(s, {{0, 1}, {2}})}});
  DecisionProblem dp{{"x", "y"}, {{2, 0}, {0, 3}, {1, 1}}};
  auto silent = DeterministicSignaling::silent(Partition::discrete(s));
  auto full = DeterministicSignaling::full_reveal(Partition::discrete(s));
  // Block {0,1}: max(1, 3/4) = 1; block {2}: 1/4.
  EXPECT_EQ(decision_value(st, 0, silent, dp), Rational(5, 4));
  EXPECT_EQ(decision_value(st, 0, full, dp), Rational(1) + Rational(3, 4) + Rational(1, 4));
}

TEST(PermutationGame, ShapeAndPenalty) {
  auto s = StateSpace::numbered(4);
  InformationStructure st(Prior::uniform(s), {{"P", Partition(s, {{0, 1, 2}, {3}})}});
  auto g = build_permutation_game(st, 0, DeterministicSignaling::silent(Partition::discrete(s)));
  EXPECT_EQ(g.problem.actions.size(), 7u);
  EXPECT_EQ(g.penalty, -Rational(BigInt(1) << 40) * 4);
  EXPECT_EQ(g.penalty, Rational(-(BigInt(1) << 42)));
  EXPECT_EQ(g.problem.payoff[0][0], 1);
  EXPECT_EQ(g.problem.payoff[2][0], 3);
  EXPECT_EQ(g.problem.payoff[3][6], 1);
  EXPECT_EQ(g.problem.payoff[3][0], g.penalty);
  EXPECT_EQ(g.problem.actions.back(), "a7");
  auto big = StateSpace::numbered(9);
  InformationStructure st9(Prior::uniform(big), {{"P", Partition::trivial(big)}});
  EXPECT_THROW(build_permutation_game(st9, 0, DeterministicSignaling::silent(Partition::discrete(big))), ResourceError);
}

TEST(PermutationGame, FinerInformationIsWorthMore) {
  std::mt19937 rng(23);
  auto s = StateSpace::numbered(4);
  for (int k = 0; k < 30; ++k) {
    InformationStructure st(Prior(s, brute::random_distribution(4, rng)), {{"P", brute::random_partition(s, rng)}});
    auto f = brute::random_partition(s, rng);
    auto coarse = DeterministicSignaling::silent(f);
    auto g = build_permutation_game(st, 0, coarse);
    auto base = decision_value(st, 0, coarse, g.problem);
    EXPECT_GE(decision_value(st, 0, DeterministicSignaling::full_reveal(f), g.problem), base);
    // Full information splits every non-singleton block and gains strictly.
    auto full = decision_value(st, 0, DeterministicSignaling::full_reveal(Partition::discrete(s)), g.problem);
    if (g.blocks.block_count() < 4) {
      EXPECT_GT(full, base);
    } else {
      EXPECT_EQ(full, base);
    }
  }
}
