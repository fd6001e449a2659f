#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oracles/core.hpp"
#include "oracles/partition_algebra.hpp"
#include "oracles/signaling.hpp"

namespace oracles {

using ActionProfile = std::vector<std::size_t>;

// Finite Bayesian game: state-independent action sets and a rational payoff
// vector for every (state, action profile).
class BayesianGame {
 public:
  using PayoffFn = std::function<std::vector<Rational>(State, const ActionProfile&)>;

  BayesianGame(InformationStructure structure, std::vector<std::vector<std::string>> actions,
               std::vector<std::vector<std::vector<Rational>>> payoff)
      : structure_(std::move(structure)), actions_(std::move(actions)), payoff_(std::move(payoff)) {
    const std::size_t n = structure_.player_count();
    if (actions_.size() != n) throw DomainError("game needs one action set per player");
    profiles_ = 1;
    for (const auto& a : actions_) {
      if (a.empty()) throw DomainError("every player needs at least one action");
      std::set<std::string> distinct(a.begin(), a.end());
      if (distinct.size() != a.size()) throw DomainError("duplicate action label");
      profiles_ *= a.size();
    }
    if (payoff_.size() != structure_.space()->size()) throw DomainError("payoff table needs one entry per state");
    for (const auto& by_profile : payoff_) {
      if (by_profile.size() != profiles_) throw DomainError("payoff table is not total on action profiles");
      for (const auto& u : by_profile)
        if (u.size() != n) throw DomainError("payoff vector length does not match the player count");
    }
  }

  static BayesianGame from_function(InformationStructure structure, std::vector<std::vector<std::string>> actions,
                                    const PayoffFn& f) {
    std::size_t count = 1;
    for (const auto& a : actions) count *= a.size();
    std::vector<std::vector<std::vector<Rational>>> table(structure.space()->size());
    for (State w = 0; w < table.size(); ++w)
      for (std::size_t k = 0; k < count; ++k) table[w].push_back(f(w, decode_profile(actions, k)));
    return BayesianGame(std::move(structure), std::move(actions), std::move(table));
  }

  const InformationStructure& structure() const { return structure_; }
  std::size_t player_count() const { return actions_.size(); }
  std::size_t action_count(std::size_t i) const { return actions_.at(i).size(); }
  const std::vector<std::vector<std::string>>& actions() const { return actions_; }
  const std::string& action_label(std::size_t i, std::size_t a) const { return actions_.at(i).at(a); }
  std::size_t profile_count() const { return profiles_; }

  std::size_t action_index(std::size_t i, const std::string& label) const {
    const auto& a = actions_.at(i);
    auto it = std::find(a.begin(), a.end(), label);
    if (it == a.end()) throw DomainError("unknown action '" + label + "' for player " + structure_.players()[i].name);
    return static_cast<std::size_t>(it - a.begin());
  }

  // Mixed radix, player 0 most significant.
  std::size_t profile_index(const ActionProfile& profile) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < actions_.size(); ++i) k = k * actions_[i].size() + profile.at(i);
    return k;
  }
  ActionProfile decode(std::size_t k) const { return decode_profile(actions_, k); }

  std::string profile_key(std::size_t k) const {
    auto p = decode(k);
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i) out += (i ? "|" : "") + actions_[i][p[i]];
    return out;
  }

  const Rational& payoff(State w, std::size_t profile, std::size_t player) const {
    return payoff_.at(w).at(profile).at(player);
  }
  const std::vector<std::vector<std::vector<Rational>>>& table() const { return payoff_; }

  bool is_common_payoff() const {
    for (const auto& by_profile : payoff_)
      for (const auto& u : by_profile)
        for (const auto& x : u)
          if (x != u.front()) return false;
    return true;
  }

 private:
  static ActionProfile decode_profile(const std::vector<std::vector<std::string>>& actions, std::size_t k) {
    ActionProfile p(actions.size());
    for (std::size_t i = actions.size(); i-- > 0;) {
      p[i] = k % actions[i].size();
      k /= actions[i].size();
    }
    return p;
  }

  InformationStructure structure_;
  std::vector<std::vector<std::string>> actions_;
  std::vector<std::vector<std::vector<Rational>>> payoff_;  // [state][profile][player]
  std::size_t profiles_ = 1;
};

// (block of the player's own partition, signal index)
using InfoSet = std::pair<std::size_t, std::size_t>;
using MixedAction = std::vector<Rational>;

struct StrategyProfile {
  std::vector<std::map<InfoSet, MixedAction>> per_player;
};

inline MixedAction pure_action(std::size_t count, std::size_t a) {
  MixedAction m(count, Rational(0));
  m.at(a) = 1;
  return m;
}

// Information sets (block, signal) of player i reached with positive probability.
inline std::vector<InfoSet> reachable_info_sets(const InformationStructure& structure, std::size_t player,
                                                const StochasticSignaling& tau) {
  std::set<InfoSet> out;
  for (State w = 0; w < tau.state_count(); ++w)
    for (std::size_t s = 0; s < tau.signal_count(); ++s)
      if (tau.prob(w, s) > 0) out.insert({structure.player(player).block_of(w), s});
  return {out.begin(), out.end()};
}

namespace detail {

inline const MixedAction& lookup(const BayesianGame& game, const StrategyProfile& sigma, std::size_t player,
                                 const InfoSet& info) {
  if (sigma.per_player.size() != game.player_count()) throw DomainError("strategy profile has the wrong player count");
  auto it = sigma.per_player[player].find(info);
  if (it == sigma.per_player[player].end())
    throw DomainError("strategy of player " + game.structure().players()[player].name +
                      " is undefined at a reachable information set");
  if (it->second.size() != game.action_count(player)) throw DomainError("mixed action has the wrong length");
  return it->second;
}

// Calls visit(profile_index, probability) for every profile with positive
// probability under independent mixing. `fixed` pins one player's action.
template <typename Visit>
void for_each_profile(const BayesianGame& game, const std::vector<const MixedAction*>& mixes,
                      std::optional<std::pair<std::size_t, std::size_t>> fixed, Visit&& visit) {
  const std::size_t n = game.player_count();
  ActionProfile profile(n, 0);
  std::function<void(std::size_t, const Rational&)> rec = [&](std::size_t i, const Rational& prob) {
    if (i == n) {
      visit(game.profile_index(profile), prob);
      return;
    }
    if (fixed && fixed->first == i) {
      profile[i] = fixed->second;
      rec(i + 1, prob);
      return;
    }
    const auto& mix = *mixes[i];
    for (std::size_t a = 0; a < mix.size(); ++a) {
      if (mix[a] == 0) continue;
      profile[i] = a;
      rec(i + 1, prob * mix[a]);
    }
  };
  rec(0, Rational(1));
}

inline std::vector<const MixedAction*> mixes_at(const BayesianGame& game, const StrategyProfile& sigma, State w,
                                                std::size_t signal) {
  std::vector<const MixedAction*> mixes;
  for (std::size_t i = 0; i < game.player_count(); ++i)
    mixes.push_back(&lookup(game, sigma, i, {game.structure().player(i).block_of(w), signal}));
  return mixes;
}

}  // namespace detail

// sum_w mu(w) sum_s tau(s|w) sum_a prod_i sigma_i(a_i|Pi_i(w),s) u(w,a), restricted to `event`.
inline std::vector<Rational> unnormalized_payoffs(const BayesianGame& game, const StochasticSignaling& tau,
                                                  const StrategyProfile& sigma, const StateSet& event) {
  require_compatible(game.structure(), tau);
  std::vector<Rational> out(game.player_count(), Rational(0));
  for (State w : event)
    for (std::size_t s = 0; s < tau.signal_count(); ++s) {
      if (tau.prob(w, s) == 0) continue;
      Rational weight = game.structure().prior()[w] * tau.prob(w, s);
      detail::for_each_profile(game, detail::mixes_at(game, sigma, w, s), std::nullopt,
                               [&](std::size_t k, const Rational& p) {
                                 for (std::size_t i = 0; i < out.size(); ++i) out[i] += weight * p * game.payoff(w, k, i);
                               });
    }
  return out;
}

inline std::vector<Rational> expected_payoffs(const BayesianGame& game, const StochasticSignaling& tau,
                                              const StrategyProfile& sigma) {
  StateSet all(game.structure().space()->size());
  for (State w = 0; w < all.size(); ++w) all[w] = w;
  return unnormalized_payoffs(game, tau, sigma, all);
}

// Expected payoffs conditional on the state lying in `event`.
inline std::vector<Rational> conditional_payoffs(const BayesianGame& game, const StochasticSignaling& tau,
                                                 const StrategyProfile& sigma, const StateSet& event) {
  auto out = unnormalized_payoffs(game, tau, sigma, event);
  Rational mass = game.structure().prior().mass(event);
  if (mass == 0) throw DomainError("conditioning on an empty event");
  for (auto& x : out) x /= mass;
  return out;
}

// Distribution over (state, action profile) induced by a strategy profile.
struct OutcomeDistribution {
  std::map<std::pair<State, std::size_t>, Rational> mass;

  Rational at(State w, std::size_t profile) const {
    auto it = mass.find({w, profile});
    return it == mass.end() ? Rational(0) : it->second;
  }
  std::vector<Rational> state_marginal(std::size_t states) const {
    std::vector<Rational> out(states, Rational(0));
    for (const auto& [key, m] : mass) out.at(key.first) += m;
    return out;
  }
  Rational total() const {
    Rational t = 0;
    for (const auto& [key, m] : mass) t += m;
    return t;
  }
};

inline OutcomeDistribution ned_distribution(const BayesianGame& game, const StochasticSignaling& tau,
                                            const StrategyProfile& sigma) {
  require_compatible(game.structure(), tau);
  OutcomeDistribution out;
  for (State w = 0; w < tau.state_count(); ++w)
    for (std::size_t s = 0; s < tau.signal_count(); ++s) {
      if (tau.prob(w, s) == 0) continue;
      Rational weight = game.structure().prior()[w] * tau.prob(w, s);
      detail::for_each_profile(game, detail::mixes_at(game, sigma, w, s), std::nullopt,
                               [&](std::size_t k, const Rational& p) { out.mass[{w, k}] += weight * p; });
    }
  return out;
}

struct Deviation {
  std::size_t player;
  InfoSet info;
  std::size_t action;
  Rational gain;  // increase of the player's ex-ante expected payoff
};

struct EquilibriumCheck {
  bool holds = true;
  std::optional<Deviation> deviation;
};

namespace detail {

// Ex-ante payoff contribution of each pure action of `player` at `info`.
inline std::vector<Rational> action_values(const BayesianGame& game, const StochasticSignaling& tau,
                                           const StrategyProfile& sigma, std::size_t player, const InfoSet& info) {
  std::vector<Rational> values(game.action_count(player), Rational(0));
  for (State w : game.structure().player(player).block(info.first)) {
    if (tau.prob(w, info.second) == 0) continue;
    Rational weight = game.structure().prior()[w] * tau.prob(w, info.second);
    auto mixes = mixes_at(game, sigma, w, info.second);
    for (std::size_t a = 0; a < values.size(); ++a)
      for_each_profile(game, mixes, std::make_pair(player, a),
                       [&](std::size_t k, const Rational& p) { values[a] += weight * p * game.payoff(w, k, player); });
  }
  return values;
}

}  // namespace detail

// Nash check against all measurable pure deviations. Payoffs separate across
// information sets, so the best deviation is found one information set at a time.
inline EquilibriumCheck is_equilibrium(const BayesianGame& game, const StochasticSignaling& tau,
                                       const StrategyProfile& sigma) {
  require_compatible(game.structure(), tau);
  for (std::size_t i = 0; i < game.player_count(); ++i)
    for (const auto& info : reachable_info_sets(game.structure(), i, tau)) {
      auto values = detail::action_values(game, tau, sigma, i, info);
      const auto& mix = detail::lookup(game, sigma, i, info);
      Rational current = 0;
      for (std::size_t a = 0; a < values.size(); ++a) current += mix[a] * values[a];
      std::size_t best = 0;
      for (std::size_t a = 1; a < values.size(); ++a)
        if (values[a] > values[best]) best = a;
      if (values[best] > current) return {false, Deviation{i, info, best, values[best] - current}};
    }
  return {};
}

inline constexpr std::size_t kDefaultProfileCap = std::size_t{1} << 20;

namespace detail {

struct Slot {
  std::size_t player;
  InfoSet info;
};

inline std::vector<Slot> slots(const BayesianGame& game, const StochasticSignaling& tau) {
  std::vector<Slot> out;
  for (std::size_t i = 0; i < game.player_count(); ++i)
    for (const auto& info : reachable_info_sets(game.structure(), i, tau)) out.push_back({i, info});
  return out;
}

inline void check_cap(const BayesianGame& game, const std::vector<Slot>& slots, std::size_t cap, const char* what) {
  long double count = 1;
  for (const auto& slot : slots) count *= static_cast<long double>(game.action_count(slot.player));
  if (count > static_cast<long double>(cap)) throw ResourceError(what, cap);
}

}  // namespace detail

// Every pure measurable profile that is an equilibrium, in odometer order
// over (player, information set) slots with the last slot varying fastest.
inline std::vector<StrategyProfile> enumerate_pure_equilibria(const BayesianGame& game, const StochasticSignaling& tau,
                                                              std::size_t cap = kDefaultProfileCap) {
  require_compatible(game.structure(), tau);
  auto slots = detail::slots(game, tau);
  detail::check_cap(game, slots, cap, "pure profile enumeration");
  std::vector<std::size_t> choice(slots.size(), 0);
  std::vector<StrategyProfile> out;
  while (true) {
    StrategyProfile sigma;
    sigma.per_player.resize(game.player_count());
    for (std::size_t k = 0; k < slots.size(); ++k)
      sigma.per_player[slots[k].player][slots[k].info] = pure_action(game.action_count(slots[k].player), choice[k]);
    if (is_equilibrium(game, tau, sigma).holds) out.push_back(std::move(sigma));
    std::size_t k = slots.size();
    while (k > 0) {
      --k;
      if (++choice[k] < game.action_count(slots[k].player)) break;
      choice[k] = 0;
      if (k == 0) return out;
    }
    if (slots.empty()) return out;
  }
}

// Highest expected common payoff over pure measurable profiles, which is the
// best equilibrium payoff of a common-objective game. Points (w, s) that share
// no information set are optimized independently.
inline Rational best_common_payoff(const BayesianGame& game, const StochasticSignaling& tau,
                                   std::size_t cap = kDefaultProfileCap) {
  if (!game.is_common_payoff()) throw DomainError("best_common_payoff needs a game with one common payoff function");
  require_compatible(game.structure(), tau);
  const auto& structure = game.structure();
  const std::size_t n = game.player_count();
  std::vector<std::pair<State, std::size_t>> points;
  for (State w = 0; w < tau.state_count(); ++w)
    for (std::size_t s = 0; s < tau.signal_count(); ++s)
      if (tau.prob(w, s) > 0) points.push_back({w, s});
  detail::UnionFind uf(points.size());
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b) {
      if (points[a].second != points[b].second) continue;
      for (std::size_t i = 0; i < n; ++i)
        if (structure.player(i).block_of(points[a].first) == structure.player(i).block_of(points[b].first))
          uf.unite(a, b);
    }
  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t k = 0; k < points.size(); ++k) components[uf.find(k)].push_back(k);

  Rational total = 0;
  for (const auto& [root, members] : components) {
    std::vector<detail::Slot> slots;
    std::map<std::pair<std::size_t, InfoSet>, std::size_t> slot_of;
    for (std::size_t k : members)
      for (std::size_t i = 0; i < n; ++i) {
        InfoSet info{structure.player(i).block_of(points[k].first), points[k].second};
        if (slot_of.emplace(std::make_pair(i, info), slots.size()).second) slots.push_back({i, info});
      }
    detail::check_cap(game, slots, cap, "common-payoff profile search");
    std::vector<std::size_t> choice(slots.size(), 0);
    std::optional<Rational> best;
    ActionProfile profile(n);
    while (true) {
      Rational value = 0;
      for (std::size_t k : members) {
        auto [w, s] = points[k];
        for (std::size_t i = 0; i < n; ++i)
          profile[i] = choice[slot_of.at({i, InfoSet{structure.player(i).block_of(w), s}})];
        value += structure.prior()[w] * tau.prob(w, s) * game.payoff(w, game.profile_index(profile), 0);
      }
      if (!best || value > *best) best = value;
      std::size_t k = slots.size();
      bool done = true;
      while (k > 0) {
        --k;
        if (++choice[k] < game.action_count(slots[k].player)) {
          done = false;
          break;
        }
        choice[k] = 0;
      }
      if (done) break;
    }
    total += *best;
  }
  return total;
}

// A single decision maker's payoff u(w, a).
struct DecisionProblem {
  std::vector<std::string> actions;
  std::vector<std::vector<Rational>> payoff;  // [state][action]
};

// sum over (block of Pi_i, signal) of max_a sum_{w in block} mu(w) tau(s|w) u(w,a).
inline Rational decision_value(const InformationStructure& structure, std::size_t player,
                               const StochasticSignaling& tau, const DecisionProblem& problem) {
  require_compatible(structure, tau);
  if (problem.payoff.size() != structure.space()->size()) throw DomainError("decision payoff needs one row per state");
  Rational total = 0;
  for (const auto& [block, s] : reachable_info_sets(structure, player, tau)) {
    std::optional<Rational> best;
    for (std::size_t a = 0; a < problem.actions.size(); ++a) {
      Rational v = 0;
      for (State w : structure.player(player).block(block)) v += structure.prior()[w] * tau.prob(w, s) * problem.payoff[w].at(a);
      if (!best || v > *best) best = v;
    }
    if (best) total += *best;
  }
  return total;
}

inline Rational decision_value(const InformationStructure& structure, std::size_t player,
                               const DeterministicSignaling& tau, const DecisionProblem& problem) {
  return decision_value(structure, player, tau.to_stochastic(), problem);
}

struct PermutationGame {
  Partition blocks;  // canonical blocks B_j of Pi_i v tau
  DecisionProblem problem;
  std::vector<std::size_t> action_block;               // block index of each action
  std::vector<std::vector<std::size_t>> positions;     // position p(w) of each block member, in member order
  Rational penalty;
};

inline constexpr std::size_t kDefaultPermutationCap = 40320;

// Actions are the permutations of each block B_j; an action for B_j pays
// p(w) / (mu(w|B_j) |B_j|) at w in B_j and -2^(10|Omega|) / min mu elsewhere.
inline PermutationGame build_permutation_game(const InformationStructure& structure, std::size_t player,
                                              const DeterministicSignaling& tau,
                                              std::size_t cap = kDefaultPermutationCap) {
  PermutationGame g;
  g.blocks = join(structure.player(player), tau.induced_partition()).canonical();
  std::size_t total = 0;
  for (const auto& block : g.blocks.blocks()) {
    std::size_t f = 1;
    for (std::size_t k = 2; k <= block.size(); ++k) {
      f *= k;
      if (f > cap) break;
    }
    total += f;
    if (total > cap) throw ResourceError("permutation game action count", cap);
  }
  const std::size_t n = structure.space()->size();
  g.penalty = -Rational(BigInt(1) << (10 * n)) / structure.prior().min_mass();
  g.problem.payoff.assign(n, {});
  for (std::size_t j = 0; j < g.blocks.block_count(); ++j) {
    const auto& block = g.blocks.block(j);
    Rational block_mass = structure.prior().mass(block);
    Rational size(static_cast<long>(block.size()));
    std::vector<std::size_t> pos(block.size());
    for (std::size_t k = 0; k < pos.size(); ++k) pos[k] = k + 1;
    do {
      g.problem.actions.push_back("a" + std::to_string(g.problem.actions.size() + 1));
      g.action_block.push_back(j);
      g.positions.push_back(pos);
      for (State w = 0; w < n; ++w) {
        auto it = std::find(block.begin(), block.end(), w);
        if (it == block.end()) {
          g.problem.payoff[w].push_back(g.penalty);
        } else {
          Rational cond = structure.prior()[w] / block_mass;
          g.problem.payoff[w].push_back(Rational(static_cast<long>(pos[it - block.begin()])) / (cond * size));
        }
      }
    } while (std::next_permutation(pos.begin(), pos.end()));
  }
  return g;
}

}  // namespace oracles
