#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oracles/games.hpp"
#include "oracles/signaling.hpp"

namespace oracles {

// G(p): player i picks a state from supp(p^i) and is scored by
//   R_i(a, w) = -2 if w is outside supp(p^i), 1/p^i_w if a = w, else 0,
//   u_i = R_i - 2/(n-1) * sum_{j != i} R_j * [w in supp(p^j)].
class BeliefGame {
 public:
  explicit BeliefGame(JointPosteriorProfile p) : p_(std::move(p)) {
    if (p_.per_player.size() < 2) throw DomainError("the belief game needs at least two players");
    for (const auto& d : p_.per_player) supports_.push_back(d.support());
  }

  std::size_t player_count() const { return p_.per_player.size(); }
  const JointPosteriorProfile& profile() const { return p_; }
  const StateSet& actions(std::size_t i) const { return supports_.at(i); }

  bool in_support(std::size_t i, State w) const { return p_.per_player[i][w] > 0; }

  Rational reward(std::size_t i, State a, State w) const {
    if (!in_support(i, a)) throw DomainError("action outside the support of the player's target belief");
    if (!in_support(i, w)) return -2;
    return a == w ? Rational(1 / p_.per_player[i][w]) : Rational(0);
  }

  Rational payoff(std::size_t i, const std::vector<State>& a, State w) const {
    Rational others = 0;
    for (std::size_t j = 0; j < player_count(); ++j)
      if (j != i && in_support(j, w)) others += reward(j, a[j], w);
    return reward(i, a[i], w) - Rational(2, static_cast<long>(player_count() - 1)) * others;
  }

  // Expected payoffs when each reward term R_j is taken in expectation under
  // player j's own belief q^j.
  std::vector<Rational> expected_payoffs(const std::vector<Distribution>& beliefs, const std::vector<State>& a) const {
    const std::size_t n = player_count();
    if (beliefs.size() != n || a.size() != n) throw DomainError("need one belief and one action per player");
    std::vector<Rational> own(n, Rational(0)), inside(n, Rational(0));
    for (std::size_t j = 0; j < n; ++j)
      for (State w = 0; w < beliefs[j].size(); ++w) {
        if (beliefs[j][w] == 0) continue;
        Rational r = reward(j, a[j], w);
        own[j] += beliefs[j][w] * r;
        if (in_support(j, w)) inside[j] += beliefs[j][w] * r;
      }
    std::vector<Rational> out(n);
    Rational factor(2, static_cast<long>(n - 1));
    for (std::size_t i = 0; i < n; ++i) {
      Rational others = 0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i) others += inside[j];
      out[i] = own[i] - factor * others;
    }
    return out;
  }

  // Maximizes the expectation of R_i under q; ties go to the smallest state.
  State best_response(std::size_t i, const Distribution& q) const {
    std::optional<State> best;
    Rational best_value;
    for (State a : actions(i)) {
      Rational v = 0;
      for (State w = 0; w < q.size(); ++w)
        if (q[w] > 0) v += q[w] * reward(i, a, w);
      if (!best || v > best_value) {
        best = a;
        best_value = v;
      }
    }
    return *best;
  }

  bool is_equilibrium(const std::vector<Distribution>& beliefs, const std::vector<State>& a) const {
    auto base = expected_payoffs(beliefs, a);
    for (std::size_t i = 0; i < player_count(); ++i)
      for (State alt : actions(i)) {
        auto deviated = a;
        deviated[i] = alt;
        if (expected_payoffs(beliefs, deviated)[i] > base[i]) return false;
      }
    return true;
  }

 private:
  JointPosteriorProfile p_;
  std::vector<StateSet> supports_;
};

// One player's choice at an information set of the two-stage game.
struct Declaration {
  std::optional<std::size_t> signal;  // index into the reference signaling's alphabet; nullopt declares nothing
  std::size_t posterior = 0;          // index into the player's posterior menu
  State action = 0;                   // second-stage action, a state in the declared posterior's support
};

using TwoStageStrategy = std::vector<std::map<InfoSet, Declaration>>;

struct TwoStageDeviation {
  std::size_t player;
  InfoSet info;
  Declaration declaration;
  Rational gain;
};

struct TwoStageMax {
  std::optional<Rational> best_feasible;  // max aggregate over profiles feasible at every point
  std::optional<TwoStageStrategy> argmax;
  Rational infeasible_bound;  // every profile with an infeasible point aggregates to at most this

  bool exact() const { return best_feasible && infeasible_bound < *best_feasible; }
  Rational upper_bound() const {
    return best_feasible && *best_feasible > infeasible_bound ? *best_feasible : infeasible_bound;
  }
};

// Declare a signal and a posterior, then play G(p) on the declared profile p.
// Declarations that disagree on the signal, or whose profile is not one that
// the reference signaling produces with that signal, cost every player M.
class TwoStageGame {
 public:
  TwoStageGame(InformationStructure structure, StochasticSignaling reference, std::optional<Rational> penalty = std::nullopt)
      : structure_(std::move(structure)), reference_(std::move(reference)) {
    require_compatible(structure_, reference_);
    if (structure_.player_count() < 2) throw DomainError("the two-stage game needs at least two players");
    auto atlas = posterior_atlas(structure_, reference_);
    for (std::size_t i = 0; i < structure_.player_count(); ++i) menus_.push_back(atlas.marginals(i));
    for (std::size_t s = 0; s < reference_.signal_count(); ++s) {
      std::set<std::vector<std::size_t>> allowed;
      for (const auto& profile : profiles_for_signal(structure_, reference_, s)) allowed.insert(menu_indices(profile));
      feasible_.push_back(std::move(allowed));
    }
    bound_ = compute_bound();
    penalty_ = penalty.value_or(bound_);
    if (penalty_ < bound_)
      throw DomainError("penalty " + penalty_.str() + " is below the safety bound " + bound_.str());
  }

  const InformationStructure& structure() const { return structure_; }
  const StochasticSignaling& reference() const { return reference_; }
  const Rational& penalty() const { return penalty_; }
  const Rational& penalty_bound() const { return bound_; }
  const std::vector<Distribution>& menu(std::size_t i) const { return menus_.at(i); }

  std::vector<std::size_t> menu_indices(const JointPosteriorProfile& profile) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < profile.per_player.size(); ++i) {
      const auto& m = menus_[i];
      auto it = std::lower_bound(m.begin(), m.end(), profile.per_player[i]);
      if (it == m.end() || *it != profile.per_player[i]) throw DomainError("posterior is not on the player's menu");
      out.push_back(static_cast<std::size_t>(it - m.begin()));
    }
    return out;
  }

  JointPosteriorProfile profile_of(const std::vector<std::size_t>& indices) const {
    JointPosteriorProfile p;
    for (std::size_t i = 0; i < indices.size(); ++i) p.per_player.push_back(menus_[i].at(indices[i]));
    return p;
  }

  bool feasible(const std::vector<const Declaration*>& decls) const {
    const auto& first = decls.front()->signal;
    if (!first) return false;
    std::vector<std::size_t> indices;
    for (const auto* d : decls) {
      if (d->signal != first) return false;
      indices.push_back(d->posterior);
    }
    return feasible_.at(*first).count(indices) > 0;
  }

  // Payoffs at one point (w, signal) of the actual signaling.
  std::vector<Rational> point_payoffs(const std::vector<const Declaration*>& decls, State w) const {
    const std::size_t n = structure_.player_count();
    if (!feasible(decls)) return std::vector<Rational>(n, Rational(-penalty_));
    std::vector<std::size_t> indices;
    std::vector<State> actions;
    for (const auto* d : decls) {
      indices.push_back(d->posterior);
      actions.push_back(d->action);
    }
    BeliefGame g(profile_of(indices));
    std::vector<Rational> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(g.payoff(i, actions, w));
    return out;
  }

  std::vector<Rational> expected_payoffs(const StochasticSignaling& tau, const TwoStageStrategy& sigma) const {
    require_compatible(structure_, tau);
    std::vector<Rational> out(structure_.player_count(), Rational(0));
    for (State w = 0; w < tau.state_count(); ++w)
      for (std::size_t s = 0; s < tau.signal_count(); ++s) {
        if (tau.prob(w, s) == 0) continue;
        Rational weight = structure_.prior()[w] * tau.prob(w, s);
        auto u = point_payoffs(decls_at(sigma, w, s), w);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += weight * u[i];
      }
    return out;
  }

  Rational aggregate(const StochasticSignaling& tau, const TwoStageStrategy& sigma) const { return sum(expected_payoffs(tau, sigma)); }

  // Every player declares the signal actually sent and its own posterior, then
  // plays the smallest state of that posterior's support. Requires the actual
  // signals to carry the reference signaling's labels.
  TwoStageStrategy truthful(const StochasticSignaling& tau) const {
    require_compatible(structure_, tau);
    TwoStageStrategy sigma(structure_.player_count());
    for (std::size_t i = 0; i < sigma.size(); ++i)
      for (const auto& info : reachable_info_sets(structure_, i, tau)) {
        State w = witness_state(tau, i, info);
        Distribution q = stoch_posterior(structure_, i, tau, w, info.second);
        Declaration d;
        d.signal = reference_.signal_index(tau.signal(info.second));
        const auto& m = menus_[i];
        auto it = std::lower_bound(m.begin(), m.end(), q);
        if (it == m.end() || *it != q) throw DomainError("true posterior is not on the player's menu");
        d.posterior = static_cast<std::size_t>(it - m.begin());
        d.action = q.support().front();
        sigma[i][info] = d;
      }
    return sigma;
  }

  // Sweeps every menu declaration with every admissible action at every
  // information set of every player.
  std::optional<TwoStageDeviation> profitable_deviation(const StochasticSignaling& tau, const TwoStageStrategy& sigma) const {
    for (std::size_t i = 0; i < structure_.player_count(); ++i)
      for (const auto& info : reachable_info_sets(structure_, i, tau)) {
        Rational current = info_value(tau, sigma, i, info);
        auto trial = sigma;
        std::vector<std::optional<std::size_t>> signals{std::nullopt};
        for (std::size_t s = 0; s < reference_.signal_count(); ++s) signals.push_back(s);
        for (const auto& sig : signals)
          for (std::size_t k = 0; k < menus_[i].size(); ++k)
            for (State a : menus_[i][k].support()) {
              Declaration d{sig, k, a};
              trial[i][info] = d;
              Rational v = info_value(tau, trial, i, info);
              if (v > current) return TwoStageDeviation{i, info, d, v - current};
            }
      }
    return std::nullopt;
  }

  // Maximum aggregate expected payoff over pure declaration profiles, with
  // second-stage actions chosen as best responses. Profiles feasible at every
  // point are enumerated exactly by backtracking; any other profile pays M at
  // some point and is bounded by -n * M * (smallest point weight), because the
  // aggregate of G(p) is never positive.
  //
  // At a feasible point the players' payoffs sum to -R_j over players whose
  // declared support holds w, plus -2 for each other player, so the aggregate
  // splits into one term per (player, information set, declared posterior).
  TwoStageMax max_aggregate(const StochasticSignaling& tau) const {
    require_compatible(structure_, tau);
    const std::size_t n = structure_.player_count();
    struct Point {
      State w;
      std::size_t s;
      Rational weight;
    };
    std::vector<Point> points;
    for (State w = 0; w < tau.state_count(); ++w)
      for (std::size_t s = 0; s < tau.signal_count(); ++s)
        if (tau.prob(w, s) > 0) points.push_back({w, s, structure_.prior()[w] * tau.prob(w, s)});
    Rational min_weight = points.front().weight;
    for (const auto& p : points) min_weight = std::min(min_weight, p.weight);

    TwoStageMax out;
    out.infeasible_bound = -Rational(static_cast<long>(n)) * penalty_ * min_weight;

    std::vector<std::pair<std::size_t, std::vector<std::size_t>>> candidates;
    for (std::size_t s = 0; s < feasible_.size(); ++s)
      for (const auto& indices : feasible_[s]) candidates.push_back({s, indices});

    auto info_of = [&](std::size_t i, const Point& p) { return InfoSet{structure_.player(i).block_of(p.w), p.s}; };

    // Best-response action and aggregate contribution of player i declaring
    // posterior k at one information set.
    struct Term {
      State action;
      Rational value;
    };
    std::vector<std::map<std::pair<InfoSet, std::size_t>, Term>> memo(n);
    auto term = [&](std::size_t i, const InfoSet& info, std::size_t k) -> const Term& {
      auto key = std::make_pair(info, k);
      auto it = memo[i].find(key);
      if (it != memo[i].end()) return it->second;
      const auto& q = menus_[i][k];
      std::optional<State> best;
      Rational best_value;
      for (State a : q.support()) {
        Rational v = 0;
        for (const auto& p : points)
          if (p.w == a && info_of(i, p) == info) v += p.weight / q[a];
        if (!best || v > best_value) {
          best = a;
          best_value = v;
        }
      }
      Rational value = 0;
      for (const auto& p : points) {
        if (!(info_of(i, p) == info)) continue;
        if (q[p.w] == 0) {
          value -= 2 * p.weight;
        } else if (p.w == *best) {
          value -= p.weight / q[p.w];
        }
      }
      return memo[i].emplace(key, Term{*best, value}).first->second;
    };

    // Declared (signal, posterior) per (player, info set).
    std::vector<std::map<InfoSet, std::pair<std::size_t, std::size_t>>> assigned(n);
    Rational running = 0;

    std::function<void(std::size_t)> search = [&](std::size_t k) {
      if (k == points.size()) {
        if (out.best_feasible && running <= *out.best_feasible) return;
        out.best_feasible = running;
        TwoStageStrategy sigma(n);
        for (std::size_t i = 0; i < n; ++i)
          for (const auto& [info, decl] : assigned[i])
            sigma[i][info] = Declaration{decl.first, decl.second, term(i, info, decl.second).action};
        out.argmax = std::move(sigma);
        return;
      }
      const Point& p = points[k];
      for (const auto& [s, indices] : candidates) {
        std::vector<std::size_t> fresh;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
          auto info = info_of(i, p);
          auto it = assigned[i].find(info);
          if (it == assigned[i].end()) {
            fresh.push_back(i);
          } else {
            ok = it->second == std::make_pair(s, indices[i]);
          }
        }
        if (!ok) continue;
        Rational added = 0;
        for (std::size_t i : fresh) {
          auto info = info_of(i, p);
          assigned[i][info] = {s, indices[i]};
          added += term(i, info, indices[i]).value;
        }
        running += added;
        search(k + 1);
        running -= added;
        for (std::size_t i : fresh) assigned[i].erase(info_of(i, p));
      }
    };
    search(0);
    return out;
  }

 private:
  State witness_state(const StochasticSignaling& tau, std::size_t i, const InfoSet& info) const {
    for (State w : structure_.player(i).block(info.first))
      if (tau.prob(w, info.second) > 0) return w;
    throw DomainError("unreachable information set");
  }

  std::vector<const Declaration*> decls_at(const TwoStageStrategy& sigma, State w, std::size_t s) const {
    if (sigma.size() != structure_.player_count()) throw DomainError("strategy profile has the wrong player count");
    std::vector<const Declaration*> out;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
      auto it = sigma[i].find({structure_.player(i).block_of(w), s});
      if (it == sigma[i].end())
        throw DomainError("strategy of player " + structure_.players()[i].name + " is undefined at a reachable information set");
      const auto& d = it->second;
      if (d.posterior >= menus_[i].size()) throw DomainError("declared posterior index outside the menu");
      if (menus_[i][d.posterior][d.action] == 0) throw DomainError("second-stage action outside the declared support");
      out.push_back(&d);
    }
    return out;
  }

  Rational info_value(const StochasticSignaling& tau, const TwoStageStrategy& sigma, std::size_t i,
                      const InfoSet& info) const {
    Rational v = 0;
    for (State w : structure_.player(i).block(info.first)) {
      if (tau.prob(w, info.second) == 0) continue;
      v += structure_.prior()[w] * tau.prob(w, info.second) * point_payoffs(decls_at(sigma, w, info.second), w)[i];
    }
    return v;
  }

  // 2 + n |Omega| (1 + C), with C >= |u_i| for every continuation game G(p).
  Rational compute_bound() const {
    Rational r_max = 2;
    for (const auto& m : menus_)
      for (const auto& d : m)
        for (State w = 0; w < d.size(); ++w)
          if (d[w] > 0) r_max = std::max(r_max, Rational(1 / d[w]));
    Rational c = 3 * r_max;
    const long n = static_cast<long>(structure_.player_count());
    const long states = static_cast<long>(structure_.space()->size());
    return 2 + Rational(n * states) * (1 + c);
  }

  InformationStructure structure_;
  StochasticSignaling reference_;
  std::vector<std::vector<Distribution>> menus_;
  std::vector<std::set<std::vector<std::size_t>>> feasible_;  // per reference signal
  Rational bound_;
  Rational penalty_;
};

struct LogScoreChoice {
  std::size_t index = 0;
  bool unique = false;  // strictly better than every other candidate
};

// Maximizes sum_w q_w log p_w over candidates p. With q_w = n_w / D this is
// the comparison of prod_w p_w^(n_w), done exactly; a candidate missing mass
// on supp(q) scores -inf. Ties go to the earliest candidate.
inline LogScoreChoice log_score_argmax(const Distribution& q, const std::vector<Distribution>& candidates) {
  if (candidates.empty()) throw DomainError("log-score maximization over an empty candidate set");
  BigInt d = 1;
  for (State w = 0; w < q.size(); ++w)
    if (q[w] > 0) d = lcm_big(d, denominator(q[w]));
  auto score = [&](const Distribution& p) -> std::optional<Rational> {
    if (p.size() != q.size()) throw DomainError("candidate over a different state space");
    Rational prod = 1;
    for (State w = 0; w < q.size(); ++w) {
      if (q[w] == 0) continue;
      if (p[w] == 0) return std::nullopt;
      prod *= pow_rational(p[w], numerator(q[w]) * (d / denominator(q[w])));
    }
    return prod;
  };
  std::vector<std::optional<Rational>> scores;
  for (const auto& p : candidates) scores.push_back(score(p));
  auto better = [](const std::optional<Rational>& a, const std::optional<Rational>& b) {
    return a && (!b || *a > *b);
  };
  LogScoreChoice out;
  for (std::size_t k = 1; k < scores.size(); ++k)
    if (better(scores[k], scores[out.index])) out.index = k;
  out.unique = true;
  for (std::size_t k = 0; k < scores.size(); ++k)
    if (k != out.index && !better(scores[out.index], scores[k])) out.unique = false;
  return out;
}

// G'(tau2): each player reports a posterior from the menu of the reference
// signaling and earns log p_w at the realized state.
class KldGame {
 public:
  KldGame(InformationStructure structure, StochasticSignaling reference)
      : structure_(std::move(structure)), reference_(std::move(reference)) {
    require_compatible(structure_, reference_);
    auto atlas = posterior_atlas(structure_, reference_);
    for (std::size_t i = 0; i < structure_.player_count(); ++i) menus_.push_back(atlas.marginals(i));
  }

  const std::vector<Distribution>& menu(std::size_t i) const { return menus_.at(i); }

  using Choices = std::vector<std::map<InfoSet, std::size_t>>;  // menu index per information set

  std::vector<LogValue> expected_payoffs(const StochasticSignaling& tau, const Choices& choices) const {
    require_compatible(structure_, tau);
    std::vector<LogValue> out(structure_.player_count());
    for (std::size_t i = 0; i < out.size(); ++i)
      for (State w = 0; w < tau.state_count(); ++w)
        for (std::size_t s = 0; s < tau.signal_count(); ++s) {
          if (tau.prob(w, s) == 0) continue;
          auto it = choices.at(i).find({structure_.player(i).block_of(w), s});
          if (it == choices.at(i).end()) throw DomainError("report undefined at a reachable information set");
          out[i] += LogValue::weighted_log(structure_.prior()[w] * tau.prob(w, s), menus_[i].at(it->second)[w]);
        }
    return out;
  }

  // Each player reports the log-score maximizer against the true posterior.
  Choices best_responses(const StochasticSignaling& tau) const {
    Choices out(structure_.player_count());
    for (std::size_t i = 0; i < out.size(); ++i)
      for (const auto& info : reachable_info_sets(structure_, i, tau)) {
        State w = structure_.player(i).block(info.first).front();
        for (State v : structure_.player(i).block(info.first))
          if (tau.prob(v, info.second) > 0) {
            w = v;
            break;
          }
        out[i][info] = log_score_argmax(stoch_posterior(structure_, i, tau, w, info.second), menus_[i]).index;
      }
    return out;
  }

 private:
  InformationStructure structure_;
  StochasticSignaling reference_;
  std::vector<std::vector<Distribution>> menus_;
};

// Each subgame is played with probability 1/2. The two halves live in
// different number systems (rational and exact log), so they are kept apart.
struct CombinedPayoff {
  Rational two_stage_half;
  LogValue kld_half;
};

class CombinedGame {
 public:
  CombinedGame(const InformationStructure& structure, const StochasticSignaling& reference,
               std::optional<Rational> penalty = std::nullopt)
      : two_stage_(structure, reference, penalty), kld_(structure, reference) {}

  const TwoStageGame& two_stage() const { return two_stage_; }
  const KldGame& kld() const { return kld_; }

  std::vector<CombinedPayoff> expected_payoffs(const StochasticSignaling& tau, const TwoStageStrategy& first,
                                               const KldGame::Choices& second) const {
    auto a = two_stage_.expected_payoffs(tau, first);
    auto b = kld_.expected_payoffs(tau, second);
    std::vector<CombinedPayoff> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back({a[i] / 2, Rational(1, 2) * b[i]});
    return out;
  }

 private:
  TwoStageGame two_stage_;
  KldGame kld_;
};

}  // namespace oracles
