#pragma once

// Test-side oracles. Everything here is written against plain std::set and
// naive loops so that it shares no code path with the library under test.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"

namespace brute {

using oracles::Rational;
using Block = std::set<int>;
using SetPartition = std::set<Block>;

inline SetPartition to_sets(const oracles::Partition& p) {
  SetPartition out;
  for (const auto& b : p.blocks()) out.insert(Block(b.begin(), b.end()));
  return out;
}

inline oracles::Partition from_sets(const oracles::SpacePtr& space, const SetPartition& p) {
  std::vector<oracles::StateSet> blocks;
  for (const auto& b : p) blocks.emplace_back(b.begin(), b.end());
  return oracles::Partition(space, blocks);
}

// Every set partition of {0..n-1}: insert element k into each existing block or a new one.
inline std::vector<SetPartition> all_set_partitions(int n) {
  std::vector<std::vector<Block>> acc{{}};
  for (int k = 0; k < n; ++k) {
    std::vector<std::vector<Block>> next;
    for (const auto& p : acc) {
      for (std::size_t b = 0; b < p.size(); ++b) {
        auto q = p;
        q[b].insert(k);
        next.push_back(q);
      }
      auto q = p;
      q.push_back({k});
      next.push_back(q);
    }
    acc = std::move(next);
  }
  std::vector<SetPartition> out;
  for (const auto& p : acc) out.emplace_back(p.begin(), p.end());
  return out;
}

inline SetPartition naive_join(const SetPartition& a, const SetPartition& b) {
  SetPartition out;
  for (const auto& x : a)
    for (const auto& y : b) {
      Block i;
      std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::inserter(i, i.begin()));
      if (!i.empty()) out.insert(i);
    }
  return out;
}

inline bool naive_refines(const SetPartition& a, const SetPartition& b) {
  for (const auto& x : a) {
    bool inside = false;
    for (const auto& y : b) inside = inside || std::includes(y.begin(), y.end(), x.begin(), x.end());
    if (!inside) return false;
  }
  return true;
}

// Finest partition that every input refines, found by exhaustive search.
inline SetPartition naive_meet(const std::vector<SetPartition>& parts, int n) {
  std::optional<SetPartition> best;
  for (const auto& c : all_set_partitions(n)) {
    bool common = true;
    for (const auto& p : parts) common = common && naive_refines(p, c);
    if (common && (!best || c.size() > best->size())) best = c;
  }
  return *best;
}

inline std::vector<SetPartition> naive_coarsenings(const SetPartition& p, int n) {
  std::vector<SetPartition> out;
  for (const auto& c : all_set_partitions(n))
    if (naive_refines(p, c)) out.push_back(c);
  return out;
}

// IMI straight from the definition, on set partitions.
inline bool naive_imi(const std::vector<SetPartition>& players, const SetPartition& f1, const SetPartition& f2, int n) {
  auto c1 = naive_coarsenings(f1, n);
  for (const auto& target : naive_coarsenings(f2, n)) {
    bool matched = false;
    for (const auto& cand : c1) {
      bool all = true;
      for (const auto& pi : players) all = all && naive_join(pi, cand) == naive_join(pi, target);
      if (all) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

// Bayes' rule on the event {player's block at w} with likelihood tau(s|.).
inline std::vector<Rational> naive_posterior(const std::vector<Rational>& prior, const SetPartition& info,
                                             const std::vector<std::vector<Rational>>& kernel, int w, std::size_t s) {
  Block mine;
  for (const auto& b : info)
    if (b.count(w)) mine = b;
  std::vector<Rational> out(prior.size(), Rational(0));
  Rational z = 0;
  for (int v : mine) z += prior[v] * kernel[v][s];
  for (int v : mine) out[v] = prior[v] * kernel[v][s] / z;
  return out;
}

// Exact solve of a square system; nullopt when singular.
inline std::optional<std::vector<Rational>> solve_square(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t n = a.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t r = 0; r < n; ++r) b[r] /= a[r][r];
  return b;
}

// Feasibility of {A x = b, x >= 0} by enumerating basic solutions: drop
// dependent rows, then try every column subset of size rank.
inline bool vertex_feasible(std::vector<std::vector<Rational>> a, std::vector<Rational> b) {
  const std::size_t cols = a.empty() ? 0 : a[0].size();
  // Row-reduce to find an independent row subset and detect inconsistency.
  std::vector<std::vector<Rational>> m = a;
  std::vector<Rational> rhs = b;
  std::vector<std::size_t> keep;
  std::size_t row = 0;
  std::vector<std::size_t> order(m.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t c = 0; c < cols && row < m.size(); ++c) {
    std::size_t piv = row;
    while (piv < m.size() && m[piv][c] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[row], m[piv]);
    std::swap(rhs[row], rhs[piv]);
    std::swap(order[row], order[piv]);
    for (std::size_t r = row + 1; r < m.size(); ++r) {
      if (m[r][c] == 0) continue;
      Rational f = m[r][c] / m[row][c];
      for (std::size_t k = c; k < cols; ++k) m[r][k] -= f * m[row][k];
      rhs[r] -= f * rhs[row];
    }
    ++row;
  }
  for (std::size_t r = row; r < m.size(); ++r)
    if (rhs[r] != 0) return false;
  std::vector<std::vector<Rational>> ra;
  std::vector<Rational> rb;
  for (std::size_t r = 0; r < row; ++r) {
    ra.push_back(m[r]);
    rb.push_back(rhs[r]);
  }
  const std::size_t rank = ra.size();
  if (rank == 0) return true;
  std::vector<bool> pick(cols, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(rank), true);
  do {
    std::vector<std::size_t> basis;
    for (std::size_t c = 0; c < cols; ++c)
      if (pick[c]) basis.push_back(c);
    std::vector<std::vector<Rational>> sq(rank, std::vector<Rational>(rank));
    for (std::size_t r = 0; r < rank; ++r)
      for (std::size_t k = 0; k < rank; ++k) sq[r][k] = ra[r][basis[k]];
    auto x = solve_square(sq, rb);
    if (x && std::all_of(x->begin(), x->end(), [](const Rational& v) { return v >= 0; })) return true;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return false;
}

// Garbling feasibility m1 G = m2 through vertex enumeration.
inline bool vertex_garbling(const std::vector<std::vector<Rational>>& m1, const std::vector<std::vector<Rational>>& m2) {
  const std::size_t k1 = m1[0].size(), k2 = m2[0].size();
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  for (std::size_t r = 0; r < m1.size(); ++r)
    for (std::size_t c = 0; c < k2; ++c) {
      std::vector<Rational> eq(k1 * k2, Rational(0));
      for (std::size_t k = 0; k < k1; ++k) eq[k * k2 + c] = m1[r][k];
      a.push_back(eq);
      b.push_back(m2[r][c]);
    }
  for (std::size_t k = 0; k < k1; ++k) {
    std::vector<Rational> eq(k1 * k2, Rational(0));
    for (std::size_t c = 0; c < k2; ++c) eq[k * k2 + c] = 1;
    a.push_back(eq);
    b.push_back(1);
  }
  return vertex_feasible(a, b);
}

// Pure strategies as explicit maps from (player block, signal) to an action,
// enumerated exhaustively. Payoffs are summed state by state and signal by signal.
struct PureStrategy {
  std::vector<std::map<std::pair<std::size_t, std::size_t>, std::size_t>> choice;
};

inline std::vector<std::pair<std::size_t, std::size_t>> info_sets(const oracles::BayesianGame& g,
                                                                  const oracles::StochasticSignaling& tau,
                                                                  std::size_t i) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t w = 0; w < tau.state_count(); ++w)
    for (std::size_t s = 0; s < tau.signal_count(); ++s)
      if (tau.prob(w, s) > 0) out.insert({g.structure().player(i).block_of(w), s});
  return {out.begin(), out.end()};
}

inline std::vector<Rational> pure_payoffs(const oracles::BayesianGame& g, const oracles::StochasticSignaling& tau,
                                          const PureStrategy& sigma) {
  const std::size_t n = g.player_count();
  std::vector<Rational> out(n, Rational(0));
  for (std::size_t w = 0; w < tau.state_count(); ++w)
    for (std::size_t s = 0; s < tau.signal_count(); ++s) {
      if (tau.prob(w, s) == 0) continue;
      std::size_t k = 0;
      for (std::size_t i = 0; i < n; ++i)
        k = k * g.action_count(i) + sigma.choice[i].at({g.structure().player(i).block_of(w), s});
      for (std::size_t i = 0; i < n; ++i) out[i] += g.structure().prior()[w] * tau.prob(w, s) * g.payoff(w, k, i);
    }
  return out;
}

// Visits every pure strategy of every player combined into a profile.
inline void for_each_pure_profile(const oracles::BayesianGame& g, const oracles::StochasticSignaling& tau,
                                  const std::function<void(const PureStrategy&)>& visit) {
  const std::size_t n = g.player_count();
  std::vector<std::pair<std::size_t, std::pair<std::size_t, std::size_t>>> slots;
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& info : info_sets(g, tau, i)) slots.push_back({i, info});
  PureStrategy sigma{std::vector<std::map<std::pair<std::size_t, std::size_t>, std::size_t>>(n)};
  std::function<void(std::size_t)> rec = [&](std::size_t k) {
    if (k == slots.size()) {
      visit(sigma);
      return;
    }
    for (std::size_t a = 0; a < g.action_count(slots[k].first); ++a) {
      sigma.choice[slots[k].first][slots[k].second] = a;
      rec(k + 1);
    }
  };
  rec(0);
}

// Whole-strategy unilateral deviations: every alternative pure strategy of each player.
inline bool pure_is_equilibrium(const oracles::BayesianGame& g, const oracles::StochasticSignaling& tau,
                                const PureStrategy& sigma) {
  auto base = pure_payoffs(g, tau, sigma);
  for (std::size_t i = 0; i < g.player_count(); ++i) {
    auto sets = info_sets(g, tau, i);
    bool improved = false;
    PureStrategy dev = sigma;
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      if (improved) return;
      if (k == sets.size()) {
        improved = pure_payoffs(g, tau, dev)[i] > base[i];
        return;
      }
      for (std::size_t a = 0; a < g.action_count(i); ++a) {
        dev.choice[i][sets[k]] = a;
        rec(k + 1);
      }
    };
    rec(0);
    if (improved) return false;
  }
  return true;
}

inline oracles::StrategyProfile to_profile(const oracles::BayesianGame& g, const PureStrategy& sigma) {
  oracles::StrategyProfile out;
  out.per_player.resize(g.player_count());
  for (std::size_t i = 0; i < g.player_count(); ++i)
    for (const auto& [info, a] : sigma.choice[i]) out.per_player[i][info] = oracles::pure_action(g.action_count(i), a);
  return out;
}

// Compares prod p_w^(n_w) for two candidates using cross-multiplied integers.
inline int compare_log_scores(const std::vector<Rational>& q, const std::vector<Rational>& a, const std::vector<Rational>& b) {
  oracles::BigInt d = 1;
  for (const auto& x : q)
    if (x > 0) d = boost::multiprecision::lcm(d, oracles::BigInt(boost::multiprecision::denominator(x)));
  oracles::BigInt na = 1, da = 1, nb = 1, db = 1;
  bool a_zero = false, b_zero = false;
  for (std::size_t w = 0; w < q.size(); ++w) {
    if (q[w] == 0) continue;
    auto e = oracles::BigInt(boost::multiprecision::numerator(q[w])) * (d / oracles::BigInt(boost::multiprecision::denominator(q[w])));
    unsigned ex = e.convert_to<unsigned>();
    a_zero = a_zero || a[w] == 0;
    b_zero = b_zero || b[w] == 0;
    na *= boost::multiprecision::pow(oracles::BigInt(boost::multiprecision::numerator(a[w])), ex);
    da *= boost::multiprecision::pow(oracles::BigInt(boost::multiprecision::denominator(a[w])), ex);
    nb *= boost::multiprecision::pow(oracles::BigInt(boost::multiprecision::numerator(b[w])), ex);
    db *= boost::multiprecision::pow(oracles::BigInt(boost::multiprecision::denominator(b[w])), ex);
  }
  if (a_zero || b_zero) return a_zero == b_zero ? 0 : (a_zero ? -1 : 1);
  auto lhs = na * db, rhs = nb * da;
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

// ---------- random instances ----------

inline oracles::Partition random_partition(const oracles::SpacePtr& space, std::mt19937& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, space->size() - 1);
  std::vector<std::size_t> label(space->size());
  for (auto& l : label) l = pick(rng);
  return oracles::Partition::from_labels(space, label);
}

// Positive integer weights normalized; zero with probability `zero_chance` per entry (never all zero).
inline std::vector<Rational> random_distribution(std::size_t n, std::mt19937& rng, double zero_chance = 0.0) {
  std::uniform_int_distribution<int> weight(1, 6);
  std::bernoulli_distribution zero(zero_chance);
  std::vector<Rational> w(n);
  Rational total = 0;
  do {
    total = 0;
    for (auto& x : w) {
      x = zero(rng) ? 0 : weight(rng);
      total += x;
    }
  } while (total == 0);
  for (auto& x : w) x /= total;
  return w;
}

inline oracles::StochasticSignaling random_signaling(const oracles::Partition& oracle, std::size_t signals,
                                                     std::mt19937& rng, double zero_chance = 0.3) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < signals; ++k) names.push_back("s" + std::to_string(k + 1));
  std::vector<std::vector<Rational>> rows;
  for (std::size_t b = 0; b < oracle.block_count(); ++b) rows.push_back(random_distribution(signals, rng, zero_chance));
  return oracles::StochasticSignaling::from_block_rows(oracle, names, rows);
}

inline std::vector<std::vector<Rational>> random_stochastic(std::size_t rows, std::size_t cols, std::mt19937& rng,
                                                           double zero_chance = 0.3) {
  std::vector<std::vector<Rational>> out;
  for (std::size_t r = 0; r < rows; ++r) out.push_back(random_distribution(cols, rng, zero_chance));
  return out;
}

inline oracles::InformationStructure uniform_structure(const oracles::SpacePtr& space,
                                                       const std::vector<oracles::Partition>& players,
                                                       std::vector<oracles::NamedPartition> oracles_ = {}) {
  std::vector<oracles::NamedPartition> named;
  for (std::size_t i = 0; i < players.size(); ++i) named.push_back({"P" + std::to_string(i + 1), players[i]});
  return oracles::InformationStructure(oracles::Prior::uniform(space), named, std::move(oracles_));
}

}  // namespace brute
