#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "oracles/core.hpp"
#include "oracles/partition_algebra.hpp"

namespace oracles {

// An oracle-measurable kernel tau(s|w) over a finite signal alphabet.
// Signals with zero probability at every state are dropped on construction.
class StochasticSignaling {
 public:
  StochasticSignaling(Partition oracle, std::vector<std::string> signals, std::vector<std::vector<Rational>> kernel)
      : oracle_(std::move(oracle)) {
    const std::size_t n = oracle_.state_count();
    if (kernel.size() != n) throw DomainError("kernel must have one row per state");
    std::set<std::string> names(signals.begin(), signals.end());
    if (names.size() != signals.size()) throw DomainError("duplicate signal label");
    for (State w = 0; w < n; ++w) {
      if (kernel[w].size() != signals.size()) throw DomainError("kernel row width does not match the signal list");
      Rational total = 0;
      for (const auto& x : kernel[w]) {
        if (x < 0) throw DomainError("negative signal probability at state '" + oracle_.space()->label(w) + "'");
        total += x;
      }
      if (total != 1) throw DomainError("kernel row for state '" + oracle_.space()->label(w) + "' sums to " + total.str());
    }
    for (const auto& block : oracle_.blocks())
      for (State w : block)
        if (kernel[w] != kernel[block.front()])
          throw DomainError("kernel is not measurable: states '" + oracle_.space()->label(block.front()) + "' and '" +
                            oracle_.space()->label(w) + "' share an oracle block but differ");
    for (std::size_t k = 0; k < signals.size(); ++k) {
      bool used = false;
      for (State w = 0; w < n && !used; ++w) used = kernel[w][k] > 0;
      if (!used) continue;
      signals_.push_back(signals[k]);
    }
    kernel_.assign(n, {});
    for (State w = 0; w < n; ++w)
      for (std::size_t k = 0; k < signals.size(); ++k) {
        bool used = false;
        for (State v = 0; v < n && !used; ++v) used = kernel[v][k] > 0;
        if (used) kernel_[w].push_back(kernel[w][k]);
      }
  }

  // One row per block of `oracle` in the block order of `oracle`.
  static StochasticSignaling from_block_rows(const Partition& oracle, std::vector<std::string> signals,
                                             const std::vector<std::vector<Rational>>& block_rows) {
    if (block_rows.size() != oracle.block_count()) throw DomainError("need one kernel row per oracle block");
    std::vector<std::vector<Rational>> kernel(oracle.state_count());
    for (State w = 0; w < kernel.size(); ++w) kernel[w] = block_rows[oracle.block_of(w)];
    return StochasticSignaling(oracle, std::move(signals), std::move(kernel));
  }

  const Partition& oracle() const { return oracle_; }
  const SpacePtr& space() const { return oracle_.space(); }
  std::size_t state_count() const { return kernel_.size(); }
  std::size_t signal_count() const { return signals_.size(); }
  const std::vector<std::string>& signals() const { return signals_; }
  const std::string& signal(std::size_t k) const { return signals_.at(k); }
  const Rational& prob(State w, std::size_t k) const { return kernel_.at(w).at(k); }
  const std::vector<std::vector<Rational>>& kernel() const { return kernel_; }

  std::size_t signal_index(const std::string& label) const {
    for (std::size_t k = 0; k < signals_.size(); ++k)
      if (signals_[k] == label) return k;
    throw DomainError("unknown signal '" + label + "'");
  }

  std::vector<Rational> column(std::size_t k) const {
    std::vector<Rational> out;
    for (const auto& row : kernel_) out.push_back(row.at(k));
    return out;
  }

  bool fully_supported() const {
    for (const auto& row : kernel_)
      for (const auto& x : row)
        if (x == 0) return false;
    return true;
  }

  // Whether the kernel is constant on every block of `p`.
  bool measurable_wrt(const Partition& p) const {
    require_same_space(oracle_, p);
    for (const auto& block : p.blocks())
      for (State w : block)
        if (kernel_[w] != kernel_[block.front()]) return false;
    return true;
  }

  // The same kernel viewed as a strategy of another oracle.
  StochasticSignaling reassigned_to(const Partition& other_oracle) const {
    return StochasticSignaling(other_oracle, signals_, kernel_);
  }

 private:
  Partition oracle_;
  std::vector<std::string> signals_;
  std::vector<std::vector<Rational>> kernel_;  // [state][signal]
};

// Assigns one signal to every block of the (canonicalized) oracle partition.
class DeterministicSignaling {
 public:
  DeterministicSignaling(const Partition& oracle, std::vector<std::string> assignment)
      : oracle_(oracle.canonical()), assignment_(std::move(assignment)) {
    if (assignment_.size() != oracle_.block_count())
      throw DomainError("deterministic signaling must assign a signal to each of the " +
                        std::to_string(oracle_.block_count()) + " oracle blocks");
  }

  // Announces which block of `coarsening` contains the state.
  static DeterministicSignaling revealing(const Partition& oracle, const Partition& coarsening) {
    if (!refines(oracle, coarsening)) throw DomainError("revealed partition is not a coarsening of the oracle partition");
    Partition canon = oracle.canonical();
    Partition target = coarsening.canonical();
    std::vector<std::string> assignment;
    for (const auto& block : canon.blocks()) assignment.push_back("s" + std::to_string(target.block_of(block.front()) + 1));
    return DeterministicSignaling(canon, std::move(assignment));
  }

  static DeterministicSignaling full_reveal(const Partition& oracle) { return revealing(oracle, oracle); }
  static DeterministicSignaling silent(const Partition& oracle) {
    return revealing(oracle, Partition::trivial(oracle.space()));
  }

  const Partition& oracle() const { return oracle_; }
  const std::vector<std::string>& assignment() const { return assignment_; }
  const std::string& signal_at(State w) const { return assignment_.at(oracle_.block_of(w)); }

  // Preimages of the signals: a coarsening of the oracle partition.
  Partition induced_partition() const {
    std::map<std::string, std::size_t> ids;
    std::vector<std::size_t> label(oracle_.state_count());
    for (State w = 0; w < label.size(); ++w) {
      auto [it, fresh] = ids.emplace(signal_at(w), ids.size());
      label[w] = it->second;
    }
    return Partition::from_labels(oracle_.space(), label).canonical();
  }

  StochasticSignaling to_stochastic() const {
    std::vector<std::string> signals;
    for (const auto& s : assignment_)
      if (std::find(signals.begin(), signals.end(), s) == signals.end()) signals.push_back(s);
    std::vector<std::vector<Rational>> kernel(oracle_.state_count(), std::vector<Rational>(signals.size(), Rational(0)));
    for (State w = 0; w < kernel.size(); ++w) {
      auto pos = std::find(signals.begin(), signals.end(), signal_at(w)) - signals.begin();
      kernel[w][static_cast<std::size_t>(pos)] = 1;
    }
    return StochasticSignaling(oracle_, std::move(signals), std::move(kernel));
  }

 private:
  Partition oracle_;
  std::vector<std::string> assignment_;
};

// One posterior per player.
struct JointPosteriorProfile {
  std::vector<Distribution> per_player;

  std::string str() const {
    std::string out = "(";
    for (std::size_t i = 0; i < per_player.size(); ++i) {
      if (i) out += ",";
      out += per_player[i].str();
    }
    return out + ")";
  }
  friend bool operator==(const JointPosteriorProfile& a, const JointPosteriorProfile& b) {
    return a.per_player == b.per_player;
  }
  friend bool operator<(const JointPosteriorProfile& a, const JointPosteriorProfile& b) {
    return a.per_player < b.per_player;
  }
};

// mu_tau: distribution over joint posterior profiles. Its key set is Post(tau).
struct PosteriorAtlas {
  std::map<JointPosteriorProfile, Rational> entries;

  bool contains(const JointPosteriorProfile& p) const { return entries.count(p) > 0; }
  std::size_t size() const { return entries.size(); }

  // Post^i(tau): the distinct posteriors of player i.
  std::vector<Distribution> marginals(std::size_t player) const {
    std::set<Distribution> out;
    for (const auto& [profile, weight] : entries) out.insert(profile.per_player.at(player));
    return {out.begin(), out.end()};
  }

  Rational total_weight() const {
    Rational t = 0;
    for (const auto& [profile, weight] : entries) t += weight;
    return t;
  }
};

inline void require_compatible(const InformationStructure& structure, const StochasticSignaling& tau) {
  if (tau.state_count() != structure.space()->size() || !same_space(tau.space(), structure.space()))
    throw DomainError("signaling function is defined over a different state space");
}

// mu(. | [Pi_i v tau](w))
inline Distribution det_posterior(const InformationStructure& structure, std::size_t player,
                                  const DeterministicSignaling& tau, State w) {
  Partition info = join(structure.player(player), tau.induced_partition());
  return conditional(structure.prior(), info.block_containing(w));
}

// mu(. | Pi_i(w), tau, s): mass proportional to mu(w') tau(s|w') on Pi_i(w).
inline Distribution stoch_posterior(const InformationStructure& structure, std::size_t player,
                                    const StochasticSignaling& tau, State w, std::size_t signal) {
  require_compatible(structure, tau);
  if (tau.prob(w, signal) == 0)
    throw DomainError("signal impossible at state: '" + tau.signal(signal) + "' has probability 0 at '" +
                      structure.space()->label(w) + "'");
  const auto& block = structure.player(player).block_containing(w);
  std::vector<Rational> mass(structure.space()->size(), Rational(0));
  Rational total = 0;
  for (State v : block) {
    mass[v] = structure.prior()[v] * tau.prob(v, signal);
    total += mass[v];
  }
  for (State v : block) mass[v] /= total;
  return Distribution(std::move(mass));
}

inline JointPosteriorProfile joint_posterior(const InformationStructure& structure, const StochasticSignaling& tau,
                                             State w, std::size_t signal) {
  JointPosteriorProfile out;
  for (std::size_t i = 0; i < structure.player_count(); ++i)
    out.per_player.push_back(stoch_posterior(structure, i, tau, w, signal));
  return out;
}

// Enumerates every (w, s) with tau(s|w) > 0, merging equal joint profiles.
inline PosteriorAtlas posterior_atlas(const InformationStructure& structure, const StochasticSignaling& tau) {
  require_compatible(structure, tau);
  PosteriorAtlas atlas;
  for (State w = 0; w < tau.state_count(); ++w)
    for (std::size_t k = 0; k < tau.signal_count(); ++k) {
      if (tau.prob(w, k) == 0) continue;
      atlas.entries[joint_posterior(structure, tau, w, k)] += structure.prior()[w] * tau.prob(w, k);
    }
  return atlas;
}

// The joint profiles reachable with one particular signal (mu_{tau,s}).
inline std::set<JointPosteriorProfile> profiles_for_signal(const InformationStructure& structure,
                                                           const StochasticSignaling& tau, std::size_t signal) {
  std::set<JointPosteriorProfile> out;
  for (State w = 0; w < tau.state_count(); ++w)
    if (tau.prob(w, signal) > 0) out.insert(joint_posterior(structure, tau, w, signal));
  return out;
}

inline bool post_included(const PosteriorAtlas& a, const PosteriorAtlas& b) {
  for (const auto& [profile, weight] : a.entries)
    if (!b.contains(profile)) return false;
  return true;
}

inline bool post_equal(const PosteriorAtlas& a, const PosteriorAtlas& b) {
  return post_included(a, b) && post_included(b, a);
}

inline bool atlas_equal(const PosteriorAtlas& a, const PosteriorAtlas& b) { return a.entries == b.entries; }

// Row-stochastic matrix with labelled rows and columns.
struct ExperimentMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<std::vector<Rational>> entries;

  std::size_t rows() const { return entries.size(); }
  std::size_t columns() const { return column_labels.size(); }

  void validate() const {
    if (row_labels.size() != entries.size()) throw DomainError("experiment matrix row labels do not match rows");
    for (std::size_t r = 0; r < entries.size(); ++r) {
      if (entries[r].size() != column_labels.size()) throw DomainError("experiment matrix row has wrong width");
      Rational total = 0;
      for (const auto& x : entries[r]) {
        if (x < 0) throw DomainError("experiment matrix has a negative entry");
        total += x;
      }
      if (total != 1) throw DomainError("experiment matrix row '" + row_labels[r] + "' sums to " + total.str());
    }
  }
};

// M(tau, Pi): entry at (w, (s, B)) = tau(s|w) * [w in B]. Columns run
// signal-major: (s1,B0), (s1,B1), ..., (s2,B0), ...
inline ExperimentMatrix experiment_matrix(const StochasticSignaling& tau, const Partition& decision_maker,
                                          const Prior& prior) {
  require_same_space(tau.oracle(), decision_maker);
  if (!same_space(prior.space(), tau.space())) throw DomainError("prior over a different state space");
  Partition canon = decision_maker.canonical();
  ExperimentMatrix m;
  m.row_labels = tau.space()->labels();
  for (std::size_t k = 0; k < tau.signal_count(); ++k)
    for (std::size_t b = 0; b < canon.block_count(); ++b) m.column_labels.push_back(tau.signal(k) + "|B" + std::to_string(b));
  m.entries.assign(tau.state_count(), std::vector<Rational>(m.column_labels.size(), Rational(0)));
  for (State w = 0; w < tau.state_count(); ++w)
    for (std::size_t k = 0; k < tau.signal_count(); ++k)
      m.entries[w][k * canon.block_count() + canon.block_of(w)] = tau.prob(w, k);
  m.validate();
  return m;
}

// Row-stochastic matrix from one signal alphabet to another.
struct GarblingMatrix {
  std::vector<std::string> targets;
  std::vector<std::vector<Rational>> rows;  // rows[s][t]

  void validate(std::size_t expected_rows) const {
    if (rows.size() != expected_rows) throw DomainError("garbling must have one row per source signal");
    for (const auto& row : rows) {
      if (row.size() != targets.size()) throw DomainError("garbling row has wrong width");
      Rational total = 0;
      for (const auto& x : row) {
        if (x < 0) throw DomainError("garbling matrix is not stochastic: negative entry");
        total += x;
      }
      if (total != 1) throw DomainError("garbling matrix is not stochastic: row sums to " + total.str());
    }
  }
};

// tau-bar((s,t)|w) = m_st * tau(s|w), signals labelled "s:t".
inline StochasticSignaling lift_garbled(const StochasticSignaling& tau, const GarblingMatrix& m) {
  m.validate(tau.signal_count());
  std::vector<std::string> signals;
  for (std::size_t s = 0; s < tau.signal_count(); ++s)
    for (const auto& t : m.targets) signals.push_back(tau.signal(s) + ":" + t);
  std::vector<std::vector<Rational>> kernel(tau.state_count());
  for (State w = 0; w < tau.state_count(); ++w)
    for (std::size_t s = 0; s < tau.signal_count(); ++s)
      for (std::size_t t = 0; t < m.targets.size(); ++t) kernel[w].push_back(m.rows[s][t] * tau.prob(w, s));
  return StochasticSignaling(tau.oracle(), std::move(signals), std::move(kernel));
}

// The garbled experiment tau*M over the target alphabet.
inline StochasticSignaling garble(const StochasticSignaling& tau, const GarblingMatrix& m) {
  m.validate(tau.signal_count());
  std::vector<std::vector<Rational>> kernel(tau.state_count(), std::vector<Rational>(m.targets.size(), Rational(0)));
  for (State w = 0; w < tau.state_count(); ++w)
    for (std::size_t s = 0; s < tau.signal_count(); ++s)
      for (std::size_t t = 0; t < m.targets.size(); ++t) kernel[w][t] += tau.prob(w, s) * m.rows[s][t];
  return StochasticSignaling(tau.oracle(), m.targets, std::move(kernel));
}

// All ratios x/y of distinct x, y in {p_j, 1 - p_j} are pairwise different,
// and the 2m values themselves are distinct and interior.
inline bool ratios_pairwise_distinct(const std::vector<Rational>& ps) {
  std::vector<Rational> values;
  for (const auto& p : ps) {
    if (p <= 0 || p >= 1) return false;
    values.push_back(p);
    values.push_back(1 - p);
  }
  std::set<Rational> distinct(values.begin(), values.end());
  if (distinct.size() != values.size()) return false;
  std::set<Rational> ratios;
  for (std::size_t a = 0; a < values.size(); ++a)
    for (std::size_t b = 0; b < values.size(); ++b)
      if (a != b && !ratios.insert(values[a] / values[b]).second) return false;
  return true;
}

// Block probabilities for the two-signal separating kernel. Candidates are
// 1/q for q running over the odd primes; each is accepted greedily when the
// extended vector still passes ratios_pairwise_distinct.
inline std::vector<Rational> separating_probabilities(std::size_t m) {
  std::vector<Rational> chosen;
  auto is_prime = [](long q) {
    for (long d = 2; d * d <= q; ++d)
      if (q % d == 0) return false;
    return q >= 2;
  };
  for (long q = 3; chosen.size() < m; q += 2) {
    if (!is_prime(q)) continue;
    chosen.push_back(Rational(1, q));
    if (!ratios_pairwise_distinct(chosen)) chosen.pop_back();
  }
  return chosen;
}

// tau(s1|A_j) = 1 - tau(s2|A_j) = p_j over the canonical blocks A_j of `oracle`.
inline StochasticSignaling separating_strategy(const Partition& oracle, const Prior& prior) {
  if (!same_space(prior.space(), oracle.space())) throw DomainError("prior over a different state space");
  Partition canon = oracle.canonical();
  auto ps = separating_probabilities(canon.block_count());
  std::vector<std::vector<Rational>> rows;
  for (const auto& p : ps) rows.push_back({p, 1 - p});
  return StochasticSignaling::from_block_rows(canon, {"s1", "s2"}, rows);
}

struct ProportionalMatch {
  std::size_t signal;  // index into the second signaling's alphabet
  Rational constant;
};

// For each signal t of tau1: the first signal s of tau2 (in alphabet order)
// with tau1(t|w) = c * tau2(s|w) for all w and some c > 0.
struct ProportionalDecomposition {
  std::vector<std::optional<ProportionalMatch>> per_signal;

  bool complete() const {
    for (const auto& m : per_signal)
      if (!m) return false;
    return true;
  }
};

inline ProportionalDecomposition proportional_decompose(const StochasticSignaling& tau1,
                                                        const StochasticSignaling& tau2) {
  require_same_space(tau1.oracle(), tau2.oracle());
  ProportionalDecomposition out;
  const std::size_t n = tau1.state_count();
  for (std::size_t t = 0; t < tau1.signal_count(); ++t) {
    std::optional<ProportionalMatch> found;
    for (std::size_t s = 0; s < tau2.signal_count() && !found; ++s) {
      std::optional<Rational> c;
      bool ok = true;
      for (State w = 0; w < n && ok; ++w) {
        const auto& a = tau1.prob(w, t);
        const auto& b = tau2.prob(w, s);
        if (b == 0) {
          ok = a == 0;
        } else if (!c) {
          c = a / b;
          ok = *c > 0;
        } else {
          ok = a == *c * b;
        }
      }
      if (ok && c) found = ProportionalMatch{s, *c};
    }
    out.per_signal.push_back(found);
  }
  return out;
}

}  // namespace oracles
