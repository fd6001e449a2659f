#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oracles/partition_algebra.hpp"
#include "oracles/signaling.hpp"
#include "oracles/simplex.hpp"

namespace oracles {

struct ImiMatch {
  Partition target;   // coarsening F2' of the second oracle
  Partition matched;  // coarsening F1' of the first oracle with identical joins
};

struct ImiResult {
  bool holds = false;
  std::optional<Partition> counterexample;  // first F2' with no match
  std::vector<ImiMatch> matches;            // one entry per matched F2', in enumeration order
};

namespace detail {

inline std::vector<std::vector<std::size_t>> join_keys(const std::vector<Partition>& players, const Partition& oracle_view) {
  std::vector<std::vector<std::size_t>> keys;
  keys.reserve(players.size());
  for (const auto& p : players) keys.push_back(join(p, oracle_view).key());
  return keys;
}

}  // namespace detail

// For every coarsening F2' of f2, look for a coarsening F1' of f1 such that
// Pi_i v F1' = Pi_i v F2' for every player i.
inline ImiResult is_imi(const InformationStructure& structure, const Partition& f1, const Partition& f2,
                        std::size_t cap = kDefaultCoarseningCap) {
  const auto players = structure.player_partitions();
  require_same_space(players.front(), f1);
  require_same_space(players.front(), f2);
  std::map<std::vector<std::vector<std::size_t>>, std::size_t> reachable;
  const auto from_f1 = coarsenings(f1, cap);
  for (std::size_t k = 0; k < from_f1.size(); ++k) reachable.emplace(detail::join_keys(players, from_f1[k]), k);
  ImiResult out;
  out.holds = true;
  for (const auto& target : coarsenings(f2, cap)) {
    auto it = reachable.find(detail::join_keys(players, target));
    if (it == reachable.end()) {
      out.holds = false;
      out.counterexample = target;
      return out;
    }
    out.matches.push_back({target, from_f1[it->second]});
  }
  return out;
}

// Is there a coarsening F1' of f1 whose joins with every player partition
// equal those of the given target partition?
inline std::optional<Partition> imi_match(const InformationStructure& structure, const Partition& f1, const Partition& target,
                                          std::size_t cap = kDefaultCoarseningCap) {
  const auto players = structure.player_partitions();
  require_same_space(players.front(), f1);
  require_same_space(players.front(), target);
  const auto want = detail::join_keys(players, target);
  for (const auto& c : coarsenings(f1, cap))
    if (detail::join_keys(players, c) == want) return c;
  return std::nullopt;
}

// Deterministic-signaling dominance, decided through its IMI characterization.
inline bool det_dominates(const InformationStructure& structure, const Partition& f1, const Partition& f2,
                          std::size_t cap = kDefaultCoarseningCap) {
  return is_imi(structure, f1, f2, cap).holds;
}

inline void require_unique_ckc(const InformationStructure& structure, const char* what) {
  if (!has_unique_ckc(structure.player_partitions()))
    throw DomainError(std::string(what) +
                      " requires a single common knowledge component; restrict the structure with restrict_to_ckc first");
}

struct TwoSidedImi {
  bool forward = false;   // is_imi(F1, F2)
  bool backward = false;  // is_imi(F2, F1)
  bool equal = false;     // canonical F1 == canonical F2
  bool consistent() const { return (forward && backward) == equal; }
};

inline TwoSidedImi two_sided_imi_equal(const InformationStructure& structure, const Partition& f1, const Partition& f2,
                                       std::size_t cap = kDefaultCoarseningCap) {
  require_unique_ckc(structure, "two_sided_imi_equal");
  TwoSidedImi v;
  v.forward = is_imi(structure, f1, f2, cap).holds;
  v.backward = is_imi(structure, f2, f1, cap).holds;
  v.equal = f1 == f2;
  return v;
}

// Stochastic-signaling dominance on a single common knowledge component
// reduces to refinement of the oracle partitions.
inline bool unique_ckc_dominates(const InformationStructure& structure, const Partition& f1, const Partition& f2) {
  if (!has_unique_ckc(structure.player_partitions()))
    throw DomainError(
        "stochastic dominance with several common knowledge components is not decided by this library "
        "(information-loop analysis is out of scope)");
  return refines(f1, f2);
}

inline Partition restrict_partition(const Partition& p, const SpacePtr& sub_space, const StateSet& block) {
  std::vector<std::size_t> label(block.size());
  for (std::size_t k = 0; k < block.size(); ++k) label[k] = p.block_of(block[k]);
  return Partition::from_labels(sub_space, label);
}

inline InformationStructure restrict_to_ckc(const InformationStructure& structure, const StateSet& block) {
  Partition ckcs = ckc_decompose(structure.player_partitions());
  StateSet sorted = block;
  std::sort(sorted.begin(), sorted.end());
  bool found = false;
  for (const auto& b : ckcs.blocks()) found = found || b == sorted;
  if (!found) throw DomainError("event is not a common knowledge component of the structure");
  std::vector<std::string> labels;
  for (State s : sorted) labels.push_back(structure.space()->label(s));
  auto sub = std::make_shared<const StateSpace>(labels);
  Distribution cond = conditional(structure.prior(), sorted);
  std::vector<Rational> mass;
  for (State s : sorted) mass.push_back(cond[s]);
  std::vector<NamedPartition> players, oracles;
  for (const auto& p : structure.players()) players.push_back({p.name, restrict_partition(p.partition, sub, sorted)});
  for (const auto& o : structure.oracles()) oracles.push_back({o.name, restrict_partition(o.partition, sub, sorted)});
  return InformationStructure(Prior(sub, std::move(mass)), std::move(players), std::move(oracles));
}

struct GarblingResult {
  bool exists = false;
  std::vector<std::vector<Rational>> witness;  // row-stochastic G with m1 G = m2
};

// Exact feasibility of {G >= 0, G 1 = 1, m1 G = m2}.
inline GarblingResult garbling_exists(const ExperimentMatrix& m1, const ExperimentMatrix& m2) {
  m1.validate();
  m2.validate();
  if (m1.rows() != m2.rows()) throw DomainError("experiments have different numbers of rows");
  if (!m1.row_labels.empty() && !m2.row_labels.empty() && m1.row_labels != m2.row_labels)
    throw DomainError("experiments are indexed by different states");
  const std::size_t k1 = m1.columns(), k2 = m2.columns(), rows = m1.rows();
  const std::size_t vars = k1 * k2;
  std::vector<std::vector<Rational>> A;
  std::vector<Rational> b;
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < k2; ++c) {
      std::vector<Rational> eq(vars, Rational(0));
      for (std::size_t k = 0; k < k1; ++k) eq[k * k2 + c] = m1.entries[r][k];
      A.push_back(std::move(eq));
      b.push_back(m2.entries[r][c]);
    }
  for (std::size_t k = 0; k < k1; ++k) {
    std::vector<Rational> eq(vars, Rational(0));
    for (std::size_t c = 0; c < k2; ++c) eq[k * k2 + c] = 1;
    A.push_back(std::move(eq));
    b.push_back(1);
  }
  auto sol = solve_nonnegative(A, b);
  GarblingResult out;
  out.exists = sol.feasible;
  if (sol.feasible) {
    out.witness.assign(k1, std::vector<Rational>(k2, Rational(0)));
    for (std::size_t k = 0; k < k1; ++k)
      for (std::size_t c = 0; c < k2; ++c) out.witness[k][c] = sol.x[k * k2 + c];
  }
  return out;
}

// m1 * G as an experiment with m2-style columns.
inline ExperimentMatrix apply_garbling(const ExperimentMatrix& m, const std::vector<std::vector<Rational>>& g,
                                       std::vector<std::string> column_labels) {
  if (g.size() != m.columns()) throw DomainError("garbling rows do not match experiment columns");
  ExperimentMatrix out;
  out.row_labels = m.row_labels;
  out.column_labels = std::move(column_labels);
  out.entries.assign(m.rows(), std::vector<Rational>(out.column_labels.size(), Rational(0)));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t k = 0; k < m.columns(); ++k)
      for (std::size_t c = 0; c < out.column_labels.size(); ++c) out.entries[r][c] += m.entries[r][k] * g.at(k).at(c);
  out.validate();
  return out;
}

// F1 v Pi_i refines F2 v Pi_i for every player i.
inline bool common_objective_condition(const InformationStructure& structure, const Partition& f1, const Partition& f2) {
  for (const auto& p : structure.player_partitions())
    if (!refines(join(f1, p), join(f2, p))) return false;
  return true;
}

}  // namespace oracles
