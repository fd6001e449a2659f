#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "oracles/rational.hpp"

namespace oracles {

using State = std::size_t;
using StateSet = std::vector<State>;  // sorted, duplicate free

class StateSpace {
 public:
  explicit StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.empty()) throw DomainError("state space must be nonempty");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (!index_.emplace(labels_[i], i).second)
        throw DomainError("duplicate state label '" + labels_[i] + "'");
    }
  }

  // States labelled w1..wn.
  static std::shared_ptr<const StateSpace> numbered(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 1; i <= n; ++i) labels.push_back("w" + std::to_string(i));
    return std::make_shared<const StateSpace>(std::move(labels));
  }

  std::size_t size() const { return labels_.size(); }
  const std::string& label(State s) const { return labels_.at(s); }
  const std::vector<std::string>& labels() const { return labels_; }

  State index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw DomainError("unknown state '" + label + "'");
    return it->second;
  }

  bool operator==(const StateSpace& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

using SpacePtr = std::shared_ptr<const StateSpace>;

inline bool same_space(const SpacePtr& a, const SpacePtr& b) { return a == b || (a && b && *a == *b); }

// Probability vector indexed by state. Masses are nonnegative and sum to exactly 1.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<Rational> mass) : mass_(std::move(mass)) { validate(); }

  static Distribution point_mass(std::size_t n, State s) {
    std::vector<Rational> m(n, Rational(0));
    m.at(s) = 1;
    return Distribution(std::move(m));
  }

  std::size_t size() const { return mass_.size(); }
  const Rational& operator[](State s) const { return mass_[s]; }
  const Rational& at(State s) const { return mass_.at(s); }
  const std::vector<Rational>& masses() const { return mass_; }

  StateSet support() const {
    StateSet out;
    for (State s = 0; s < mass_.size(); ++s)
      if (mass_[s] > 0) out.push_back(s);
    return out;
  }

  // "(2/5,3/5,0,0)" in state order.
  std::string str() const {
    std::string out = "(";
    for (std::size_t i = 0; i < mass_.size(); ++i) {
      if (i) out += ",";
      out += mass_[i].str();
    }
    return out + ")";
  }

  friend bool operator==(const Distribution& a, const Distribution& b) { return a.mass_ == b.mass_; }
  friend bool operator!=(const Distribution& a, const Distribution& b) { return !(a == b); }
  friend bool operator<(const Distribution& a, const Distribution& b) { return a.mass_ < b.mass_; }

 private:
  void validate() const {
    if (mass_.empty()) throw DomainError("distribution over empty space");
    Rational total = 0;
    for (const auto& m : mass_) {
      if (m < 0) throw DomainError("negative probability mass");
      total += m;
    }
    if (total != 1) throw DomainError("distribution masses sum to " + total.str() + ", not 1");
  }

  std::vector<Rational> mass_;
};

// Full-support common prior.
class Prior {
 public:
  Prior(SpacePtr space, std::vector<Rational> mass) : space_(std::move(space)), dist_(std::move(mass)) {
    if (dist_.size() != space_->size()) throw DomainError("prior length does not match state space");
    for (State s = 0; s < dist_.size(); ++s)
      if (dist_[s] <= 0) throw DomainError("prior must have full support; state '" + space_->label(s) + "' has mass " + dist_[s].str());
  }

  static Prior uniform(SpacePtr space) {
    std::vector<Rational> m(space->size(), Rational(1, static_cast<long>(space->size())));
    return Prior(std::move(space), std::move(m));
  }

  const SpacePtr& space() const { return space_; }
  const Rational& operator[](State s) const { return dist_[s]; }
  const Distribution& distribution() const { return dist_; }

  Rational mass(const StateSet& event) const {
    Rational total = 0;
    for (State s : event) total += dist_[s];
    return total;
  }

  Rational min_mass() const { return *std::min_element(dist_.masses().begin(), dist_.masses().end()); }

 private:
  SpacePtr space_;
  Distribution dist_;
};

// Bayes conditioning of the prior on a nonempty event.
inline Distribution conditional(const Prior& prior, const StateSet& event) {
  if (event.empty()) throw DomainError("conditioning on an empty event");
  Rational total = prior.mass(event);
  std::vector<Rational> m(prior.space()->size(), Rational(0));
  for (State s : event) m.at(s) = prior[s] / total;
  return Distribution(std::move(m));
}

// A disjoint cover of the state space by nonempty blocks. Block order is kept
// as given; canonical() sorts members and orders blocks by least member.
class Partition {
 public:
  Partition() = default;

  Partition(SpacePtr space, std::vector<StateSet> blocks) : space_(std::move(space)), blocks_(std::move(blocks)) {
    const std::size_t n = space_->size();
    constexpr std::size_t unassigned = static_cast<std::size_t>(-1);
    block_of_.assign(n, unassigned);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      auto& block = blocks_[b];
      if (block.empty()) throw DomainError("partition has an empty block");
      std::sort(block.begin(), block.end());
      for (State s : block) {
        if (s >= n) throw DomainError("partition refers to a state outside the space");
        if (block_of_[s] != unassigned) throw DomainError("state '" + space_->label(s) + "' appears in more than one block");
        block_of_[s] = b;
      }
    }
    for (State s = 0; s < n; ++s)
      if (block_of_[s] == unassigned) throw DomainError("state '" + space_->label(s) + "' is not covered by any block");
  }

  // Builds the partition whose blocks are the level sets of `label`.
  static Partition from_labels(SpacePtr space, const std::vector<std::size_t>& label) {
    if (label.size() != space->size()) throw DomainError("label vector length does not match state space");
    std::vector<StateSet> blocks;
    std::unordered_map<std::size_t, std::size_t> slot;
    for (State s = 0; s < label.size(); ++s) {
      auto [it, fresh] = slot.emplace(label[s], blocks.size());
      if (fresh) blocks.emplace_back();
      blocks[it->second].push_back(s);
    }
    return Partition(std::move(space), std::move(blocks));
  }

  static Partition trivial(SpacePtr space) {
    StateSet all(space->size());
    for (State s = 0; s < all.size(); ++s) all[s] = s;
    return Partition(std::move(space), {all});
  }

  static Partition discrete(SpacePtr space) {
    std::vector<StateSet> blocks;
    for (State s = 0; s < space->size(); ++s) blocks.push_back({s});
    return Partition(std::move(space), std::move(blocks));
  }

  const SpacePtr& space() const { return space_; }
  std::size_t state_count() const { return block_of_.size(); }
  std::size_t block_count() const { return blocks_.size(); }
  const std::vector<StateSet>& blocks() const { return blocks_; }
  const StateSet& block(std::size_t b) const { return blocks_.at(b); }
  std::size_t block_of(State s) const { return block_of_.at(s); }
  const StateSet& block_containing(State s) const { return blocks_[block_of_.at(s)]; }

  // Restricted-growth labelling: state 0 gets 0, each new block the next index.
  // Two partitions are equal iff their keys are equal.
  std::vector<std::size_t> key() const {
    std::vector<std::size_t> out(block_of_.size());
    std::vector<std::size_t> remap(blocks_.size(), static_cast<std::size_t>(-1));
    std::size_t next = 0;
    for (State s = 0; s < block_of_.size(); ++s) {
      auto& r = remap[block_of_[s]];
      if (r == static_cast<std::size_t>(-1)) r = next++;
      out[s] = r;
    }
    return out;
  }

  Partition canonical() const {
    auto order = blocks_;
    std::sort(order.begin(), order.end(), [](const StateSet& a, const StateSet& b) { return a.front() < b.front(); });
    return Partition(space_, std::move(order));
  }

  bool is_canonical() const {
    for (std::size_t b = 1; b < blocks_.size(); ++b)
      if (blocks_[b - 1].front() > blocks_[b].front()) return false;
    return true;
  }

  std::string str() const {
    std::string out = "{";
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      if (b) out += ",";
      out += "{";
      for (std::size_t k = 0; k < blocks_[b].size(); ++k) {
        if (k) out += ",";
        out += space_->label(blocks_[b][k]);
      }
      out += "}";
    }
    return out + "}";
  }

  friend bool operator==(const Partition& a, const Partition& b) {
    return a.state_count() == b.state_count() && a.key() == b.key();
  }
  friend bool operator!=(const Partition& a, const Partition& b) { return !(a == b); }

 private:
  SpacePtr space_;
  std::vector<StateSet> blocks_;
  std::vector<std::size_t> block_of_;
};

inline Partition canonicalize(const Partition& p) { return p.canonical(); }

struct NamedPartition {
  std::string name;
  Partition partition;
};

// Space, full-support prior, the players' private partitions and the oracles'
// partitions, all over one state space.
class InformationStructure {
 public:
  InformationStructure(Prior prior, std::vector<NamedPartition> players, std::vector<NamedPartition> oracles = {})
      : prior_(std::move(prior)), players_(std::move(players)), oracles_(std::move(oracles)) {
    if (players_.empty()) throw DomainError("information structure needs at least one player");
    auto check = [&](const NamedPartition& np) {
      if (np.partition.state_count() != space()->size() || !same_space(np.partition.space(), space()))
        throw DomainError("partition '" + np.name + "' is defined over a different state space");
    };
    std::set<std::string> names;
    for (const auto& p : players_) {
      check(p);
      if (!names.insert(p.name).second) throw DomainError("duplicate partition name '" + p.name + "'");
    }
    for (const auto& o : oracles_) {
      check(o);
      if (!names.insert(o.name).second) throw DomainError("duplicate partition name '" + o.name + "'");
    }
  }

  const SpacePtr& space() const { return prior_.space(); }
  const Prior& prior() const { return prior_; }
  std::size_t player_count() const { return players_.size(); }
  const std::vector<NamedPartition>& players() const { return players_; }
  const std::vector<NamedPartition>& oracles() const { return oracles_; }
  const Partition& player(std::size_t i) const { return players_.at(i).partition; }

  std::vector<Partition> player_partitions() const {
    std::vector<Partition> out;
    for (const auto& p : players_) out.push_back(p.partition);
    return out;
  }

  // Looks up a player or oracle partition by name.
  const Partition& partition(const std::string& name) const {
    for (const auto& o : oracles_)
      if (o.name == name) return o.partition;
    for (const auto& p : players_)
      if (p.name == name) return p.partition;
    throw DomainError("no partition named '" + name + "'");
  }

  std::optional<std::size_t> player_index(const std::string& name) const {
    for (std::size_t i = 0; i < players_.size(); ++i)
      if (players_[i].name == name) return i;
    return std::nullopt;
  }

  InformationStructure with_oracles(std::vector<NamedPartition> oracles) const {
    return InformationStructure(prior_, players_, std::move(oracles));
  }

 private:
  Prior prior_;
  std::vector<NamedPartition> players_;
  std::vector<NamedPartition> oracles_;
};

}  // namespace oracles
