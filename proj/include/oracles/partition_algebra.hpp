#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "oracles/core.hpp"

namespace oracles {

inline void require_same_space(const Partition& p, const Partition& q) {
  if (p.state_count() != q.state_count() || !same_space(p.space(), q.space()))
    throw DomainError("partitions are defined over different state spaces");
}

// Coarsest common refinement.
inline Partition join(const Partition& p, const Partition& q) {
  require_same_space(p, q);
  std::vector<std::size_t> label(p.state_count());
  for (State s = 0; s < label.size(); ++s) label[s] = p.block_of(s) * q.block_count() + q.block_of(s);
  return Partition::from_labels(p.space(), label);
}

// True iff every block of p lies inside a block of q.
inline bool refines(const Partition& p, const Partition& q) {
  require_same_space(p, q);
  for (const auto& block : p.blocks()) {
    std::size_t target = q.block_of(block.front());
    for (State s : block)
      if (q.block_of(s) != target) return false;
  }
  return true;
}

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent_[a] = b;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

// Finest common coarsening. Its blocks are the common knowledge components:
// connected components of the graph linking states that share a block of
// some player.
inline Partition meet(const std::vector<Partition>& parts) {
  if (parts.empty()) throw DomainError("meet of an empty family of partitions");
  for (const auto& p : parts) require_same_space(parts.front(), p);
  detail::UnionFind uf(parts.front().state_count());
  for (const auto& p : parts)
    for (const auto& block : p.blocks())
      for (State s : block) uf.unite(block.front(), s);
  std::vector<std::size_t> label(parts.front().state_count());
  for (State s = 0; s < label.size(); ++s) label[s] = uf.find(s);
  return Partition::from_labels(parts.front().space(), label);
}

inline Partition ckc_decompose(const std::vector<Partition>& players) { return meet(players); }

inline bool has_unique_ckc(const std::vector<Partition>& players) { return meet(players).block_count() == 1; }

inline BigInt bell_number(std::size_t k) {
  // Bell triangle.
  std::vector<BigInt> row{1};
  for (std::size_t i = 1; i <= k; ++i) {
    std::vector<BigInt> next{row.back()};
    for (const auto& x : row) next.push_back(next.back() + x);
    row = std::move(next);
  }
  return row.front();
}

inline constexpr std::size_t kDefaultCoarseningCap = 10;

// Visits every set partition of {0..k-1} as a restricted-growth string in
// lexicographic order.
template <typename Visitor>
void for_each_restricted_growth_string(std::size_t k, Visitor&& visit) {
  if (k == 0) {
    visit(std::vector<std::size_t>{});
    return;
  }
  std::vector<std::size_t> rgs(k, 0), prefix_max(k, 0);
  while (true) {
    visit(static_cast<const std::vector<std::size_t>&>(rgs));
    std::size_t i = k - 1;
    while (i > 0 && rgs[i] > prefix_max[i - 1]) --i;
    if (i == 0) return;
    ++rgs[i];
    prefix_max[i] = std::max(prefix_max[i - 1], rgs[i]);
    for (std::size_t j = i + 1; j < k; ++j) {
      rgs[j] = 0;
      prefix_max[j] = prefix_max[i];
    }
  }
}

// Every partition obtained by merging blocks of p, in restricted-growth order
// over p's canonical blocks: the first element merges everything, the last is p.
inline std::vector<Partition> coarsenings(const Partition& p, std::size_t cap = kDefaultCoarseningCap) {
  const std::size_t k = p.block_count();
  if (k > cap) throw ResourceError("coarsening enumeration over " + std::to_string(k) + " blocks", cap);
  Partition canon = p.canonical();
  std::vector<Partition> out;
  out.reserve(bell_number(k).convert_to<std::size_t>());
  std::vector<std::size_t> label(p.state_count());
  for_each_restricted_growth_string(k, [&](const std::vector<std::size_t>& rgs) {
    for (std::size_t b = 0; b < k; ++b)
      for (State s : canon.block(b)) label[s] = rgs[b];
    out.push_back(Partition::from_labels(p.space(), label));
  });
  return out;
}

// Every partition of an n-state space, in restricted-growth order.
inline std::vector<Partition> all_partitions(const SpacePtr& space) {
  std::vector<Partition> out;
  for_each_restricted_growth_string(space->size(), [&](const std::vector<std::size_t>& rgs) {
    out.push_back(Partition::from_labels(space, rgs));
  });
  return out;
}

struct PathStep {
  State state;
  std::optional<std::size_t> via_player;  // player whose block links this state to the previous one
};

// Shortest chain a = x0, x1, ..., xk = b where consecutive states share a block
// of some player. Ties break toward smaller states, then smaller player index.
// Returns nullopt when a and b lie in different common knowledge components.
inline std::optional<std::vector<PathStep>> connect_path(const std::vector<Partition>& players, State a, State b) {
  if (players.empty()) throw DomainError("connect_path needs at least one partition");
  for (const auto& p : players) require_same_space(players.front(), p);
  const std::size_t n = players.front().state_count();
  if (a >= n || b >= n) throw DomainError("state outside the space");
  constexpr std::size_t none = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(n, none), via(n, none);
  std::vector<bool> seen(n, false);
  std::deque<State> queue{a};
  seen[a] = true;
  while (!queue.empty() && !seen[b]) {
    State u = queue.front();
    queue.pop_front();
    for (State v = 0; v < n; ++v) {
      if (seen[v]) continue;
      for (std::size_t i = 0; i < players.size(); ++i) {
        if (players[i].block_of(u) == players[i].block_of(v)) {
          seen[v] = true;
          parent[v] = u;
          via[v] = i;
          queue.push_back(v);
          break;
        }
      }
    }
  }
  if (!seen[b]) return std::nullopt;
  std::vector<PathStep> path;
  for (State x = b; x != a; x = parent[x]) path.push_back({x, via[x]});
  path.push_back({a, std::nullopt});
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace oracles
