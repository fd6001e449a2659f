#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "oracles/core.hpp"
#include "oracles/games.hpp"
#include "oracles/signaling.hpp"

namespace oracles::io {

using Json = nlohmann::ordered_json;

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open file");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline const Json& field(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(path + ": missing field '" + key + "'");
  return j.at(key);
}

inline std::string as_string(const Json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path + ": expected a string");
  return j.get<std::string>();
}

inline Rational as_rational(const Json& j, const std::string& path) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
  throw ParseError(path + ": expected a rational as \"p/q\" or an integer");
}

inline Json to_json(const Rational& r) { return r.str(); }

inline Partition parse_partition(const SpacePtr& space, const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": partition must be an array of blocks");
  std::vector<StateSet> blocks;
  for (std::size_t b = 0; b < j.size(); ++b) {
    const std::string bp = path + "[" + std::to_string(b) + "]";
    if (!j[b].is_array()) throw ParseError(bp + ": block must be an array of state labels");
    StateSet block;
    for (std::size_t k = 0; k < j[b].size(); ++k) {
      try {
        block.push_back(space->index_of(as_string(j[b][k], bp + "[" + std::to_string(k) + "]")));
      } catch (const DomainError& e) {
        throw ParseError(bp + ": " + e.what());
      }
    }
    blocks.push_back(std::move(block));
  }
  try {
    return Partition(space, std::move(blocks));
  } catch (const DomainError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Json to_json(const Partition& p) {
  Json out = Json::array();
  for (const auto& block : p.blocks()) {
    Json b = Json::array();
    for (State s : block) b.push_back(p.space()->label(s));
    out.push_back(b);
  }
  return out;
}

inline StateSet parse_event(const SpacePtr& space, const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of state labels");
  StateSet out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    try {
      out.push_back(space->index_of(as_string(j[k], path + "[" + std::to_string(k) + "]")));
    } catch (const DomainError& e) {
      throw ParseError(path + ": " + e.what());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline InformationStructure parse_structure(const Json& j, const std::string& path = "$") {
  const auto& states = field(j, "states", path);
  if (!states.is_array() || states.empty()) throw ParseError(path + ".states: expected a nonempty array");
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < states.size(); ++k) labels.push_back(as_string(states[k], path + ".states[" + std::to_string(k) + "]"));
  SpacePtr space;
  try {
    space = std::make_shared<const StateSpace>(labels);
  } catch (const DomainError& e) {
    throw ParseError(path + ".states: " + e.what());
  }
  std::optional<Prior> prior;
  try {
    if (j.contains("prior")) {
      const auto& pj = j.at("prior");
      if (!pj.is_array()) throw ParseError(path + ".prior: expected an array");
      std::vector<Rational> mass;
      for (std::size_t k = 0; k < pj.size(); ++k) mass.push_back(as_rational(pj[k], path + ".prior[" + std::to_string(k) + "]"));
      prior.emplace(space, std::move(mass));
    } else {
      prior.emplace(Prior::uniform(space));
    }
  } catch (const DomainError& e) {
    throw ParseError(path + ".prior: " + e.what());
  }
  auto named = [&](const char* key) {
    std::vector<NamedPartition> out;
    if (!j.contains(key)) return out;
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw ParseError(path + "." + key + ": expected an array");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string ep = path + "." + key + "[" + std::to_string(k) + "]";
      out.push_back({as_string(field(arr[k], "name", ep), ep + ".name"),
                     parse_partition(space, field(arr[k], "partition", ep), ep + ".partition")});
    }
    return out;
  };
  try {
    return InformationStructure(*prior, named("players"), named("oracles"));
  } catch (const DomainError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Json to_json(const InformationStructure& s) {
  Json out;
  out["states"] = s.space()->labels();
  Json prior = Json::array();
  for (State w = 0; w < s.space()->size(); ++w) prior.push_back(s.prior()[w].str());
  out["prior"] = prior;
  auto named = [](const std::vector<NamedPartition>& v) {
    Json arr = Json::array();
    for (const auto& np : v) arr.push_back({{"name", np.name}, {"partition", to_json(np.partition)}});
    return arr;
  };
  out["players"] = named(s.players());
  out["oracles"] = named(s.oracles());
  return out;
}

inline std::vector<std::vector<Rational>> parse_matrix(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of rows");
  std::vector<std::vector<Rational>> rows;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) throw ParseError(rp + ": expected an array");
    std::vector<Rational> row;
    for (std::size_t c = 0; c < j[r].size(); ++c) row.push_back(as_rational(j[r][c], rp + "[" + std::to_string(c) + "]"));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::string> parse_labels(const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of labels");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < j.size(); ++k) out.push_back(as_string(j[k], path + "[" + std::to_string(k) + "]"));
  return out;
}

// A signaling function as read from JSON. Deterministic inputs keep their
// block assignment next to the equivalent 0/1 kernel.
struct ParsedSignaling {
  std::optional<DeterministicSignaling> deterministic;
  StochasticSignaling stochastic;
};

// Accepted "type" values:
//   stochastic     {"oracle", "signals", "kernel": {state: {signal: p}}}
//   deterministic  {"oracle", "assignment": {"block0": signal, ...}} over canonical oracle blocks
//   reveal         {"oracle", "partition": [[...]]} announces the block of a coarsening
//   separating     {"oracle"} the two-signal separating kernel over the oracle's blocks
inline ParsedSignaling parse_signaling(const InformationStructure& structure, const Json& j, const std::string& path = "$") {
  const std::string oracle_name = as_string(field(j, "oracle", path), path + ".oracle");
  Partition oracle;
  try {
    oracle = structure.partition(oracle_name);
  } catch (const DomainError& e) {
    throw ParseError(path + ".oracle: " + e.what());
  }
  const std::string type = j.contains("type") ? as_string(j.at("type"), path + ".type") : "stochastic";
  const auto& space = structure.space();
  try {
    if (type == "stochastic") {
      auto signals = parse_labels(field(j, "signals", path), path + ".signals");
      const auto& kj = field(j, "kernel", path);
      std::vector<std::vector<Rational>> kernel(space->size(), std::vector<Rational>(signals.size(), Rational(0)));
      for (State w = 0; w < space->size(); ++w) {
        const std::string rp = path + ".kernel." + space->label(w);
        const auto& row = field(kj, space->label(w), path + ".kernel");
        for (auto it = row.begin(); it != row.end(); ++it) {
          auto pos = std::find(signals.begin(), signals.end(), it.key());
          if (pos == signals.end()) throw ParseError(rp + ": unknown signal '" + it.key() + "'");
          kernel[w][static_cast<std::size_t>(pos - signals.begin())] = as_rational(it.value(), rp + "." + it.key());
        }
      }
      return {std::nullopt, StochasticSignaling(oracle, signals, kernel)};
    }
    if (type == "deterministic") {
      Partition canon = oracle.canonical();
      const auto& aj = field(j, "assignment", path);
      std::vector<std::string> assignment;
      for (std::size_t b = 0; b < canon.block_count(); ++b)
        assignment.push_back(as_string(field(aj, "block" + std::to_string(b), path + ".assignment"),
                                       path + ".assignment.block" + std::to_string(b)));
      DeterministicSignaling det(canon, assignment);
      return {det, det.to_stochastic()};
    }
    if (type == "reveal") {
      auto det = DeterministicSignaling::revealing(oracle, parse_partition(space, field(j, "partition", path), path + ".partition"));
      return {det, det.to_stochastic()};
    }
    if (type == "separating") return {std::nullopt, separating_strategy(oracle, structure.prior())};
  } catch (const DomainError& e) {
    throw ParseError(path + ": " + e.what());
  }
  throw ParseError(path + ".type: unknown signaling type '" + type + "'");
}

inline Json to_json(const StochasticSignaling& tau) {
  Json out;
  out["type"] = "stochastic";
  out["signals"] = tau.signals();
  Json kernel = Json::object();
  for (State w = 0; w < tau.state_count(); ++w) {
    Json row = Json::object();
    for (std::size_t s = 0; s < tau.signal_count(); ++s) row[tau.signal(s)] = tau.prob(w, s).str();
    kernel[tau.space()->label(w)] = row;
  }
  out["kernel"] = kernel;
  return out;
}

inline Json to_json(const JointPosteriorProfile& p) {
  Json out = Json::array();
  for (const auto& d : p.per_player) out.push_back(d.str());
  return out;
}

inline Json to_json(const PosteriorAtlas& atlas) {
  Json out = Json::array();
  for (const auto& [profile, weight] : atlas.entries) out.push_back({{"profile", to_json(profile)}, {"weight", weight.str()}});
  return out;
}

inline Distribution parse_distribution(std::size_t states, const Json& j, const std::string& path) {
  std::vector<Rational> mass;
  if (j.is_string()) {
    // "(a,b,...)" form as printed by Distribution::str.
    std::string s = j.get<std::string>();
    if (s.size() < 2 || s.front() != '(' || s.back() != ')') throw ParseError(path + ": expected \"(p1,...,pn)\"");
    std::stringstream ss(s.substr(1, s.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        mass.push_back(parse_rational(item));
      } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
      }
    }
  } else if (j.is_array()) {
    for (std::size_t k = 0; k < j.size(); ++k) mass.push_back(as_rational(j[k], path + "[" + std::to_string(k) + "]"));
  } else {
    throw ParseError(path + ": expected a distribution");
  }
  if (mass.size() != states) throw ParseError(path + ": distribution length does not match the state space");
  try {
    return Distribution(std::move(mass));
  } catch (const DomainError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline JointPosteriorProfile parse_profile(std::size_t states, const Json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected one distribution per player");
  JointPosteriorProfile p;
  for (std::size_t k = 0; k < j.size(); ++k) p.per_player.push_back(parse_distribution(states, j[k], path + "[" + std::to_string(k) + "]"));
  return p;
}

// {"actions": {player: [labels]}, "payoffs": {state: {"a1|a2": [u1, u2]}}}
inline BayesianGame parse_game(const InformationStructure& structure, const Json& j, const std::string& path = "$") {
  const auto& aj = field(j, "actions", path);
  std::vector<std::vector<std::string>> actions;
  for (const auto& player : structure.players())
    actions.push_back(parse_labels(field(aj, player.name, path + ".actions"), path + ".actions." + player.name));
  std::size_t count = 1;
  for (const auto& a : actions) count *= a.size();
  const auto& pj = field(j, "payoffs", path);
  const auto& space = structure.space();
  std::vector<std::vector<std::vector<Rational>>> table(space->size(), std::vector<std::vector<Rational>>(count));
  try {
    BayesianGame shape(structure, actions,
                       std::vector<std::vector<std::vector<Rational>>>(
                           space->size(), std::vector<std::vector<Rational>>(count, std::vector<Rational>(actions.size(), Rational(0)))));
    for (State w = 0; w < space->size(); ++w) {
      const std::string sp = path + ".payoffs." + space->label(w);
      const auto& row = field(pj, space->label(w), path + ".payoffs");
      for (std::size_t k = 0; k < count; ++k) {
        const std::string key = shape.profile_key(k);
        const auto& u = field(row, key, sp);
        if (!u.is_array() || u.size() != actions.size()) throw ParseError(sp + "." + key + ": expected one payoff per player");
        for (std::size_t i = 0; i < u.size(); ++i) {
          if (u[i].is_string() && (u[i] == "-inf" || u[i] == "−inf"))
            throw ParseError(sp + "." + key + ": -inf payoffs are only produced by the log-score game");
          table[w][k].push_back(as_rational(u[i], sp + "." + key + "[" + std::to_string(i) + "]"));
        }
      }
    }
    return BayesianGame(structure, std::move(actions), std::move(table));
  } catch (const DomainError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

inline Json to_json(const BayesianGame& g) {
  Json out;
  Json actions = Json::object();
  for (std::size_t i = 0; i < g.player_count(); ++i) actions[g.structure().players()[i].name] = g.actions()[i];
  out["actions"] = actions;
  Json payoffs = Json::object();
  for (State w = 0; w < g.structure().space()->size(); ++w) {
    Json row = Json::object();
    for (std::size_t k = 0; k < g.profile_count(); ++k) {
      Json u = Json::array();
      for (std::size_t i = 0; i < g.player_count(); ++i) u.push_back(g.payoff(w, k, i).str());
      row[g.profile_key(k)] = u;
    }
    payoffs[g.structure().space()->label(w)] = row;
  }
  out["payoffs"] = payoffs;
  return out;
}

// {player: {"state|signal": action | {action: weight}}}; the state names the
// player's block that contains it.
inline StrategyProfile parse_strategy(const BayesianGame& game, const StochasticSignaling& tau, const Json& j,
                                      const std::string& path = "$") {
  const auto& structure = game.structure();
  StrategyProfile sigma;
  sigma.per_player.resize(game.player_count());
  for (std::size_t i = 0; i < game.player_count(); ++i) {
    const auto& name = structure.players()[i].name;
    const auto& pj = field(j, name, path);
    for (auto it = pj.begin(); it != pj.end(); ++it) {
      const std::string kp = path + "." + name + "." + it.key();
      auto bar = it.key().find('|');
      if (bar == std::string::npos) throw ParseError(kp + ": key must be \"state|signal\"");
      State w;
      std::size_t s;
      try {
        w = structure.space()->index_of(it.key().substr(0, bar));
        s = tau.signal_index(it.key().substr(bar + 1));
      } catch (const DomainError& e) {
        throw ParseError(kp + ": " + e.what());
      }
      MixedAction mix(game.action_count(i), Rational(0));
      try {
        if (it.value().is_string()) {
          mix[game.action_index(i, it.value().get<std::string>())] = 1;
        } else if (it.value().is_object()) {
          for (auto a = it.value().begin(); a != it.value().end(); ++a) mix[game.action_index(i, a.key())] = as_rational(a.value(), kp + "." + a.key());
        } else {
          throw ParseError(kp + ": expected an action label or a weight map");
        }
      } catch (const DomainError& e) {
        throw ParseError(kp + ": " + e.what());
      }
      Rational total = sum(mix);
      if (total != 1) throw ParseError(kp + ": mixed action weights sum to " + total.str());
      sigma.per_player[i][{structure.player(i).block_of(w), s}] = mix;
    }
  }
  return sigma;
}

// {"rows": [...], "columns": [...], "entries": [[...]]}
inline ExperimentMatrix parse_experiment(const Json& j, const std::string& path = "$") {
  ExperimentMatrix m;
  m.entries = parse_matrix(field(j, "entries", path), path + ".entries");
  if (j.contains("rows")) {
    m.row_labels = parse_labels(j.at("rows"), path + ".rows");
  } else {
    for (std::size_t r = 0; r < m.entries.size(); ++r) m.row_labels.push_back("r" + std::to_string(r + 1));
  }
  if (j.contains("columns")) {
    m.column_labels = parse_labels(j.at("columns"), path + ".columns");
  } else {
    std::size_t width = m.entries.empty() ? 0 : m.entries.front().size();
    for (std::size_t c = 0; c < width; ++c) m.column_labels.push_back("c" + std::to_string(c + 1));
  }
  try {
    m.validate();
  } catch (const DomainError& e) {
    throw ParseError(path + ": " + e.what());
  }
  return m;
}

inline Json to_json(const ExperimentMatrix& m) {
  Json entries = Json::array();
  for (const auto& row : m.entries) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(x.str());
    entries.push_back(r);
  }
  return {{"rows", m.row_labels}, {"columns", m.column_labels}, {"entries", entries}};
}

inline Json to_json(const std::vector<std::vector<Rational>>& matrix) {
  Json out = Json::array();
  for (const auto& row : matrix) {
    Json r = Json::array();
    for (const auto& x : row) r.push_back(x.str());
    out.push_back(r);
  }
  return out;
}

inline Json to_json(const std::vector<Rational>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(x.str());
  return out;
}

}  // namespace oracles::io
