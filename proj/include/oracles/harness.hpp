#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "oracles/dominance.hpp"
#include "oracles/games.hpp"
#include "oracles/io.hpp"
#include "oracles/partition_algebra.hpp"
#include "oracles/signaling.hpp"
#include "oracles/witness_games.hpp"

namespace oracles::harness {

using io::Json;

// Bad command-line usage or an unknown fixture name.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Fixture {
  std::string name;
  std::string description;
  InformationStructure structure;
  std::map<std::string, io::ParsedSignaling> signalings;
  std::map<std::string, BayesianGame> games;
  Json strategies;
  Json claims;

  const io::ParsedSignaling& signaling(const std::string& key) const {
    auto it = signalings.find(key);
    if (it == signalings.end()) throw DomainError("fixture has no signaling named '" + key + "'");
    return it->second;
  }
  const BayesianGame& game(const std::string& key) const {
    auto it = games.find(key);
    if (it == games.end()) throw DomainError("fixture has no game named '" + key + "'");
    return it->second;
  }
};

inline Fixture parse_fixture(const Json& j, const std::string& path) {
  std::string name = io::as_string(io::field(j, "name", path), path + ".name");
  auto structure = io::parse_structure(io::field(j, "structure", path), path + ".structure");
  Fixture f{name, j.value("description", std::string()), structure, {}, {}, j.value("strategies", Json::object()),
            io::field(j, "claims", path)};
  if (j.contains("signalings"))
    for (auto it = j.at("signalings").begin(); it != j.at("signalings").end(); ++it)
      f.signalings.emplace(it.key(), io::parse_signaling(structure, it.value(), path + ".signalings." + it.key()));
  if (j.contains("games"))
    for (auto it = j.at("games").begin(); it != j.at("games").end(); ++it)
      f.games.emplace(it.key(), io::parse_game(structure, it.value(), path + ".games." + it.key()));
  if (!f.claims.is_array()) throw ParseError(path + ".claims: expected an array");
  return f;
}

inline std::vector<std::string> list_fixtures(const std::string& dir) {
  std::vector<std::string> names;
  if (!std::filesystem::is_directory(dir)) return names;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") names.push_back(entry.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

inline Fixture load_fixture(const std::string& dir, const std::string& name) {
  auto names = list_fixtures(dir);
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string known;
    for (const auto& n : names) known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown fixture '" + name + "'; available: " + known);
  }
  std::string path = (std::filesystem::path(dir) / (name + ".json")).string();
  return parse_fixture(io::load_json_file(path), path);
}

struct ClaimResult {
  std::string id;
  std::string op;
  Json expected;
  Json actual;
  std::string provenance;
  bool pass = false;
};

struct FixtureReport {
  std::string fixture;
  std::vector<ClaimResult> claims;

  bool passed() const {
    return std::all_of(claims.begin(), claims.end(), [](const ClaimResult& c) { return c.pass; });
  }

  Json to_json() const {
    Json arr = Json::array();
    for (const auto& c : claims)
      arr.push_back({{"id", c.id}, {"op", c.op}, {"expected", c.expected}, {"actual", c.actual},
                     {"provenance", c.provenance}, {"pass", c.pass}});
    return {{"fixture", fixture}, {"claims", arr}};
  }

  std::string to_text() const {
    std::ostringstream out;
    out << fixture << ": " << (passed() ? "PASS" : "FAIL") << "\n";
    for (const auto& c : claims) {
      out << "  [" << (c.pass ? "pass" : "FAIL") << "] " << c.id << " (" << c.op << ", " << c.provenance
          << "): " << c.actual.dump();
      if (!c.pass) out << " expected " << c.expected.dump();
      out << "\n";
    }
    return out.str();
  }
};

namespace detail {

inline std::string str_arg(const Json& args, const std::string& key) { return io::as_string(io::field(args, key, "args"), "args." + key); }

inline const Partition& partition_arg(const Fixture& f, const Json& args, const std::string& key) {
  return f.structure.partition(str_arg(args, key));
}

inline std::size_t player_arg(const Fixture& f, const Json& args) {
  auto name = str_arg(args, "player");
  auto i = f.structure.player_index(name);
  if (!i) throw DomainError("no player named '" + name + "'");
  return *i;
}

inline State state_arg(const Fixture& f, const Json& args, const std::string& key = "state") {
  return f.structure.space()->index_of(str_arg(args, key));
}

inline const StochasticSignaling& tau_arg(const Fixture& f, const Json& args, const std::string& key = "signaling") {
  return f.signaling(str_arg(args, key)).stochastic;
}

inline StrategyProfile strategy_arg(const Fixture& f, const Json& args, const BayesianGame& game,
                                    const StochasticSignaling& tau) {
  auto key = str_arg(args, "strategy");
  if (!f.strategies.contains(key)) throw DomainError("fixture has no strategy named '" + key + "'");
  return io::parse_strategy(game, tau, f.strategies.at(key), "strategies." + key);
}

inline ExperimentMatrix experiment_arg(const Fixture& f, const Json& args) {
  return experiment_matrix(tau_arg(f, args), partition_arg(f, args, "partition"), f.structure.prior());
}

using ClaimOp = std::function<Json(const Fixture&, const Json&)>;

inline const std::map<std::string, ClaimOp>& claim_ops() {
  static const std::map<std::string, ClaimOp> ops = {
      {"ckc", [](const Fixture& f, const Json&) { return io::to_json(ckc_decompose(f.structure.player_partitions()).canonical()); }},
      {"unique_ckc", [](const Fixture& f, const Json&) { return Json(has_unique_ckc(f.structure.player_partitions())); }},
      {"join",
       [](const Fixture& f, const Json& a) {
         return io::to_json(join(partition_arg(f, a, "p"), partition_arg(f, a, "q")).canonical());
       }},
      {"refines", [](const Fixture& f, const Json& a) { return Json(refines(partition_arg(f, a, "p"), partition_arg(f, a, "q"))); }},
      {"coarsening_count", [](const Fixture& f, const Json& a) { return Json(coarsenings(partition_arg(f, a, "p")).size()); }},
      {"connect_path",
       [](const Fixture& f, const Json& a) {
         auto path = connect_path(f.structure.player_partitions(), state_arg(f, a, "from"), state_arg(f, a, "to"));
         if (!path) return Json(nullptr);
         Json out = Json::array();
         for (const auto& step : *path) out.push_back(f.structure.space()->label(step.state));
         return out;
       }},
      {"is_imi", [](const Fixture& f, const Json& a) { return Json(is_imi(f.structure, partition_arg(f, a, "f1"), partition_arg(f, a, "f2")).holds); }},
      {"imi_counterexample",
       [](const Fixture& f, const Json& a) {
         auto r = is_imi(f.structure, partition_arg(f, a, "f1"), partition_arg(f, a, "f2"));
         return r.counterexample ? io::to_json(r.counterexample->canonical()) : Json(nullptr);
       }},
      {"imi_match_exists",
       [](const Fixture& f, const Json& a) {
         auto target = io::parse_partition(f.structure.space(), io::field(a, "target", "args"), "args.target");
         return Json(imi_match(f.structure, partition_arg(f, a, "f1"), target).has_value());
       }},
      {"det_dominates",
       [](const Fixture& f, const Json& a) { return Json(det_dominates(f.structure, partition_arg(f, a, "f1"), partition_arg(f, a, "f2"))); }},
      {"unique_ckc_dominates",
       [](const Fixture& f, const Json& a) {
         return Json(unique_ckc_dominates(f.structure, partition_arg(f, a, "f1"), partition_arg(f, a, "f2")));
       }},
      {"two_sided_imi",
       [](const Fixture& f, const Json& a) {
         auto v = two_sided_imi_equal(f.structure, partition_arg(f, a, "f1"), partition_arg(f, a, "f2"));
         return Json{{"forward", v.forward}, {"backward", v.backward}, {"equal", v.equal}, {"consistent", v.consistent()}};
       }},
      {"common_objective",
       [](const Fixture& f, const Json& a) {
         return Json(common_objective_condition(f.structure, partition_arg(f, a, "f1"), partition_arg(f, a, "f2")));
       }},
      {"restrict_to_ckc",
       [](const Fixture& f, const Json& a) {
         auto sub = restrict_to_ckc(f.structure, io::parse_event(f.structure.space(), io::field(a, "block", "args"), "args.block"));
         return io::to_json(sub);
       }},
      {"det_posterior",
       [](const Fixture& f, const Json& a) {
         const auto& sig = f.signaling(str_arg(a, "signaling"));
         if (!sig.deterministic) throw DomainError("det_posterior needs a deterministic signaling");
         return Json(det_posterior(f.structure, player_arg(f, a), *sig.deterministic, state_arg(f, a)).str());
       }},
      {"stoch_posterior",
       [](const Fixture& f, const Json& a) {
         const auto& tau = tau_arg(f, a);
         return Json(stoch_posterior(f.structure, player_arg(f, a), tau, state_arg(f, a), tau.signal_index(str_arg(a, "signal"))).str());
       }},
      {"atlas", [](const Fixture& f, const Json& a) { return io::to_json(posterior_atlas(f.structure, tau_arg(f, a))); }},
      {"atlas_size", [](const Fixture& f, const Json& a) { return Json(posterior_atlas(f.structure, tau_arg(f, a)).size()); }},
      {"atlas_contains",
       [](const Fixture& f, const Json& a) {
         auto profile = io::parse_profile(f.structure.space()->size(), io::field(a, "profile", "args"), "args.profile");
         return Json(posterior_atlas(f.structure, tau_arg(f, a)).contains(profile));
       }},
      {"post_included",
       [](const Fixture& f, const Json& a) {
         return Json(post_included(posterior_atlas(f.structure, tau_arg(f, a, "a")), posterior_atlas(f.structure, tau_arg(f, a, "b"))));
       }},
      {"atlas_equal",
       [](const Fixture& f, const Json& a) {
         return Json(atlas_equal(posterior_atlas(f.structure, tau_arg(f, a, "a")), posterior_atlas(f.structure, tau_arg(f, a, "b"))));
       }},
      {"experiment_matrix", [](const Fixture& f, const Json& a) { return io::to_json(experiment_arg(f, a).entries); }},
      {"experiment_matrix_row",
       [](const Fixture& f, const Json& a) { return io::to_json(experiment_arg(f, a).entries.at(state_arg(f, a))); }},
      {"garbling_exists",
       [](const Fixture& f, const Json& a) {
         return Json(garbling_exists(experiment_arg(f, io::field(a, "from", "args")), experiment_arg(f, io::field(a, "to", "args"))).exists);
       }},
      {"proportional_decompose_complete",
       [](const Fixture& f, const Json& a) { return Json(proportional_decompose(tau_arg(f, a, "tau1"), tau_arg(f, a, "tau2")).complete()); }},
      {"separating_probabilities",
       [](const Fixture&, const Json& a) { return io::to_json(separating_probabilities(io::field(a, "blocks", "args").get<std::size_t>())); }},
      {"expected_payoffs",
       [](const Fixture& f, const Json& a) {
         const auto& g = f.game(str_arg(a, "game"));
         const auto& tau = tau_arg(f, a);
         return io::to_json(expected_payoffs(g, tau, strategy_arg(f, a, g, tau)));
       }},
      {"conditional_payoffs",
       [](const Fixture& f, const Json& a) {
         const auto& g = f.game(str_arg(a, "game"));
         const auto& tau = tau_arg(f, a);
         auto event = io::parse_event(f.structure.space(), io::field(a, "event", "args"), "args.event");
         return io::to_json(conditional_payoffs(g, tau, strategy_arg(f, a, g, tau), event));
       }},
      {"is_equilibrium",
       [](const Fixture& f, const Json& a) {
         const auto& g = f.game(str_arg(a, "game"));
         const auto& tau = tau_arg(f, a);
         return Json(is_equilibrium(g, tau, strategy_arg(f, a, g, tau)).holds);
       }},
      {"ned_mass",
       [](const Fixture& f, const Json& a) {
         const auto& g = f.game(str_arg(a, "game"));
         const auto& tau = tau_arg(f, a);
         auto ned = ned_distribution(g, tau, strategy_arg(f, a, g, tau));
         auto labels = str_arg(a, "profile");
         std::optional<std::size_t> k;
         for (std::size_t p = 0; p < g.profile_count(); ++p)
           if (g.profile_key(p) == labels) k = p;
         if (!k) throw DomainError("unknown action profile '" + labels + "'");
         return Json(ned.at(state_arg(f, a), *k).str());
       }},
      {"pure_equilibrium_count",
       [](const Fixture& f, const Json& a) { return Json(enumerate_pure_equilibria(f.game(str_arg(a, "game")), tau_arg(f, a)).size()); }},
      {"best_common_payoff",
       [](const Fixture& f, const Json& a) { return Json(best_common_payoff(f.game(str_arg(a, "game")), tau_arg(f, a)).str()); }},
      {"permutation_game",
       [](const Fixture& f, const Json& a) {
         const auto& sig = f.signaling(str_arg(a, "signaling"));
         if (!sig.deterministic) throw DomainError("the permutation game is built from a deterministic signaling");
         auto g = build_permutation_game(f.structure, player_arg(f, a), *sig.deterministic);
         Json first = Json::array();
         for (State w = 0; w < f.structure.space()->size(); ++w) first.push_back(g.problem.payoff[w][0].str());
         return Json{{"actions", g.problem.actions.size()}, {"penalty", g.penalty.str()}, {"first_action_payoffs", first}};
       }},
      {"permutation_value",
       [](const Fixture& f, const Json& a) {
         const auto& sig = f.signaling(str_arg(a, "signaling"));
         if (!sig.deterministic) throw DomainError("the permutation game is built from a deterministic signaling");
         auto i = player_arg(f, a);
         auto g = build_permutation_game(f.structure, i, *sig.deterministic);
         return Json(decision_value(f.structure, i, tau_arg(f, a, "informed_by"), g.problem).str());
       }},
      {"belief_game_truthful",
       [](const Fixture& f, const Json& a) {
         BeliefGame g(io::parse_profile(f.structure.space()->size(), io::field(a, "profile", "args"), "args.profile"));
         std::vector<State> actions;
         for (std::size_t i = 0; i < g.player_count(); ++i) actions.push_back(g.actions(i).front());
         const auto& beliefs = g.profile().per_player;
         return Json{{"payoffs", io::to_json(g.expected_payoffs(beliefs, actions))}, {"equilibrium", g.is_equilibrium(beliefs, actions)}};
       }},
      {"belief_game_deviation",
       [](const Fixture& f, const Json& a) {
         const auto n = f.structure.space()->size();
         BeliefGame g(io::parse_profile(n, io::field(a, "profile", "args"), "args.profile"));
         auto beliefs = g.profile().per_player;
         auto i = io::field(a, "deviator", "args").get<std::size_t>();
         beliefs.at(i) = io::parse_distribution(n, io::field(a, "belief", "args"), "args.belief");
         std::vector<State> actions;
         for (std::size_t j = 0; j < g.player_count(); ++j) actions.push_back(g.best_response(j, beliefs[j]));
         auto u = g.expected_payoffs(beliefs, actions);
         return Json{{"payoffs", io::to_json(u)}, {"aggregate", sum(u).str()}};
       }},
      {"two_stage_truthful",
       [](const Fixture& f, const Json& a) {
         const auto& tau = tau_arg(f, a, "reference");
         TwoStageGame g(f.structure, tau);
         auto sigma = g.truthful(tau);
         return Json{{"aggregate", g.aggregate(tau, sigma).str()}, {"equilibrium", !g.profitable_deviation(tau, sigma).has_value()}};
       }},
      {"two_stage_max_below_truthful",
       [](const Fixture& f, const Json& a) {
         TwoStageGame g(f.structure, tau_arg(f, a, "reference"));
         auto m = g.max_aggregate(tau_arg(f, a, "actual"));
         return Json(m.upper_bound() < -Rational(static_cast<long>(f.structure.player_count())));
       }},
      {"kld_truthful_unique",
       [](const Fixture& f, const Json& a) {
         auto atlas = posterior_atlas(f.structure, tau_arg(f, a, "reference"));
         for (std::size_t i = 0; i < f.structure.player_count(); ++i) {
           auto menu = atlas.marginals(i);
           for (std::size_t k = 0; k < menu.size(); ++k) {
             auto choice = log_score_argmax(menu[k], menu);
             if (choice.index != k || !choice.unique) return Json(false);
           }
         }
         return Json(true);
       }},
      {"log_score_argmax",
       [](const Fixture& f, const Json& a) {
         const auto n = f.structure.space()->size();
         auto q = io::parse_distribution(n, io::field(a, "q", "args"), "args.q");
         std::vector<Distribution> cands;
         const auto& cj = io::field(a, "candidates", "args");
         for (std::size_t k = 0; k < cj.size(); ++k) cands.push_back(io::parse_distribution(n, cj[k], "args.candidates"));
         return Json(cands[log_score_argmax(q, cands).index].str());
       }},
      {"combined_truthful",
       [](const Fixture& f, const Json& a) {
         const auto& tau = tau_arg(f, a, "reference");
         CombinedGame g(f.structure, tau);
         auto u = g.expected_payoffs(tau, g.two_stage().truthful(tau), g.kld().best_responses(tau));
         Json out = Json::array();
         for (const auto& p : u) out.push_back({{"two_stage_half", p.two_stage_half.str()}, {"kld_half", p.kld_half.str()}});
         return out;
       }},
  };
  return ops;
}

}  // namespace detail

inline std::vector<std::string> claim_op_names() {
  std::vector<std::string> out;
  for (const auto& [name, op] : detail::claim_ops()) out.push_back(name);
  return out;
}

// Runs every claim. Domain errors inside a claim become a failing result;
// resource errors propagate so callers can report the cap.
inline FixtureReport run_fixture(const Fixture& f) {
  FixtureReport report{f.name, {}};
  for (std::size_t k = 0; k < f.claims.size(); ++k) {
    const auto& c = f.claims[k];
    const std::string path = f.name + ".claims[" + std::to_string(k) + "]";
    ClaimResult r;
    r.id = io::as_string(io::field(c, "id", path), path + ".id");
    r.op = io::as_string(io::field(c, "op", path), path + ".op");
    r.expected = io::field(c, "expected", path);
    r.provenance = c.value("provenance", std::string());
    const auto& ops = detail::claim_ops();
    auto it = ops.find(r.op);
    if (it == ops.end()) throw ParseError(path + ".op: unknown operation '" + r.op + "'");
    try {
      r.actual = it->second(f, c.value("args", Json::object()));
      r.pass = r.actual == r.expected;
    } catch (const DomainError& e) {
      r.actual = Json{{"error", e.what()}};
      r.pass = false;
    }
    report.claims.push_back(std::move(r));
  }
  return report;
}

}  // namespace oracles::harness
