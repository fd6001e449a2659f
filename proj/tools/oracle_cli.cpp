#include <cstdlib>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles/harness.hpp"

#ifndef ORACLES_FIXTURE_DIR
#define ORACLES_FIXTURE_DIR "fixtures"
#endif

namespace {

using oracles::io::Json;
namespace io = oracles::io;
namespace harness = oracles::harness;

enum Exit { kOk = 0, kClaimFailure = 1, kUsage = 2, kResource = 3 };

std::string default_fixture_dir() {
  if (const char* env = std::getenv("ORACLES_FIXTURES")) return env;
  return ORACLES_FIXTURE_DIR;
}

void print(const Json& j) { std::cout << j.dump(2) << "\n"; }

oracles::InformationStructure load_structure(const std::string& path) {
  return io::parse_structure(io::load_json_file(path), path);
}

std::vector<harness::FixtureReport> run_all(const std::string& dir, const std::vector<std::string>& names, bool parallel) {
  std::vector<harness::FixtureReport> reports;
  if (!parallel) {
    for (const auto& n : names) reports.push_back(harness::run_fixture(harness::load_fixture(dir, n)));
    return reports;
  }
  std::vector<std::future<harness::FixtureReport>> jobs;
  for (const auto& n : names)
    jobs.push_back(std::async(std::launch::async, [&dir, n] { return harness::run_fixture(harness::load_fixture(dir, n)); }));
  for (auto& j : jobs) reports.push_back(j.get());
  return reports;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact analysis of public-information oracles in Bayesian games"};
  app.require_subcommand(1);

  std::string structure_path, f1, f2, tau_path, m1_path, m2_path, mode = "deterministic", format = "text";
  std::string fixture_dir = default_fixture_dir();
  std::vector<std::string> fixture_names;
  bool all = false, parallel = false;

  auto* ckc = app.add_subcommand("ckc", "Common knowledge components of the players' partitions");
  ckc->add_option("structure", structure_path)->required();

  auto* imi = app.add_subcommand("imi", "Is oracle F1 individually more informative than oracle F2");
  imi->add_option("structure", structure_path)->required();
  imi->add_option("F1", f1)->required();
  imi->add_option("F2", f2)->required();

  auto* dom = app.add_subcommand("dominates", "Does oracle F1 dominate oracle F2");
  dom->add_option("--mode", mode)->check(CLI::IsMember({"deterministic", "unique-ckc"}));
  dom->add_option("structure", structure_path)->required();
  dom->add_option("F1", f1)->required();
  dom->add_option("F2", f2)->required();

  auto* post = app.add_subcommand("post", "Distribution over joint posterior profiles induced by a signaling");
  post->add_option("structure", structure_path)->required();
  post->add_option("signaling", tau_path)->required();

  auto* garble = app.add_subcommand("garble-check", "Is the second experiment a garbling of the first");
  garble->add_option("m1", m1_path)->required();
  garble->add_option("m2", m2_path)->required();

  auto* common = app.add_subcommand("common-objective", "Joint-refinement condition for common-objective games");
  common->add_option("structure", structure_path)->required();
  common->add_option("F1", f1)->required();
  common->add_option("F2", f2)->required();

  auto* verify = app.add_subcommand("verify", "Check the claims of one fixture or of all fixtures");
  verify->add_option("fixture", fixture_names);
  verify->add_flag("--all", all);
  verify->add_flag("--parallel", parallel);
  verify->add_option("--fixtures", fixture_dir, "Fixture directory");

  auto* report = app.add_subcommand("report", "Full claim report for fixtures");
  report->add_option("--format", format)->check(CLI::IsMember({"json", "text"}));
  report->add_option("fixture", fixture_names);
  report->add_option("--fixtures", fixture_dir, "Fixture directory");
  report->add_flag("--parallel", parallel);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*ckc) {
      auto s = load_structure(structure_path);
      auto meet = oracles::ckc_decompose(s.player_partitions()).canonical();
      print({{"relation", "ckc"}, {"blocks", io::to_json(meet)}, {"unique", meet.block_count() == 1}});
    } else if (*imi) {
      auto s = load_structure(structure_path);
      auto r = oracles::is_imi(s, s.partition(f1), s.partition(f2));
      Json out{{"relation", "imi"}, {"holds", r.holds}};
      if (r.counterexample) out["witness"] = io::to_json(r.counterexample->canonical());
      print(out);
    } else if (*dom) {
      auto s = load_structure(structure_path);
      Json out;
      if (mode == "deterministic") {
        auto r = oracles::is_imi(s, s.partition(f1), s.partition(f2));
        out = {{"relation", "dominates-deterministic"}, {"holds", r.holds}};
        if (r.counterexample) out["witness"] = io::to_json(r.counterexample->canonical());
      } else {
        out = {{"relation", "dominates-unique-ckc"}, {"holds", oracles::unique_ckc_dominates(s, s.partition(f1), s.partition(f2))}};
      }
      print(out);
    } else if (*post) {
      auto s = load_structure(structure_path);
      auto tau = io::parse_signaling(s, io::load_json_file(tau_path), tau_path);
      print({{"relation", "post"}, {"atlas", io::to_json(oracles::posterior_atlas(s, tau.stochastic))}});
    } else if (*garble) {
      auto a = io::parse_experiment(io::load_json_file(m1_path), m1_path);
      auto b = io::parse_experiment(io::load_json_file(m2_path), m2_path);
      auto r = oracles::garbling_exists(a, b);
      Json out{{"relation", "garbling"}, {"holds", r.exists}};
      if (r.exists) out["witness"] = io::to_json(r.witness);
      print(out);
    } else if (*common) {
      auto s = load_structure(structure_path);
      print({{"relation", "common-objective"}, {"holds", oracles::common_objective_condition(s, s.partition(f1), s.partition(f2))}});
    } else if (*verify || *report) {
      if (*verify && all == !fixture_names.empty()) throw harness::UsageError("verify needs a fixture name or --all");
      auto names = fixture_names.empty() ? harness::list_fixtures(fixture_dir) : fixture_names;
      if (names.empty()) throw harness::UsageError("no fixtures found in " + fixture_dir);
      auto reports = run_all(fixture_dir, names, parallel);
      bool ok = true;
      if (*report && format == "json") {
        Json arr = Json::array();
        for (const auto& r : reports) arr.push_back(r.to_json());
        print(arr);
      } else {
        for (const auto& r : reports) std::cout << r.to_text();
      }
      for (const auto& r : reports) ok = ok && r.passed();
      return ok ? kOk : kClaimFailure;
    }
  } catch (const harness::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const oracles::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsage;
  } catch (const oracles::ResourceError& e) {
    std::cerr << "resource error: " << e.what() << "\n";
    return kResource;
  } catch (const oracles::DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kUsage;
  }
  return kOk;
}
