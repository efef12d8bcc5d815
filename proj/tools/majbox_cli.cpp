// Command-line front end: run a scenario on one engine, compare engines,
// emit the hierarchy report, calibrate the braid-sense convention, and list
// the built-in catalog.
//
// Exit codes: 0 success; 1 comparison mismatch, hierarchy deviation, or
// calibration failure; 2 parse/validation error; 3 evaluation guard trip.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <majbox/scenarios.hpp>

namespace {

using namespace majbox;

Scenario load_scenario(const std::string& ref) {
  for (const auto& b : builtin_catalog())
    if (b.name == ref) return b.scenario;
  if (ref == kReservedBuiltinName) get_builtin(ref);  // throws the reserved-name error
  std::ifstream in(ref);
  if (!in) throw scenario_error("no builtin scenario or readable file named '" + ref + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), std::filesystem::path(ref).stem().string());
}

EngineId require_engine(const std::string& name) {
  if (auto id = parse_engine_id(name)) return *id;
  throw scenario_error("unknown engine '" + name + "' (expected quantum, hv1, hv2, or stab)");
}

std::vector<EngineId> parse_engine_list(const std::string& csv) {
  std::vector<EngineId> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(require_engine(tok));
  }
  return out;
}

OutcomeTrace parse_condition(const std::string& csv) {
  OutcomeTrace t;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto p = parity_from_string(tok);
    if (!p) throw scenario_error("condition entries must be 'even' or 'odd', got '" + tok + "'");
    t.push_back(*p);
  }
  if (t.empty()) throw scenario_error("condition must name at least one outcome");
  return t;
}

void write_output(const std::string& text, const std::string& outPath) {
  if (outPath.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(outPath, std::ios::binary);
  if (!out) throw scenario_error("cannot open output file '" + outPath + "'");
  out << text;
}

struct ModeFlags {
  bool exact = false;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;

  EvalMode resolve() const {
    EvalMode m;
    m.exact = shots == 0;  // sampling only when --shots is given
    m.shots = shots;
    m.seed = seed;
    return m;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Majorana-box multi-engine simulator and comparison harness"};
  app.require_subcommand(1);

  std::string scenarioRef, engineName, enginesCsv, outPath, oracleName, conditionCsv;
  ModeFlags mode;
  double tolVal = 0.;

  CLI::App* runCmd = app.add_subcommand("run", "evaluate one scenario on one engine");
  runCmd->add_option("scenario", scenarioRef, "builtin name or scenario file path")->required();
  runCmd->add_option("--engine", engineName, "quantum, hv1, hv2, or stab")->required();
  auto* runExact = runCmd->add_flag("--exact", mode.exact, "exact branch enumeration (default)");
  auto* runShots = runCmd->add_option("--shots", mode.shots, "sample this many trajectories");
  runExact->excludes(runShots);
  runShots->excludes(runExact);
  runCmd->add_option("--seed", mode.seed, "sampling seed (default 0)");
  runCmd->add_option("--out", outPath, "write JSON here instead of standard output");

  CLI::App* cmpCmd = app.add_subcommand("compare", "run several engines and compare pairwise");
  cmpCmd->add_option("scenario", scenarioRef, "builtin name or scenario file path")->required();
  cmpCmd->add_option("--engines", enginesCsv, "comma-separated engine ids (at least two)")
      ->required();
  auto* cmpTol = cmpCmd->add_option(
      "--tol", tolVal, "TV tolerance (default: 0 all-exact, 1e-6 otherwise)");
  auto* cmpExact = cmpCmd->add_flag("--exact", mode.exact, "exact branch enumeration (default)");
  auto* cmpShots = cmpCmd->add_option("--shots", mode.shots, "sample this many trajectories");
  cmpExact->excludes(cmpShots);
  cmpShots->excludes(cmpExact);
  cmpCmd->add_option("--seed", mode.seed, "sampling seed (default 0)");
  cmpCmd->add_option("--condition", conditionCsv,
                     "condition on an outcome prefix, e.g. even,odd");
  cmpCmd->add_option("--out", outPath, "write JSON here instead of standard output");

  CLI::App* hierCmd = app.add_subcommand("hierarchy", "full catalog verdict table per engine");
  auto* hierTol = hierCmd->add_option("--tol", tolVal, "TV tolerance (default 1e-6)");
  hierCmd->add_option("--out", outPath, "also write the JSON report here");

  CLI::App* calCmd = app.add_subcommand("calibrate", "pin the braid-sense convention");
  calCmd->add_option("--oracle", oracleName, "reference engine: quantum or stab")->required();
  calCmd->add_option("--out", outPath, "also write the JSON calibration log here");

  app.add_subcommand("list", "list builtin scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (runCmd->parsed()) {
      Scenario sc = load_scenario(scenarioRef);
      EngineId id = require_engine(engineName);
      Distribution d = evaluate(id, sc, mode.resolve());
      write_output(distribution_to_json(d, sc.name, engine_id_name(id)), outPath);
      return 0;
    }

    if (cmpCmd->parsed()) {
      Scenario sc = load_scenario(scenarioRef);
      std::vector<EngineId> engines = parse_engine_list(enginesCsv);
      std::optional<double> tol;
      if (cmpTol->count()) tol = tolVal;
      OutcomeTrace condition;
      if (!conditionCsv.empty()) condition = parse_condition(conditionCsv);
      ComparisonReport rep = compare(sc, sc.name, engines, mode.resolve(), tol, condition);
      write_output(report_to_json(rep), outPath);
      if (!outPath.empty())
        std::cout << (rep.allMatch ? "match" : "mismatch") << " tol=" << rep.tol << "\n";
      return rep.allMatch ? 0 : 1;
    }

    if (hierCmd->parsed()) {
      HierarchyReport rep = compute_hierarchy(hierTol->count() ? tolVal : 1e-6);
      std::cout << hierarchy_markdown(rep);
      if (!outPath.empty()) write_output(hierarchy_to_json(rep), outPath);
      if (!rep.matchesExpected) {
        for (std::size_t e = 0; e < rep.engines.size(); ++e)
          for (std::size_t c = 0; c < rep.classes.size(); ++c) {
            bool got = rep.classes[c].cells[e].match;
            if (got != kExpectedHierarchy[e][c])
              std::cerr << "deviation: " << engine_id_name(rep.engines[e]) << " x "
                        << rep.classes[c].name << " is " << (got ? "match" : "mismatch")
                        << ", expected " << (got ? "mismatch" : "match") << "\n";
          }
        return 1;
      }
      return 0;
    }

    if (calCmd->parsed()) {
      EngineId oracle = require_engine(oracleName);
      CalibrationResult res = calibrate_detailed(oracle);
      std::cout << "| scenario | tv(rightfront) | tv(leftfront) |\n|---|---|---|\n";
      for (const auto& row : res.rows) {
        char line[128];
        std::snprintf(line, sizeof line, "| %s | %.3g | %.3g |\n", row.scenario.c_str(),
                      row.tv[0], row.tv[1]);
        std::cout << line;
      }
      if (res.winner)
        std::cout << "convention: ccw " << to_string(res.winner->ccwSense) << "\n";
      else
        std::cout << (res.pass[0] ? "calibration failed: both conventions fit"
                                  : "calibration failed: no convention fits")
                  << "\n";
      if (!outPath.empty()) {
        using jsonio::fmt_double;
        using jsonio::quote;
        std::string j = "{\n  \"oracle\": " + std::string(quote(engine_id_name(res.oracle))) +
                        ",\n  \"tol\": " + fmt_double(res.tol) + ",\n  \"rows\": [\n";
        for (std::size_t i = 0; i < res.rows.size(); ++i) {
          const auto& row = res.rows[i];
          j += "    {\"scenario\": " + quote(row.scenario) +
               ", \"tv_rightfront\": " + fmt_double(row.tv[0]) +
               ", \"tv_leftfront\": " + fmt_double(row.tv[1]) + "}";
          j += i + 1 < res.rows.size() ? ",\n" : "\n";
        }
        j += "  ],\n  \"winner\": ";
        j += res.winner ? quote(to_string(res.winner->ccwSense)) : "null";
        j += "\n}\n";
        write_output(j, outPath);
      }
      return res.winner ? 0 : 1;
    }

    // list
    for (const auto& name : list_builtins()) std::cout << name << "\n";
    std::cout << kReservedBuiltinName << " (reserved)\n";
    return 0;
  } catch (const guard_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
