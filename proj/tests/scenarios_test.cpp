#include <fstream>
#include <set>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>
#include <majbox/scenarios.hpp>

using namespace majbox;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("catalog is well-formed") {
  const auto& catalog = builtin_catalog();
  CHECK(catalog.size() == 16);
  std::set<std::string> names;
  for (const auto& b : catalog) {
    CHECK(names.insert(b.name).second);
    CHECK(b.scenario.name == b.name);
    CHECK_FALSE(b.notes.empty());
    std::set<EngineId> covered;
    for (const auto& [id, expected] : b.expectations) {
      CHECK(covered.insert(id).second);
      CHECK(expected.normalized());
      CHECK(expected.arithmetic() == Arithmetic::ExactDyadic);
    }
    CHECK(covered.size() == 4);
  }
  CHECK(list_builtins().size() == catalog.size());
  CHECK(names.count(kReservedBuiltinName) == 0);
}

TEST_CASE("builtin lookup distinguishes unknown from reserved names") {
  CHECK(get_builtin("hadamard-braid").name == "hadamard-braid");
  CHECK_THROWS_WITH(get_builtin("no-such-thing"),
                    Catch::Matchers::ContainsSubstring("unknown builtin"));
  CHECK_THROWS_WITH(get_builtin(kReservedBuiltinName),
                    Catch::Matchers::ContainsSubstring("reserved"));
  CHECK_THROWS_AS(get_builtin(kReservedBuiltinName), scenario_error);
}

TEST_CASE("every engine reproduces its expected catalog distribution") {
  for (const auto& b : builtin_catalog()) {
    for (const auto& [id, expected] : b.expectations) {
      INFO(b.name << " on " << engine_id_name(id));
      Distribution got = evaluate(id, b.scenario, EvalMode{});
      double tol = id == EngineId::Quantum ? 1e-9 : 0.;
      CHECK(distributions_equal(got, expected, tol));
    }
  }
}

TEST_CASE("shipped scenario files parse back to the catalog entries") {
  for (const auto& b : builtin_catalog()) {
    std::string path = std::string(MAJBOX_DATA_DIR) + "/" + b.name + ".scn";
    INFO(path);
    Scenario parsed = parse_scenario(slurp(path), b.name);
    CHECK(render_scenario(parsed) == render_scenario(b.scenario));
  }
}

TEST_CASE("random scenarios respect their step mix and always validate") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    int boxes = 4 + 2 * static_cast<int>(seed % 3);
    for (StepMix mix : {StepMix::MeasureOnly, StepMix::BraidMeasure, StepMix::All}) {
      Scenario sc = random_scenario(boxes, 8, mix, seed);  // ctor validates
      CHECK(sc.name == "random-" + std::to_string(seed));
      CHECK(sc.steps.size() <= 9);
      for (const Step& st : sc.steps) {
        if (mix != StepMix::All) CHECK_FALSE(std::holds_alternative<JointStep>(st));
        if (mix == StepMix::MeasureOnly) CHECK_FALSE(std::holds_alternative<BraidStep>(st));
      }
    }
  }
  CHECK(random_scenario(4, 0, false, 7).steps.size() == 1);
  CHECK_THROWS_AS(random_scenario(3, 5, StepMix::All, 1), scenario_error);
  CHECK_THROWS_AS(random_scenario(12, 5, StepMix::All, 1), scenario_error);
  CHECK_THROWS_AS(random_scenario(4, -1, StepMix::All, 1), scenario_error);
}

TEST_CASE("both oracles calibrate to the committed braid-sense convention") {
  CHECK(calibrate(EngineId::Stab) == kCommittedConvention);
  CHECK(calibrate(EngineId::Quantum) == kCommittedConvention);
  CHECK_THROWS_AS(calibrate_detailed(EngineId::Hv1), scenario_error);

  CalibrationResult res = calibrate_detailed(EngineId::Stab);
  CHECK(res.tol == 0.);
  CHECK(res.rows.size() == calibration_suite().size());
  REQUIRE(res.winner.has_value());
  CHECK(*res.winner == kCommittedConvention);
  CHECK(res.pass[0]);
  CHECK_FALSE(res.pass[1]);
  for (const auto& row : res.rows) {
    CHECK(row.pass[0]);
    CHECK(row.tv[0] == 0.);
  }
  // The single-exchange readback is the decisive discriminator.
  auto it = std::find_if(res.rows.begin(), res.rows.end(),
                         [](const CalibrationRow& r) { return r.scenario == "cal-p23-m13"; });
  REQUIRE(it != res.rows.end());
  CHECK_FALSE(it->pass[1]);
  CHECK(it->tv[1] == 1.);
}

TEST_CASE("hierarchy report matches the expected capture pattern") {
  HierarchyReport rep = compute_hierarchy();
  CHECK(rep.tol == 1e-6);
  CHECK(rep.matchesExpected);
  REQUIRE(rep.classes.size() == 3);
  REQUIRE(rep.engines.size() == 4);

  auto cell = [&](const char* cls, EngineId id) {
    for (const auto& c : rep.classes)
      if (c.name == cls)
        for (std::size_t e = 0; e < rep.engines.size(); ++e)
          if (rep.engines[e] == id) return c.cells[e];
    FAIL("missing cell");
    return HierarchyCell{};
  };
  CHECK(cell("fusion", EngineId::Hv1).match);
  CHECK_FALSE(cell("braiding", EngineId::Hv1).match);
  CHECK(cell("braiding", EngineId::Hv1).maxTv == Catch::Approx(1.0));
  CHECK(cell("braiding", EngineId::Hv2).match);
  CHECK_FALSE(cell("joint-interference", EngineId::Hv2).match);
  CHECK(cell("joint-interference", EngineId::Hv2).maxTv == Catch::Approx(0.5));
  CHECK(cell("joint-interference", EngineId::Stab).match);

  CHECK(hierarchy_markdown(rep) ==
        "| engine | fusion | braiding | joint-interference |\n"
        "|---|---|---|---|\n"
        "| quantum | match | match | match |\n"
        "| hv1 | match | mismatch | mismatch |\n"
        "| hv2 | match | match | mismatch |\n"
        "| stab | match | match | match |\n");

  std::string js = hierarchy_to_json(rep);
  CHECK(js.find("\"expected_match\": true") != std::string::npos);
  CHECK(js.find("\"verdict\": \"mismatch\"") != std::string::npos);
}
