#pragma once

// Scenario evaluation over any engine: exact depth-first branch enumeration
// and seeded trajectory sampling, both yielding Distributions over full
// outcome traces; cross-engine comparison reports; JSON serialization with
// stable key order and fixed float formatting so reruns are byte-identical.

#include <cstdio>
#include <functional>
#include <random>
#include <string_view>

#include "hv1_engine.hpp"
#include "hv2_engine.hpp"
#include "quantum_engine.hpp"
#include "stabilizer_engine.hpp"

namespace majbox {

enum class EngineId : std::uint8_t { Quantum, Hv1, Hv2, Stab };

inline constexpr EngineId kAllEngineIds[] = {EngineId::Quantum, EngineId::Hv1, EngineId::Hv2,
                                             EngineId::Stab};

inline const char* engine_id_name(EngineId id) {
  switch (id) {
    case EngineId::Quantum: return "quantum";
    case EngineId::Hv1: return "hv1";
    case EngineId::Hv2: return "hv2";
    case EngineId::Stab: return "stab";
  }
  return "?";
}

inline std::optional<EngineId> parse_engine_id(std::string_view s) {
  for (EngineId id : kAllEngineIds)
    if (s == engine_id_name(id)) return id;
  return std::nullopt;
}

// Hard cap on exact enumeration; beyond this the run aborts with guard_error.
inline constexpr std::size_t kLeafGuard = std::size_t{1} << 20;

template <class Engine>
Distribution enumerate_exact(const Engine& eng, const Scenario& sc) {
  validate_scenario(sc);
  Distribution dist;
  std::size_t leaves = 0;
  OutcomeTrace trace;
  trace.reserve(sc.measurement_count());

  using State = typename Engine::State;
  std::function<void(std::size_t, const State&, const Prob&)> walk =
      [&](std::size_t stepIdx, const State& state, const Prob& prob) {
        if (stepIdx == sc.steps.size()) {
          if (++leaves > kLeafGuard)
            throw guard_error("exact enumeration exceeded " + std::to_string(kLeafGuard) +
                              " branches; use sampling");
          dist.add(trace, prob);
          return;
        }
        const Step& step = sc.steps[stepIdx];
        if (const auto* b = std::get_if<BraidStep>(&step)) {
          walk(stepIdx + 1, eng.braid(state, *b), prob);
          return;
        }
        auto branches = std::holds_alternative<MeasureStep>(step)
                            ? eng.measure(state, std::get<MeasureStep>(step))
                            : eng.joint(state, std::get<JointStep>(step));
        for (const auto& br : branches) {
          trace.push_back(br.outcome);
          walk(stepIdx + 1, br.state, prob * br.prob);
          trace.pop_back();
        }
      };

  State s0 = eng.init(std::get<InitStep>(sc.steps.front()), sc.boxCount);
  walk(1, s0, Prob::one());
  return dist;
}

// Deterministic 64-bit mixer; per-shot streams are derived from (seed, shot)
// so shot order and partitioning cannot change the result.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

template <class Engine>
Distribution sample(const Engine& eng, const Scenario& sc, std::uint64_t shots,
                    std::uint64_t seed) {
  if (shots == 0) throw scenario_error("shots must be positive");
  validate_scenario(sc);
  const InitStep& init = std::get<InitStep>(sc.steps.front());

  std::map<OutcomeTrace, std::uint64_t> counts;
  using State = typename Engine::State;
  for (std::uint64_t shot = 0; shot < shots; ++shot) {
    std::mt19937_64 rng(mix64(seed ^ mix64(shot)));
    State state = eng.init(init, sc.boxCount);
    OutcomeTrace trace;
    for (std::size_t i = 1; i < sc.steps.size(); ++i) {
      const Step& step = sc.steps[i];
      if (const auto* b = std::get_if<BraidStep>(&step)) {
        state = eng.braid(state, *b);
        continue;
      }
      auto branches = std::holds_alternative<MeasureStep>(step)
                          ? eng.measure(state, std::get<MeasureStep>(step))
                          : eng.joint(state, std::get<JointStep>(step));
      // 53-bit uniform draw in [0,1), identical across platforms.
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      double cum = 0.;
      std::size_t pick = branches.size() - 1;
      for (std::size_t k = 0; k < branches.size(); ++k) {
        cum += branches[k].prob.value();
        if (u < cum) {
          pick = k;
          break;
        }
      }
      trace.push_back(branches[pick].outcome);
      state = std::move(branches[pick].state);
    }
    ++counts[trace];
  }

  Distribution dist;
  for (const auto& [t, c] : counts)
    dist.add(t, Prob::real(static_cast<double>(c) / static_cast<double>(shots)));
  return dist;
}

struct EvalMode {
  bool exact = true;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

// Engine-id front door used by the comparison layer and the CLI.
inline Distribution evaluate(EngineId id, const Scenario& sc, const EvalMode& mode) {
  auto go = [&](const auto& engine) {
    return mode.exact ? enumerate_exact(engine, sc) : sample(engine, sc, mode.shots, mode.seed);
  };
  switch (id) {
    case EngineId::Quantum: return go(QuantumEngine{});
    case EngineId::Hv1: return go(HV1Engine{});
    case EngineId::Hv2: return go(HV2Engine{});
    case EngineId::Stab: return go(StabEngine{});
  }
  throw std::logic_error("unknown engine id");
}

struct ComparisonReport {
  std::string scenarioName;
  std::vector<EngineId> engines;
  std::string mode;  // "exact" or "sampled"
  double tol = 0.;
  OutcomeTrace condition;  // optional trace prefix the comparison conditions on
  std::vector<Distribution> distributions;  // post-conditioning, engine order
  std::vector<Arithmetic> arithmetics;
  std::vector<std::size_t> branchCounts;  // distinct full traces per engine
  std::vector<std::vector<double>> tvMatrix;
  std::vector<std::vector<bool>> verdicts;  // tv <= tol, pairwise
  bool allMatch = true;
};

// Pairwise comparison of >= 2 engines on one scenario. Tolerance defaults to
// 0 when every compared distribution is exact-dyadic and 1e-6 otherwise.
inline ComparisonReport compare(const Scenario& sc, const std::string& scenarioName,
                                const std::vector<EngineId>& engines, const EvalMode& mode,
                                std::optional<double> tol = std::nullopt,
                                const OutcomeTrace& condition = {}) {
  if (engines.size() < 2) throw scenario_error("compare needs at least two engines");
  ComparisonReport rep;
  rep.scenarioName = scenarioName;
  rep.engines = engines;
  rep.mode = mode.exact ? "exact" : "sampled";
  rep.condition = condition;

  for (EngineId id : engines) {
    Distribution d = evaluate(id, sc, mode);
    rep.branchCounts.push_back(d.entries.size());
    if (!condition.empty()) d = condition_on_prefix(d, condition);
    rep.arithmetics.push_back(d.arithmetic());
    rep.distributions.push_back(std::move(d));
  }

  bool allExact = true;
  for (Arithmetic a : rep.arithmetics) allExact = allExact && a == Arithmetic::ExactDyadic;
  rep.tol = tol ? *tol : (allExact ? 0. : 1e-6);

  std::size_t n = engines.size();
  rep.tvMatrix.assign(n, std::vector<double>(n, 0.));
  rep.verdicts.assign(n, std::vector<bool>(n, true));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      double tv = tv_distance(rep.distributions[i], rep.distributions[j]);
      rep.tvMatrix[i][j] = rep.tvMatrix[j][i] = tv;
      bool ok = tv <= rep.tol;
      rep.verdicts[i][j] = rep.verdicts[j][i] = ok;
      rep.allMatch = rep.allMatch && ok;
    }
  return rep;
}

// ---------------------------------------------------------------------------
// JSON serialization: stable key order, floats at 12 significant digits

namespace jsonio {

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

inline std::string trace_array(const OutcomeTrace& t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) s += ",";
    s += quote(to_string(t[i]));
  }
  return s + "]";
}

}  // namespace jsonio

inline const char* to_string(Arithmetic a) {
  return a == Arithmetic::ExactDyadic ? "exact-dyadic" : "float";
}

inline std::string distribution_to_json(const Distribution& d, const std::string& scenarioName,
                                        const std::string& engineName) {
  using jsonio::quote;
  std::string out = "{\n";
  out += "  \"scenario\": " + quote(scenarioName) + ",\n";
  out += "  \"engine\": " + quote(engineName) + ",\n";
  out += "  \"arithmetic\": " + quote(to_string(d.arithmetic())) + ",\n";
  out += "  \"entries\": [\n";
  bool first = true;
  for (const auto& [t, p] : d.entries) {
    if (!first) out += ",\n";
    first = false;
    out += "    {\"trace\": " + jsonio::trace_array(t) + ", ";
    if (p.exact)
      out += "\"p_num\": " + std::to_string(p.dy.num) +
             ", \"p_den\": " + std::to_string(std::uint64_t{1} << p.dy.exp) + "}";
    else
      out += "\"p_float\": " + jsonio::fmt_double(p.fl) + "}";
  }
  out += "\n  ]\n}\n";
  return out;
}

inline std::string report_to_json(const ComparisonReport& rep) {
  using jsonio::fmt_double;
  using jsonio::quote;
  std::string out = "{\n";
  out += "  \"scenario\": " + quote(rep.scenarioName) + ",\n";
  out += "  \"engines\": [";
  for (std::size_t i = 0; i < rep.engines.size(); ++i) {
    if (i) out += ", ";
    out += quote(engine_id_name(rep.engines[i]));
  }
  out += "],\n";
  out += "  \"mode\": " + quote(rep.mode) + ",\n";
  out += "  \"tol\": " + fmt_double(rep.tol) + ",\n";
  if (!rep.condition.empty())
    out += "  \"condition\": " + jsonio::trace_array(rep.condition) + ",\n";
  out += "  \"tv_matrix\": [";
  for (std::size_t i = 0; i < rep.tvMatrix.size(); ++i) {
    if (i) out += ", ";
    out += "[";
    for (std::size_t j = 0; j < rep.tvMatrix[i].size(); ++j) {
      if (j) out += ", ";
      out += fmt_double(rep.tvMatrix[i][j]);
    }
    out += "]";
  }
  out += "],\n";
  out += "  \"verdicts\": [";
  for (std::size_t i = 0; i < rep.verdicts.size(); ++i) {
    if (i) out += ", ";
    out += "[";
    for (std::size_t j = 0; j < rep.verdicts[i].size(); ++j) {
      if (j) out += ", ";
      out += rep.verdicts[i][j] ? "true" : "false";
    }
    out += "]";
  }
  out += "],\n";
  out += "  \"branch_counts\": [";
  for (std::size_t i = 0; i < rep.branchCounts.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(rep.branchCounts[i]);
  }
  out += "],\n";
  out += "  \"arithmetics\": [";
  for (std::size_t i = 0; i < rep.arithmetics.size(); ++i) {
    if (i) out += ", ";
    out += quote(to_string(rep.arithmetics[i]));
  }
  out += "]\n}\n";
  return out;
}

}  // namespace majbox
