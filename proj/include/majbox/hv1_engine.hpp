#pragma once

// Classical hidden-variable model I: a perfect matching of box positions with
// one parity bit per arc. Measurements follow the fair-coin re-pairing rule;
// braids merely swap box labels (no geometric data, direction ignored), which
// is this model's documented braiding failure.

#include "chords.hpp"
#include "core.hpp"

namespace majbox {

struct HV1State {
  int boxCount = 0;
  ArcList arcs;  // canonical parities, sorted by arc

  Parity total_parity() const { return matching_total_parity(arcs); }
  friend bool operator==(const HV1State&, const HV1State&) = default;
};

inline HV1State hv1_init(const std::vector<std::pair<PairSpec, Parity>>& pairs, int boxCount) {
  validate_perfect_matching(pairs, boxCount);
  HV1State st;
  st.boxCount = boxCount;
  st.arcs = ArcList(pairs.begin(), pairs.end());
  sort_arcs(st.arcs);
  return st;
}

inline std::vector<Branch<HV1State>> hv1_measure_pair(const HV1State& st,
                                                      const PairSpec& pair) {
  std::vector<Branch<HV1State>> out;
  for (auto& br : measure_arcs(st.arcs, pair))
    out.push_back(Branch<HV1State>{br.outcome, br.prob,
                                   HV1State{st.boxCount, std::move(br.state)}});
  return out;
}

// Boxes at positions a and b trade places; arcs follow their boxes, parities
// untouched, direction ignored.
inline HV1State hv1_braid(const HV1State& st, int a, int b, BraidDir) {
  if (std::abs(a - b) != 1) throw scenario_error("braid requires adjacent positions");
  HV1State out = st;
  for (auto& [pr, par] : out.arcs) {
    int na = pr.a == a ? b : pr.a == b ? a : pr.a;
    int nb = pr.b == a ? b : pr.b == b ? a : pr.b;
    pr = PairSpec(na, nb);
  }
  sort_arcs(out.arcs);
  return out;
}

inline std::vector<Branch<HV1State>> hv1_joint_measure(const HV1State& st,
                                                       const PairSpec& pairA,
                                                       const PairSpec& pairB) {
  std::vector<Branch<HV1State>> out;
  for (auto& br : joint_measure_arcs(st.arcs, pairA, pairB))
    out.push_back(Branch<HV1State>{br.outcome, br.prob,
                                   HV1State{st.boxCount, std::move(br.state)}});
  return out;
}

struct HV1Engine {
  using State = HV1State;
  static constexpr const char* id = "hv1";

  State init(const InitStep& s, int boxCount) const { return hv1_init(s.pairs, boxCount); }
  State braid(const State& st, const BraidStep& s) const {
    return hv1_braid(st, s.a, s.b, s.dir);
  }
  std::vector<Branch<State>> measure(const State& st, const MeasureStep& s) const {
    return hv1_measure_pair(st, s.pair);
  }
  std::vector<Branch<State>> joint(const State& st, const JointStep& s) const {
    return hv1_joint_measure(st, s.pairA, s.pairB);
  }
};

}  // namespace majbox
