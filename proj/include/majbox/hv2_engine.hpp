#pragma once

// Classical hidden-variable model II: the matching-with-parities state of
// model I augmented with a signed crossing ledger. Braids append one crossing
// whose over/under sense is fixed by a calibrated convention; states are
// eagerly rewritten to standard form (Reidemeister-II cancellations, plus
// crossovers that flip one crossing's sense and both touched arcs' stored
// parities).
//
// Stored parities live in the diagram gauge: the plain XOR of stored parities
// is the conserved total parity, and the debug dump shows them directly. The
// value a measurement returns is the canonical parity
//     canonical(A) = stored(A) XOR #(standard-form crossings with A in front),
// which is what ties this model to the other engines' statistics.

#include <string>

#include "chords.hpp"
#include "core.hpp"

namespace majbox {

enum class Sense : std::uint8_t { RightFront = 0, LeftFront = 1 };

inline const char* to_string(Sense s) {
  return s == Sense::RightFront ? "rightfront" : "leftfront";
}

// One physical crossing between two arcs; sense names the front strand by
// side: RightFront <-> the arc with the larger maximal position is in front.
struct Crossing {
  PairSpec arcA;  // lexicographically smaller arc
  PairSpec arcB;
  Sense sense;

  friend bool operator==(const Crossing&, const Crossing&) = default;
};

inline PairSpec right_arc_of(const PairSpec& a, const PairSpec& b) {
  return a.b > b.b ? a : b;
}

inline Crossing make_crossing(PairSpec a, PairSpec b, const PairSpec& front) {
  if (b < a) std::swap(a, b);
  bool frontIsRight = front == right_arc_of(a, b);
  return Crossing{a, b, frontIsRight ? Sense::RightFront : Sense::LeftFront};
}

inline PairSpec front_arc(const Crossing& c) {
  PairSpec right = right_arc_of(c.arcA, c.arcB);
  if (c.sense == Sense::RightFront) return right;
  return right == c.arcA ? c.arcB : c.arcA;
}

// The one free diagrammatic bit: which strand goes in front at the crossing a
// CCW exchange appends. RightFront: the rightward-travelling box's strand is
// in front when the exchange creates a crossing (and the leftward one when it
// removes a crossing); LeftFront is the mirror. CW always mirrors CCW.
struct CalibrationConvention {
  Sense ccwSense = Sense::RightFront;

  Sense cw_sense() const {
    return ccwSense == Sense::RightFront ? Sense::LeftFront : Sense::RightFront;
  }
  friend bool operator==(const CalibrationConvention&, const CalibrationConvention&) = default;
};

// Fixed by the calibration suite against the oracles; see calibrate().
inline constexpr CalibrationConvention kCommittedConvention{Sense::RightFront};

struct HV2State {
  int boxCount = 0;
  ArcList arcs;  // stored parities in diagram gauge, sorted by arc
  std::vector<Crossing> ledger;
  CalibrationConvention convention;

  // Diagram-gauge XOR is the conserved total parity.
  Parity total_parity() const {
    Parity t = Parity::Even;
    for (const auto& [pr, par] : arcs) t ^= par;
    return t;
  }
  friend bool operator==(const HV2State&, const HV2State&) = default;
};

inline int front_count(const std::vector<Crossing>& ledger, const PairSpec& arc) {
  int k = 0;
  for (const auto& c : ledger)
    if ((c.arcA == arc || c.arcB == arc) && front_arc(c) == arc) ++k;
  return k;
}

// One RightFront crossing per interleaving arc pair, nothing else.
inline std::vector<Crossing> standard_ledger(const std::vector<PairSpec>& chords) {
  std::vector<Crossing> out;
  for (std::size_t i = 0; i < chords.size(); ++i)
    for (std::size_t j = i + 1; j < chords.size(); ++j)
      if (interleaved(chords[i], chords[j]))
        out.push_back(make_crossing(chords[i], chords[j], right_arc_of(chords[i], chords[j])));
  std::sort(out.begin(), out.end(), [](const Crossing& l, const Crossing& r) {
    return std::pair{l.arcA, l.arcB} < std::pair{r.arcA, r.arcB};
  });
  return out;
}

inline bool is_standard(const HV2State& st) {
  return st.ledger == standard_ledger(arc_pairs(st.arcs));
}

// Crossover: flip one crossing's front strand and both touched arcs' stored
// parities. Gauge move — canonical parities are untouched.
inline void apply_crossover(HV2State& st, std::size_t idx) {
  Crossing& c = st.ledger.at(idx);
  c.sense = c.sense == Sense::RightFront ? Sense::LeftFront : Sense::RightFront;
  for (auto& [pr, par] : st.arcs)
    if (pr == c.arcA || pr == c.arcB) par = par ^ Parity::Odd;
}

// Rewrites the ledger to standard form: repeatedly cancel adjacent
// opposite-sense crossing pairs of the same arc pair (no parity effect), and
// apply crossovers where the remaining run has the wrong sense or should not
// exist. Arc pairs are processed in ascending lexicographic order. The
// iteration bound only trips on inconsistent ledgers (a pair's crossing count
// must match its interleaving mod 2).
inline HV2State hv2_standardize(const HV2State& in) {
  HV2State st = in;
  std::size_t bound = 4 * st.ledger.size() + 4 * static_cast<std::size_t>(st.boxCount) *
                                                 static_cast<std::size_t>(st.boxCount) + 4;
  for (std::size_t iter = 0; iter <= bound; ++iter) {
    // Per-pair subsequences in ledger order.
    std::map<std::pair<PairSpec, PairSpec>, std::vector<std::size_t>> runs;
    for (std::size_t i = 0; i < st.ledger.size(); ++i)
      runs[{st.ledger[i].arcA, st.ledger[i].arcB}].push_back(i);

    // Reidemeister-II: cancel adjacent opposite-sense pairs.
    std::vector<bool> drop(st.ledger.size(), false);
    bool dropped = false;
    for (const auto& [key, seq] : runs) {
      std::vector<std::size_t> stack;
      for (std::size_t i : seq) {
        if (!stack.empty() && st.ledger[stack.back()].sense != st.ledger[i].sense) {
          drop[stack.back()] = true;
          drop[i] = true;
          stack.pop_back();
          dropped = true;
        } else {
          stack.push_back(i);
        }
      }
    }
    if (dropped) {
      std::vector<Crossing> kept;
      for (std::size_t i = 0; i < st.ledger.size(); ++i)
        if (!drop[i]) kept.push_back(st.ledger[i]);
      st.ledger = std::move(kept);
      continue;
    }

    // All runs are same-sense; fix the first violation with one crossover.
    bool violated = false;
    for (const auto& [key, seq] : runs) {
      const auto& [a, b] = key;
      bool il = interleaved(a, b);
      bool ok = il ? (seq.size() == 1 && st.ledger[seq[0]].sense == Sense::RightFront)
                   : seq.empty();
      if (ok) continue;
      apply_crossover(st, seq.back());
      violated = true;
      break;
    }
    if (violated) continue;

    // No violations and nothing to cancel: verify interleaving pairs all have
    // their crossing (a consistent ledger guarantees it), then normalize order.
    if (standard_ledger(arc_pairs(st.arcs)).size() != st.ledger.size()) break;
    std::sort(st.ledger.begin(), st.ledger.end(), [](const Crossing& l, const Crossing& r) {
      return std::pair{l.arcA, l.arcB} < std::pair{r.arcA, r.arcB};
    });
    return st;
  }
  throw guard_error("crossing ledger did not standardize; inconsistent diagram");
}

// Measurement-value parities for all arcs; the state must be standard.
inline ArcList canonical_arcs(const HV2State& st) {
  ArcList out = st.arcs;
  for (auto& [pr, par] : out)
    par = par ^ parity_from_bit(static_cast<unsigned>(front_count(st.ledger, pr)));
  return out;
}

// Builds the standard-form state whose measurement values are `canon`.
inline HV2State state_from_canonical(int boxCount, ArcList canon,
                                     CalibrationConvention conv) {
  sort_arcs(canon);
  HV2State st;
  st.boxCount = boxCount;
  st.convention = conv;
  st.ledger = standard_ledger(arc_pairs(canon));
  st.arcs = std::move(canon);
  for (auto& [pr, par] : st.arcs)
    par = par ^ parity_from_bit(static_cast<unsigned>(front_count(st.ledger, pr)));
  return st;
}

inline HV2State hv2_init(const std::vector<std::pair<PairSpec, Parity>>& pairs, int boxCount,
                         CalibrationConvention conv = kCommittedConvention) {
  validate_perfect_matching(pairs, boxCount);
  return state_from_canonical(boxCount, ArcList(pairs.begin(), pairs.end()), conv);
}

// Adjacent exchange of positions a, b. Same-arc exchanges are identity on all
// observables. Otherwise the two arcs swap endpoints, one crossing is appended
// with its front strand picked by (direction, creates-vs-removes, convention),
// and the state is eagerly standardized.
inline HV2State hv2_braid(const HV2State& in, int a, int b, BraidDir dir) {
  if (std::abs(a - b) != 1) throw scenario_error("braid requires adjacent positions");
  int L = std::min(a, b), R = std::max(a, b);
  HV2State st = in;
  std::size_t ix = arc_index_containing(st.arcs, L);
  std::size_t iy = arc_index_containing(st.arcs, R);
  if (ix == iy) return st;

  PairSpec oldX = st.arcs[ix].first;  // holds L, its box travels rightward
  PairSpec oldY = st.arcs[iy].first;  // holds R, its box travels leftward
  bool creates = !interleaved(oldX, oldY);
  PairSpec newX(R, oldX.partner_of(L));
  PairSpec newY(L, oldY.partner_of(R));

  auto remap = [&](const PairSpec& p) { return p == oldX ? newX : p == oldY ? newY : p; };
  for (auto& c : st.ledger)
    c = make_crossing(remap(c.arcA), remap(c.arcB), remap(front_arc(c)));
  st.arcs[ix].first = newX;
  st.arcs[iy].first = newY;
  sort_arcs(st.arcs);

  bool rightwardFront = (dir == BraidDir::CCW) == creates;
  if (st.convention.ccwSense == Sense::LeftFront) rightwardFront = !rightwardFront;
  st.ledger.push_back(make_crossing(newX, newY, rightwardFront ? newX : newY));
  return hv2_standardize(st);
}

inline std::vector<Branch<HV2State>> hv2_measure_pair(const HV2State& in,
                                                      const PairSpec& pair) {
  HV2State st = hv2_standardize(in);
  std::vector<Branch<HV2State>> out;
  for (auto& br : measure_arcs(canonical_arcs(st), pair))
    out.push_back(Branch<HV2State>{
        br.outcome, br.prob,
        state_from_canonical(st.boxCount, std::move(br.state), st.convention)});
  return out;
}

inline std::vector<Branch<HV2State>> hv2_joint_measure(const HV2State& in,
                                                       const PairSpec& pairA,
                                                       const PairSpec& pairB) {
  HV2State st = hv2_standardize(in);
  std::vector<Branch<HV2State>> out;
  for (auto& br : joint_measure_arcs(canonical_arcs(st), pairA, pairB))
    out.push_back(Branch<HV2State>{
        br.outcome, br.prob,
        state_from_canonical(st.boxCount, std::move(br.state), st.convention)});
  return out;
}

// Debug dump: one line per arc with its stored (diagram-gauge) parity, one
// line per crossing.
inline std::string dump_hv2(const HV2State& st) {
  std::string out;
  for (const auto& [pr, par] : st.arcs) {
    out += "(" + std::to_string(pr.a) + "," + std::to_string(pr.b) + ")=" + to_string(par);
    out += "\n";
  }
  for (const auto& c : st.ledger) {
    out += "x((" + std::to_string(c.arcA.a) + "," + std::to_string(c.arcA.b) + ")|(" +
           std::to_string(c.arcB.a) + "," + std::to_string(c.arcB.b) + "))=" +
           to_string(c.sense);
    out += "\n";
  }
  return out;
}

struct HV2Engine {
  using State = HV2State;
  static constexpr const char* id = "hv2";

  CalibrationConvention convention = kCommittedConvention;

  State init(const InitStep& s, int boxCount) const {
    return hv2_init(s.pairs, boxCount, convention);
  }
  State braid(const State& st, const BraidStep& s) const {
    return hv2_braid(st, s.a, s.b, s.dir);
  }
  std::vector<Branch<State>> measure(const State& st, const MeasureStep& s) const {
    return hv2_measure_pair(st, s.pair);
  }
  std::vector<Branch<State>> joint(const State& st, const JointStep& s) const {
    return hv2_joint_measure(st, s.pairA, s.pairB);
  }
};

}  // namespace majbox
