#pragma once

// Chord combinatorics on the box line shared by the classical engines:
// interleaving tests, crossing parity of matchings, and the measurement /
// joint-measurement re-pairing rules on a matching with one parity per arc.
//
// Parities in this module are canonical: the value a measurement of that arc
// returns. The crossing-sign sum rule ties them to the diagram bookkeeping:
// for any perfect matching M, XOR of canonical arc parities equals
// totalParity XOR cr(M), where cr(M) counts interleaved arc pairs. Re-pairing
// two arcs therefore needs the interleaving correction kappa below whenever
// the matching's crossing parity changes.

#include <cassert>
#include <cstdint>
#include <functional>

#include "core.hpp"

namespace majbox {

// Chords (a,b) and (c,d) cross iff exactly one endpoint of one lies strictly
// between the endpoints of the other. Pairs must be disjoint.
inline bool interleaved(const PairSpec& p, const PairSpec& q) {
  bool qa_in = p.a < q.a && q.a < p.b;
  bool qb_in = p.a < q.b && q.b < p.b;
  return qa_in != qb_in;
}

// Number of interleaved chord pairs, mod 2.
inline Parity crossing_parity(const std::vector<PairSpec>& chords) {
  unsigned c = 0;
  for (std::size_t i = 0; i < chords.size(); ++i)
    for (std::size_t j = i + 1; j < chords.size(); ++j)
      c ^= interleaved(chords[i], chords[j]) ? 1u : 0u;
  return parity_from_bit(c);
}

// Perfect matching with canonical per-arc parities, kept sorted by arc.
using ArcList = std::vector<std::pair<PairSpec, Parity>>;

inline void sort_arcs(ArcList& arcs) {
  std::sort(arcs.begin(), arcs.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });
}

inline std::vector<PairSpec> arc_pairs(const ArcList& arcs) {
  std::vector<PairSpec> out;
  out.reserve(arcs.size());
  for (const auto& [pr, par] : arcs) out.push_back(pr);
  return out;
}

inline std::size_t arc_index_containing(const ArcList& arcs, int box) {
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (arcs[i].first.contains(box)) return i;
  throw scenario_error("box " + std::to_string(box) + " is not covered by the matching");
}

// Gauge-invariant total parity: XOR of canonical parities corrected by the
// matching's crossing parity. Conserved by every operation below.
inline Parity matching_total_parity(const ArcList& arcs) {
  Parity t = Parity::Even;
  for (const auto& [pr, par] : arcs) t ^= par;
  return t ^ crossing_parity(arc_pairs(arcs));
}

inline ArcList arcs_from_init(const InitStep& init) {
  ArcList arcs(init.pairs.begin(), init.pairs.end());
  sort_arcs(arcs);
  return arcs;
}

// Interleaving correction for re-pairing arcs X, Y into (pair, partnerPair):
// the partner arc's parity is alpha ^ beta ^ outcome ^ kappa. Third arcs never
// contribute (a point lies inside an odd number of chords of a matching iff an
// odd count of the four endpoints sits left of it, independent of the pairing).
inline Parity repair_kappa(const PairSpec& oldX, const PairSpec& oldY, const PairSpec& newA,
                           const PairSpec& newB) {
  return parity_from_bit((interleaved(oldX, oldY) ? 1u : 0u) ^
                         (interleaved(newA, newB) ? 1u : 0u));
}

// Pair measurement on a matching. Same-arc: deterministic readback, state
// unchanged. Cross-arc: fair coin r; measured pair keeps r, the displaced
// partners pair up with parity alpha ^ beta ^ r ^ kappa.
inline std::vector<Branch<ArcList>> measure_arcs(const ArcList& arcs, const PairSpec& pair) {
  std::size_t ix = arc_index_containing(arcs, pair.a);
  std::size_t iy = arc_index_containing(arcs, pair.b);
  if (ix == iy) return {Branch<ArcList>{arcs[ix].second, Prob::one(), arcs}};

  const auto [oldX, alpha] = arcs[ix];
  const auto [oldY, beta] = arcs[iy];
  PairSpec partner(oldX.partner_of(pair.a), oldY.partner_of(pair.b));
  Parity kappa = repair_kappa(oldX, oldY, pair, partner);

  std::vector<Branch<ArcList>> out;
  for (Parity r : {Parity::Even, Parity::Odd}) {
    ArcList next;
    next.reserve(arcs.size());
    for (std::size_t i = 0; i < arcs.size(); ++i)
      if (i != ix && i != iy) next.push_back(arcs[i]);
    next.emplace_back(pair, r);
    next.emplace_back(partner, alpha ^ beta ^ r ^ kappa);
    sort_arcs(next);
    out.push_back(Branch<ArcList>{r, Prob::half(), std::move(next)});
  }
  return out;
}

namespace detail {

// Connected components of old+new chords linked by shared boxes; per
// component the XOR of new parities equals the XOR of old parities corrected
// by the component's internal crossing-parity change.
struct JointLayout {
  std::vector<std::size_t> oldIdx;              // indices into the input ArcList
  std::vector<PairSpec> newArcs;                // pairA, pairB, then displaced arcs
  std::vector<std::vector<std::size_t>> compOld;  // per component
  std::vector<std::vector<std::size_t>> compNew;
  std::vector<Parity> compTarget;  // required XOR of new parities per component
};

inline JointLayout joint_layout(const ArcList& arcs, const PairSpec& pairA,
                                const PairSpec& pairB, const std::vector<PairSpec>& newArcs) {
  JointLayout lay;
  lay.newArcs = newArcs;
  auto touches = [&](const PairSpec& p) {
    return pairA.contains(p.a) || pairA.contains(p.b) || pairB.contains(p.a) ||
           pairB.contains(p.b);
  };
  for (std::size_t i = 0; i < arcs.size(); ++i)
    if (touches(arcs[i].first)) lay.oldIdx.push_back(i);

  // Union-find over boxes touched by the affected chords.
  std::map<int, int> root;
  std::function<int(int)> find = [&](int x) {
    auto it = root.find(x);
    if (it == root.end() || it->second == x) {
      root[x] = x;
      return x;
    }
    return root[x] = find(it->second);
  };
  auto unite = [&](int x, int y) { root[find(x)] = find(y); };
  for (std::size_t k : lay.oldIdx) unite(arcs[k].first.a, arcs[k].first.b);
  for (const auto& p : lay.newArcs) unite(p.a, p.b);

  std::map<int, std::size_t> compOf;
  auto comp_for = [&](int box) {
    int r = find(box);
    auto it = compOf.find(r);
    if (it != compOf.end()) return it->second;
    std::size_t c = compOf.size();
    compOf[r] = c;
    lay.compOld.emplace_back();
    lay.compNew.emplace_back();
    lay.compTarget.push_back(Parity::Even);
    return c;
  };
  for (std::size_t k : lay.oldIdx) lay.compOld[comp_for(arcs[k].first.a)].push_back(k);
  for (std::size_t j = 0; j < lay.newArcs.size(); ++j)
    lay.compNew[comp_for(lay.newArcs[j].a)].push_back(j);

  for (std::size_t c = 0; c < lay.compTarget.size(); ++c) {
    Parity t = Parity::Even;
    std::vector<PairSpec> oldChords, newChords;
    for (std::size_t k : lay.compOld[c]) {
      t ^= arcs[k].second;
      oldChords.push_back(arcs[k].first);
    }
    for (std::size_t j : lay.compNew[c]) newChords.push_back(lay.newArcs[j]);
    lay.compTarget[c] = t ^ crossing_parity(oldChords) ^ crossing_parity(newChords);
  }
  return lay;
}

}  // namespace detail

// Joint parity measurement of two disjoint pairs.
//
// When the four boxes are covered by two existing arcs (either the measured
// pairs themselves or the crossed covering), the outcome is determined by
// those arcs and the state is left untouched. Otherwise the measured pairs
// become arcs, displaced partners re-pair (partners of pairA together,
// partners of pairB together, leftovers across fully-consumed arcs together),
// and the new parities are drawn uniformly over the assignments satisfying
// every component constraint; the outcome is pairA's parity XOR pairB's.
inline std::vector<Branch<ArcList>> joint_measure_arcs(const ArcList& arcs,
                                                       const PairSpec& pairA,
                                                       const PairSpec& pairB) {
  if (pairA.contains(pairB.a) || pairA.contains(pairB.b))
    throw scenario_error("joint measurement needs four distinct boxes");
  auto partner = [&](int box) {
    const PairSpec& arc = arcs[arc_index_containing(arcs, box)].first;
    return arc.partner_of(box);
  };
  auto measured = [&](int box) { return pairA.contains(box) || pairB.contains(box); };

  std::vector<int> dispA, dispB;
  for (int box : {pairA.a, pairA.b})
    if (int p = partner(box); !measured(p)) dispA.push_back(p);
  for (int box : {pairB.a, pairB.b})
    if (int p = partner(box); !measured(p)) dispB.push_back(p);

  if (dispA.empty() && dispB.empty()) {
    // Two old arcs cover the measured boxes; outcome is forced, nothing moves.
    std::size_t ix = arc_index_containing(arcs, pairA.a);
    std::size_t iy = arc_index_containing(arcs, pairA.b);
    if (iy == ix) iy = arc_index_containing(arcs, pairB.a);
    Parity r = arcs[ix].second ^ arcs[iy].second ^
               repair_kappa(arcs[ix].first, arcs[iy].first, pairA, pairB);
    return {Branch<ArcList>{r, Prob::one(), arcs}};
  }

  std::vector<PairSpec> newArcs = {pairA, pairB};
  if (dispA.size() == 2) newArcs.emplace_back(dispA[0], dispA[1]);
  if (dispB.size() == 2) newArcs.emplace_back(dispB[0], dispB[1]);
  if (dispA.size() == 1 && dispB.size() == 1) newArcs.emplace_back(dispA[0], dispB[0]);
  // Chords with exactly one endpoint among the measured boxes come in pairs.
  assert((dispA.size() + dispB.size()) % 2 == 0);

  auto lay = detail::joint_layout(arcs, pairA, pairB, newArcs);

  // Keep every arc not displaced by the re-pairing.
  ArcList base;
  {
    std::vector<bool> drop(arcs.size(), false);
    for (std::size_t k : lay.oldIdx) drop[k] = true;
    for (std::size_t i = 0; i < arcs.size(); ++i)
      if (!drop[i]) base.push_back(arcs[i]);
  }

  // One free parity bit per new arc except the last of each component.
  std::vector<std::size_t> freeSlots;
  for (const auto& compNew : lay.compNew)
    for (std::size_t j = 0; j + 1 < compNew.size(); ++j) freeSlots.push_back(compNew[j]);

  std::vector<Branch<ArcList>> out;
  Prob w = Prob::dyadic(Dyadic::make(1, static_cast<int>(freeSlots.size())));
  for (std::uint32_t bits = 0; bits < (1u << freeSlots.size()); ++bits) {
    std::vector<Parity> np(newArcs.size(), Parity::Even);
    for (std::size_t s = 0; s < freeSlots.size(); ++s)
      np[freeSlots[s]] = parity_from_bit(bits >> s);
    for (std::size_t c = 0; c < lay.compNew.size(); ++c) {
      Parity acc = lay.compTarget[c];
      const auto& compNew = lay.compNew[c];
      for (std::size_t j = 0; j + 1 < compNew.size(); ++j) acc ^= np[compNew[j]];
      np[compNew.back()] = acc;
    }
    ArcList next = base;
    for (std::size_t j = 0; j < newArcs.size(); ++j) next.emplace_back(newArcs[j], np[j]);
    sort_arcs(next);
    out.push_back(Branch<ArcList>{np[0] ^ np[1], w, std::move(next)});
  }
  return out;
}

}  // namespace majbox
