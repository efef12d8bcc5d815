#pragma once

// Dense reference engine: 2n Majorana modes encoded on n = boxCount/2 qubits,
// exchange unitaries (1 ± γ_aγ_b)/√2, and projective pair / four-mode joint
// parity measurements with exact branch enumeration. Ground truth for every
// other engine; intended for boxCount <= 16.

#include <bit>
#include <complex>
#include <vector>

#include "core.hpp"

namespace majbox {

inline constexpr int kQuantumMaxBoxes = 16;
inline constexpr double kBranchPrune = 1e-12;  // drop measurement branches below this

using Amp = std::complex<double>;

// Mode operators: γ_{2k+1} = Z^{⊗k} X_k, γ_{2k+2} = Z^{⊗k} Y_k (modes
// 1-based, qubits 0-based). Anticommutation {γ_i, γ_j} = 2δ_ij holds by
// construction and is verified numerically in the test suite.
struct MajoranaRep {
  int boxCount;

  explicit MajoranaRep(int boxes) : boxCount(boxes) {
    if (boxes < 2 || boxes % 2 != 0)
      throw scenario_error("box count must be a positive even number");
    if (boxes > kQuantumMaxBoxes)
      throw scenario_error("quantum engine supports at most " +
                           std::to_string(kQuantumMaxBoxes) + " boxes");
  }

  int qubits() const { return boxCount / 2; }
  std::size_t dim() const { return std::size_t{1} << qubits(); }

  void apply_gamma(int mode, std::vector<Amp>& v) const {
    int k = (mode - 1) / 2;
    bool ytype = (mode - 1) % 2 != 0;
    std::size_t bit = std::size_t{1} << k;
    std::size_t zmask = bit - 1;
    for (std::size_t b = 0; b < v.size(); ++b) {
      if (b & bit) continue;
      double z = (std::popcount(b & zmask) & 1) ? -1. : 1.;
      Amp lo = v[b];
      Amp hi = v[b | bit];
      if (ytype) {
        // Y_k: |0> -> i|1>, |1> -> -i|0>, with the Z string on lower qubits.
        v[b | bit] = Amp(0, 1) * z * lo;
        v[b] = Amp(0, -1) * z * hi;
      } else {
        v[b | bit] = z * lo;
        v[b] = z * hi;
      }
    }
  }

  // C_{a,b} = iγ_aγ_b for a < b; squares to identity.
  void apply_pair_op(const PairSpec& p, std::vector<Amp>& v) const {
    apply_gamma(p.b, v);
    apply_gamma(p.a, v);
    for (auto& x : v) x *= Amp(0, 1);
  }
};

struct QuantumState {
  int boxCount = 0;
  Parity totalParity = Parity::Even;
  std::vector<Amp> amp;
};

inline double l2_norm_sq(const std::vector<Amp>& v) {
  double s = 0.;
  for (const auto& x : v) s += std::norm(x);
  return s;
}

// Real expectation value of the signed pair operator iγ_aγ_b.
inline double q_expect_pair(const QuantumState& st, const PairSpec& p) {
  MajoranaRep rep(st.boxCount);
  std::vector<Amp> u = st.amp;
  rep.apply_pair_op(p, u);
  Amp acc = 0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += std::conj(st.amp[i]) * u[i];
  return acc.real();
}

// Simultaneous eigenstate of the declared pair parities, Even <-> +1 of
// iγ_aγ_b. The total-parity sector is the XOR of the declared parities; a
// caller-supplied expectation that disagrees is an error.
inline QuantumState q_init(const std::vector<std::pair<PairSpec, Parity>>& pairs, int boxCount,
                           std::optional<Parity> expectedTotal = std::nullopt) {
  MajoranaRep rep(boxCount);
  validate_perfect_matching(pairs, boxCount);

  Parity total = Parity::Even;
  for (const auto& [pr, par] : pairs) total ^= par;
  if (expectedTotal && *expectedTotal != total)
    throw scenario_error("total-parity conflict: declared pair parities XOR to " +
                         std::string(to_string(total)) + " but " +
                         std::string(to_string(*expectedTotal)) + " was required");

  QuantumState st;
  st.boxCount = boxCount;
  st.totalParity = total;
  // Project a basis state through all (1 + v_k C_k)/2; the first trial with
  // nonzero residual norm spans the unique stabilized line. Iteration order is
  // fixed, so the returned amplitudes are deterministic.
  for (std::size_t trial = 0; trial < rep.dim(); ++trial) {
    std::vector<Amp> psi(rep.dim(), Amp(0, 0));
    psi[trial] = 1.;
    for (const auto& [pr, par] : pairs) {
      std::vector<Amp> u = psi;
      rep.apply_pair_op(pr, u);
      double v = par == Parity::Even ? 1. : -1.;
      for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = (psi[i] + v * u[i]) / 2.;
    }
    double n2 = l2_norm_sq(psi);
    if (n2 > 1e-9) {
      double inv = 1. / std::sqrt(n2);
      for (auto& x : psi) x *= inv;
      st.amp = std::move(psi);
      return st;
    }
  }
  throw std::logic_error("pair-parity projector chain annihilated every basis state");
}

// CCW applies (1 + γ_Lγ_R)/√2 for L = min(a,b), R = max(a,b); CW its inverse.
inline QuantumState q_braid(const QuantumState& st, int a, int b, BraidDir dir) {
  if (a == b) throw scenario_error("braid requires two distinct positions");
  MajoranaRep rep(st.boxCount);
  PairSpec p(a, b);
  std::vector<Amp> u = st.amp;
  rep.apply_gamma(p.b, u);
  rep.apply_gamma(p.a, u);
  double s = dir == BraidDir::CCW ? 1. : -1.;
  QuantumState out = st;
  const double inv = 1. / std::sqrt(2.);
  for (std::size_t i = 0; i < u.size(); ++i) out.amp[i] = (st.amp[i] + s * u[i]) * inv;
  return out;
}

namespace detail {
inline std::vector<Branch<QuantumState>> project_branches(const QuantumState& st,
                                                          const std::vector<Amp>& opPsi) {
  std::vector<Branch<QuantumState>> out;
  for (Parity r : {Parity::Even, Parity::Odd}) {
    double v = r == Parity::Even ? 1. : -1.;
    std::vector<Amp> proj(st.amp.size());
    for (std::size_t i = 0; i < proj.size(); ++i) proj[i] = (st.amp[i] + v * opPsi[i]) / 2.;
    double p = l2_norm_sq(proj);
    if (p <= kBranchPrune) continue;
    double inv = 1. / std::sqrt(p);
    for (auto& x : proj) x *= inv;
    QuantumState next = st;
    next.amp = std::move(proj);
    out.push_back(Branch<QuantumState>{r, Prob::real(p), std::move(next)});
  }
  return out;
}
}  // namespace detail

// Projective measurement of iγ_aγ_b; Even <-> eigenvalue +1.
inline std::vector<Branch<QuantumState>> q_measure_pair(const QuantumState& st,
                                                        const PairSpec& pair) {
  MajoranaRep rep(st.boxCount);
  std::vector<Amp> u = st.amp;
  rep.apply_pair_op(pair, u);
  return detail::project_branches(st, u);
}

// Projective measurement of (iγ_{a1}γ_{a2})(iγ_{b1}γ_{b2}); Even <-> +1.
inline std::vector<Branch<QuantumState>> q_joint_measure(const QuantumState& st,
                                                         const PairSpec& pairA,
                                                         const PairSpec& pairB) {
  if (pairA.contains(pairB.a) || pairA.contains(pairB.b))
    throw scenario_error("joint measurement needs four distinct boxes");
  MajoranaRep rep(st.boxCount);
  std::vector<Amp> u = st.amp;
  rep.apply_pair_op(pairB, u);
  rep.apply_pair_op(pairA, u);
  return detail::project_branches(st, u);
}

struct QuantumEngine {
  using State = QuantumState;
  static constexpr const char* id = "quantum";

  State init(const InitStep& s, int boxCount) const { return q_init(s.pairs, boxCount); }
  State braid(const State& st, const BraidStep& s) const {
    return q_braid(st, s.a, s.b, s.dir);
  }
  std::vector<Branch<State>> measure(const State& st, const MeasureStep& s) const {
    return q_measure_pair(st, s.pair);
  }
  std::vector<Branch<State>> joint(const State& st, const JointStep& s) const {
    return q_joint_measure(st, s.pairA, s.pairB);
  }
};

}  // namespace majbox
